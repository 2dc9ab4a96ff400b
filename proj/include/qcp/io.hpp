#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace qcp {

/// Shortest round-trip-safe rendering, "%.17g".
std::string format_double(double v);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long v);
    CsvWriter& operator<<(int v) { return *this << static_cast<long>(v); }
    CsvWriter& operator<<(const std::string& s);
    CsvWriter& operator<<(const char* s) { return *this << std::string(s); }
    void end_row();
    void close();
    const std::string& path() const { return path_; }

private:
    void separator();

    std::string path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
    std::size_t cell_ = 0;
};

/// 64-bit FNV-1a of a byte string and of a file's contents, as 16 hex digits.
std::uint64_t fnv1a64(const std::string& bytes);
std::string file_digest(const std::string& path);

struct RunManifest {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json tolerances = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    int threads = 1;
    double wall_time = 0.0;
    std::string version;
    std::vector<std::pair<std::string, std::string>> outputs;  ///< path, digest

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
    void add_output(const std::string& path) { outputs.emplace_back(path, file_digest(path)); }
    void write(const std::string& path) const;
};

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

} // namespace qcp
