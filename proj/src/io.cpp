#include "qcp/io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qcp {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size())
{
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::separator()
{
    if (cell_ == columns_) throw std::logic_error("CsvWriter: too many cells in row of " + path_);
    if (cell_++) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double v)
{
    separator();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(long v)
{
    separator();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s)
{
    separator();
    out_ << s;
    return *this;
}

void CsvWriter::end_row()
{
    if (cell_ != columns_) throw std::logic_error("CsvWriter: short row in " + path_);
    out_ << '\n';
    cell_ = 0;
}

void CsvWriter::close()
{
    out_.close();
    if (!out_) throw std::runtime_error("error writing " + path_);
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string file_digest(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(ss.str())));
    return buf;
}

nlohmann::json RunManifest::to_json() const
{
    nlohmann::json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["tolerances"] = tolerances;
    j["results"] = results;
    j["threads"] = threads;
    j["wall_time_s"] = wall_time;
    j["version"] = version;
    j["outputs"] = nlohmann::json::array();
    for (const auto& [p, d] : outputs) j["outputs"].push_back({{"path", p}, {"fnv1a64", d}});
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j)
{
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.parameters = j.at("parameters");
    m.tolerances = j.at("tolerances");
    m.results = j.value("results", nlohmann::json::object());
    m.threads = j.at("threads").get<int>();
    m.wall_time = j.at("wall_time_s").get<double>();
    m.version = j.at("version").get<std::string>();
    for (const auto& o : j.at("outputs")) m.outputs.emplace_back(o.at("path"), o.at("fnv1a64"));
    return m;
}

void RunManifest::write(const std::string& path) const { write_json(path, to_json()); }

void write_json(const std::string& path, const nlohmann::json& j)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return nlohmann::json::parse(in);
}

} // namespace qcp
