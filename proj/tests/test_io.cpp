#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcp/io.hpp"

using namespace qcp;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("qcp_test_" + name)).string();
}

} // namespace

TEST_CASE("double formatting round trips")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("csv writer")
{
    const std::string path = temp_path("a.csv");
    {
        CsvWriter w(path, {"L", "omega", "label"});
        w << 3 << 0.1 << "x";
        w.end_row();
        w << 4L << 2.0 << std::string("y");
        CHECK_THROWS_AS(w << 1.0, std::logic_error);
        w.end_row();
        w << 1;
        CHECK_THROWS_AS(w.end_row(), std::logic_error);
    }
    CHECK(slurp(path).rfind("L,omega,label\n3,0.10000000000000001,x\n4,2,y\n", 0) == 0);
    std::filesystem::remove(path);
    CHECK_THROWS(CsvWriter("/nonexistent/dir/x.csv", {"a"}));
}

TEST_CASE("fnv1a64 reference values")
{
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    const std::string path = temp_path("d.txt");
    std::ofstream(path) << "foobar";
    CHECK(file_digest(path) == "85944171f73967e8");
    std::filesystem::remove(path);
}

TEST_CASE("manifest round trip")
{
    const std::string out = temp_path("m.csv");
    std::ofstream(out) << "x\n1\n";
    RunManifest m;
    m.command = "spectrum";
    m.parameters = {{"L", 4}, {"omega", 1.5}};
    m.tolerances = {{"zero_mode", 1e-9}};
    m.results = {{"gap", 0.25}};
    m.threads = 2;
    m.wall_time = 0.5;
    m.version = "1.0.0";
    m.add_output(out);
    const std::string path = temp_path("m.json");
    m.write(path);
    const RunManifest back = RunManifest::from_json(read_json(path));
    CHECK(back.command == "spectrum");
    CHECK(back.parameters["L"] == 4);
    CHECK(back.results["gap"] == 0.25);
    CHECK(back.threads == 2);
    REQUIRE(back.outputs.size() == 1);
    CHECK(back.outputs[0].second == file_digest(out));
    std::filesystem::remove(out);
    std::filesystem::remove(path);
}
