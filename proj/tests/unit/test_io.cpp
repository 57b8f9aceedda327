#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include "nlsw/error.hpp"
#include "nlsw/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <unistd.h>

using namespace nlsw;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("nlsw_io_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

Field sample_field()
{
    GridSpec g(7.5, 96);
    return Field(g, oracle::random_smooth(g.L, g.M, 11));
}

} // namespace

TEST_CASE("format_double reads back exactly")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ud(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double x = ud(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        REQUIRE(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-2.0) == "-2");
    const double tiny = std::numeric_limits<double>::denorm_min();
    const std::string s = format_double(tiny);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == tiny);
}

TEST_CASE("field files round trip bit for bit")
{
    const Field u = sample_field();
    SECTION("csv")
    {
        const auto path = scratch("u.csv");
        write_field_csv(u, path);
        const Field v = read_field_csv(path);
        CHECK(v.grid() == u.grid());
        CHECK(v.values() == u.values());
    }
    SECTION("binary")
    {
        const auto path = scratch("u.bin");
        write_field_binary(u, path);
        CHECK(fs::file_size(path) == 16 + 8 * static_cast<std::uintmax_t>(u.size()));
        const Field v = read_field_binary(path);
        CHECK(v.grid() == u.grid());
        CHECK(v.values() == u.values());
    }
    SECTION("damaged files")
    {
        const auto path = scratch("short.bin");
        write_field_binary(u, path);
        fs::resize_file(path, 100);
        CHECK_THROWS_AS(read_field_binary(path), InvalidField);
        CHECK_THROWS_AS(read_field_binary(scratch("missing.bin")), InvalidField);

        const auto bad = scratch("bad.csv");
        std::ofstream(bad) << "x,value\n-1,0.5\n0,abc\n";
        CHECK_THROWS_AS(read_field_csv(bad), InvalidField);
    }
}

TEST_CASE("csv tables")
{
    CsvTable t({"a", "b", "c"});
    t.add({cell(1), cell(0.25), cell(true)});
    t.add({cell(-7L), cell(1e-300), cell(false)});
    CHECK(t.rows() == 2);
    CHECK(t.str() == "a,b,c\n1,0.25,true\n-7,1e-300,false\n");
    CHECK_THROWS_AS(t.add({"1", "2"}), Error);
}

TEST_CASE("fnv1a")
{
    // published 64-bit FNV-1a test vectors
    CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
    CHECK(hex64(fnv1a("foobar")) == "85944171f73967e8");
    CHECK(hex64(0) == "0000000000000000");
}

TEST_CASE("json reports")
{
    const Field u = sample_field();
    auto j = to_json(u.grid());
    CHECK(j.at("L").get<double>() == u.grid().L);
    CHECK(j.at("M").get<int>() == u.grid().M);
    const auto path = scratch("g.json");
    write_json(j, path);
    std::ifstream in(path);
    CHECK(nlohmann::json::parse(in) == j);
}
