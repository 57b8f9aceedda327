#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include "commands.hpp"
#include "config.hpp"

#include "nlsw/error.hpp"
#include "nlsw/io.hpp"

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <unistd.h>

using namespace nlsw;
using namespace nlsw::cli;
using nlohmann::json;
namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

fs::path corpus()
{
    const char* dir = std::getenv("NLSW_CORPUS");
    return fs::absolute(dir ? fs::path(dir) : fs::path("tools/corpus"));
}

json corpus_json(const std::string& name)
{
    std::ifstream in(corpus() / name);
    REQUIRE(in);
    return json::parse(in);
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("nlsw_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

json read_json(const fs::path& p)
{
    std::ifstream in(p);
    return json::parse(in);
}

json minimal()
{
    return {{"grid", {{"L", 8}, {"M", 256}}},
            {"potential", {{"kind", "constant"}, {"base", 1.0}}},
            {"nonlinearity", {{"p", 4}}},
            {"mass", 4.0}};
}

} // namespace

TEST_CASE("config validation")
{
    CHECK_NOTHROW(parse_config(minimal()));
    CHECK(parse_config(minimal()).hash == parse_config(minimal()).hash);
    CHECK(parse_config(minimal()).hash.size() == 16);

    auto bad = [](auto edit) {
        json j = minimal();
        edit(j);
        return j;
    };
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["nonlinearity"]["p"] = 2; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["nonlinearity"]["p"] = 1.5; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["colour"] = "blue"; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["grid"]["M"] = 260; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["grid"]["L"] = 8.5; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["mass"] = -1.0; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["grid"]["M"] = "many"; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["semiclassical"] = {{"eps_list", {0.05, 0.1}}}; })),
                    ConfigError);
    CHECK_THROWS_AS(load_config(corpus() / "no_such_file.json"), ConfigError);
    CHECK_THROWS_AS(load_config(corpus() / "bad_exponent.json"), ConfigError);

    const json changed = bad([](json& j) { j["mass"] = 4.5; });
    CHECK(parse_config(changed).hash != parse_config(minimal()).hash);
}

TEST_CASE("exit codes")
{
    CHECK(exit_code_for(ConfigError("x")) == 2);
    CHECK(exit_code_for(PreconditionError("x")) == 3);
    CHECK(exit_code_for(AssumptionViolation("x")) == 3);
    CHECK(exit_code_for(InvalidField("x")) == 3);
    CHECK(exit_code_for(SolverError("x")) == 4);
    CHECK(exit_code_for(std::runtime_error("x")) == 4);
}

TEST_CASE("worker pool visits every index once")
{
    std::vector<int> hits(57, 0);
    run_pool(4, hits.size(), [&](std::size_t i) { ++hits[i]; });
    for (int h : hits)
        CHECK(h == 1);
}

TEST_CASE("groundstate and spectrum commands")
{
    const auto cfg = load_config(corpus() / "sech_groundstate.json");
    Context a;
    a.out = scratch("gs_a");
    REQUIRE(cmd_groundstate(cfg, a) == 0);
    const json j = read_json(a.out / "groundstate.json");
    CHECK(j.at("point").at("residual").get<double>() < 1e-8);
    CHECK_THAT(j.at("point").at("mass").get<double>(), WithinRel(oracle::soliton_mass, 1e-12));
    CHECK_THAT(j.at("point").at("energy").get<double>(), WithinRel(oracle::soliton_energy, 1e-10));
    CHECK(j.at("config_hash").get<std::string>() == cfg.hash);

    Context b;
    b.out = scratch("gs_b");
    REQUIRE(cmd_groundstate(cfg, b) == 0);
    for (const char* name : {"groundstate.json", "groundstate.csv", "groundstate.bin"})
        CHECK(slurp(a.out / name) == slurp(b.out / name));

    Context s;
    s.out = scratch("spectrum");
    s.field = a.out / "groundstate.bin";
    REQUIRE(cmd_spectrum(cfg, s) == 0);
    const json sp = read_json(s.out / "spectrum.json");
    CHECK(sp.at("spectral").at("m_f").get<int>() == 1);
    CHECK(fs::exists(s.out / "eigenvalues.csv"));

    // a field that is not a critical point is refused
    Field u = read_field_binary(a.out / "groundstate.bin");
    write_field_binary(1.01 * u, s.out / "tampered.bin");
    Context t = s;
    t.field = s.out / "tampered.bin";
    CHECK_THROWS_AS(cmd_spectrum(cfg, t), PreconditionError);

    Context none;
    none.out = scratch("spectrum_none");
    CHECK_THROWS_AS(cmd_spectrum(cfg, none), ConfigError);
}

TEST_CASE("glue command reports failed rows")
{
    json j = corpus_json("glue_two_bumps.json");
    j["bumps"]["separations"] = {2, 12};
    j["shadowing"]["enabled"] = false;
    auto cfg = parse_config(j);
    Context ctx;
    ctx.out = scratch("glue");
    ctx.jobs = 2;
    REQUIRE(cmd_glue(cfg, ctx) == 0);
    std::ifstream in(ctx.out / "glue.csv");
    std::string header, row2, row12;
    std::getline(in, header);
    std::getline(in, row2);
    std::getline(in, row12);
    CHECK(header.rfind("d,newton_iters,", 0) == 0);
    CHECK(row2.rfind("2,", 0) == 0);
    CHECK(row2.find("ok") == std::string::npos);
    CHECK(row12.rfind("12,", 0) == 0);
    CHECK(row12.find(",ok,") != std::string::npos);
    CHECK(fs::exists(ctx.out / "glue_d12.bin"));
}

TEST_CASE("sweep compares exit codes with expectations")
{
    const fs::path dir = scratch("sweep");
    const json manifest = {{"runs",
                            {{{"name", "sech"}, {"command", "groundstate"},
                              {"config", (corpus() / "sech_groundstate.json").string()}},
                             {{"name", "bad"}, {"command", "groundstate"},
                              {"config", (corpus() / "bad_exponent.json").string()}, {"expect_exit", 2}}}}};
    std::ofstream(dir / "manifest.json") << manifest.dump();
    Context ctx;
    ctx.out = dir / "out";
    ctx.jobs = 2;
    CHECK(cmd_sweep(dir / "manifest.json", ctx) == 0);
    const std::string summary = slurp(ctx.out / "summary.csv");
    CHECK(summary.find("sech") != std::string::npos);
    CHECK(fs::exists(ctx.out / "sech" / "groundstate.json"));

    json wrong = manifest;
    wrong["runs"][1]["expect_exit"] = 0;
    std::ofstream(dir / "wrong.json") << wrong.dump();
    CHECK(cmd_sweep(dir / "wrong.json", ctx) == 4);

    std::ofstream(dir / "broken.json") << R"({"runs": [{"name": "x"}]})";
    CHECK_THROWS_AS(cmd_sweep(dir / "broken.json", ctx), ConfigError);
}
