#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "macf/sim.hpp"
#include "macf/verify.hpp"

using namespace macf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("macf_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(
        "# comment line\n"
        "epsilon = 0.04\n"
        "t_end = 0.1   # trailing comment\n"
        "scheme = explicit\ndt = 5e-7\n"
        "n = 3\nm = 1\ngrid = 512\ninit.kind = flat\ninit.radius = 0.2\n"
        "diag_stride = 7\nout_dir = runs/a\nseed = 42\n\n");
    CHECK(cfg.epsilon == 0.04);
    CHECK(cfg.t_end == 0.1);
    CHECK(cfg.scheme == Scheme::explicit_euler);
    CHECK(cfg.n == 3);
    CHECK(cfg.m == 1);
    CHECK(cfg.grid == 512);
    CHECK(cfg.init == InitKind::flat);
    CHECK(cfg.radius == 0.2);
    CHECK(cfg.diag_stride == 7);
    CHECK(cfg.out_dir == "runs/a");
    CHECK(cfg.seed == 42);
    CHECK(cfg.time_step() == 5e-7);
    CHECK(parse_config("epsilon = 0.04\ngrid = 128\ninit.radius = 0.3\n").time_step() == doctest::Approx(0.1 * 0.04 * 0.04));
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("epsilon = 0.1\nepsilon = 0.2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("epsilon = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("scheme = implicit\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("epsilon 0.1\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/macf.cfg"), ConfigError);
}

TEST_CASE("config format round trip") {
    RunConfig cfg;
    cfg.epsilon = 0.1 / 3.0;
    cfg.phase = 0.25;
    cfg.twist = 0.0;
    cfg.init_file = "x.macf";
    cfg.seed = 9;
    const auto back = parse_config(format_config(cfg));
    CHECK(back.epsilon == cfg.epsilon);
    CHECK(back.phase == cfg.phase);
    CHECK(back.init_file == cfg.init_file);
    CHECK(back.seed == 9);
    CHECK(format_config(back) == format_config(cfg));
}

TEST_CASE("snapshot round trip and layout") {
    RunConfig cfg;
    cfg.epsilon = 0.04;
    cfg.grid = 128;
    cfg.n = 3;
    cfg.radius = 0.3;
    cfg.phase = 0.4;
    MatrixField f = init_well_prepared(cfg);
    f.set_time(0.125);
    const fs::path dir = scratch("snap");
    fs::create_directories(dir);
    const auto path = (dir / "f.macf").string();
    write_snapshot(path, f);
    CHECK(fs::file_size(path) == 5 + 4 + 4 + 2 * 4 + 8 + 128 * 128 * 9 * 8);

    std::ifstream is(path, std::ios::binary);
    char magic[5];
    is.read(magic, 5);
    CHECK(std::string(magic, 5) == "MACF1");
    unsigned char u[4];
    is.read(reinterpret_cast<char*>(u), 4);
    CHECK(u[0] == 3);
    CHECK(u[1] == 0);

    const auto g = read_snapshot(path);
    CHECK(g.n() == 3);
    CHECK(g.time() == 0.125);
    CHECK(g.grid() == f.grid());
    CHECK(g.values() == f.values());

    std::ofstream(dir / "bad.macf") << "MACF2";
    CHECK_THROWS(read_snapshot((dir / "bad.macf").string()));
}

TEST_CASE("run outputs") {
    RunConfig cfg;
    cfg.epsilon = 0.04;
    cfg.grid = 128;
    cfg.radius = 0.3;
    cfg.diag_stride = 4;
    cfg.t_end = 12 * cfg.time_step();
    cfg.out_dir = scratch("out").string();
    const auto res = run(cfg);
    write_run_outputs(cfg, res);
    for (const char* f : {"records.csv", "final.macf", "summary.json", "energy.svg", "radius2.svg"})
        CHECK(fs::exists(fs::path(cfg.out_dir) / f));

    const std::string csv = records_csv(res.records);
    CHECK(csv.rfind("step,time,energy,interface_measure,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4);

    std::ifstream js(fs::path(cfg.out_dir) / "summary.json");
    const auto j = nlohmann::json::parse(js);
    CHECK(j["steps"] == 12);
    CHECK(j["config"]["epsilon"] == 0.04);
    CHECK(j["energy_monotone"] == true);
    CHECK(j["final"]["step"] == 12);

    const auto svg = svg_plot({0, 1, 2}, {1, 0, std::nan("")}, "t", "x", "y");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}
