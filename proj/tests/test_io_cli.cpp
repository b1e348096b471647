#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "porosim/config.hpp"
#include "porosim/csv_io.hpp"
#include "porosim/pipeline.hpp"
#include "porosim/scenarios.hpp"
#include "porosim/solver.hpp"

using namespace porosim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("porosim_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = RunConfig::parse_string(
        "# comment\n"
        "scenario = stationary-1d\n"
        "solver.omega=1.7   # trailing comment\n"
        "analysis.rho_values = 0.3, 0.2, 0.1\n");
    CHECK(cfg.get_str("scenario", "") == "stationary-1d");
    CHECK(cfg.get_double("solver.omega", 0.0) == doctest::Approx(1.7));
    const auto rhos = cfg.get_list("analysis.rho_values", {});
    REQUIRE(rhos.size() == 3);
    CHECK(rhos[1] == doctest::Approx(0.2));

    CHECK_THROWS(RunConfig::parse_string("not a key value line\n"));
    CHECK_THROWS(RunConfig::parse_string("nonsense.key = 1\n"));
    CHECK_THROWS(RunConfig::parse_string("solver.omega = fast\n").get_double("solver.omega", 0.0));

    // range validation
    auto bad = RunConfig::parse_string("scenario=stationary-1d\nconstants.t1=-2\n");
    CHECK_THROWS(bad.validate());
    auto bad_omega = RunConfig::parse_string("solver.omega=2.5\n");
    CHECK_THROWS(bad_omega.validate());

    // hash is stable and order independent
    const auto a = RunConfig::parse_string("scenario=radial-2d\nsolver.omega=1.5\n");
    const auto b = RunConfig::parse_string("solver.omega=1.5\nscenario=radial-2d\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != RunConfig::parse_string("scenario=radial-2d\n").hash());
}

TEST_CASE("field csv round trip is bit exact") {
    const Grid g = Grid::make1d(-0.25, 1.0, 8);
    const TimeGrid tg = TimeGrid::make(0.0, 0.125, 4);
    const ScalarField f = ScalarField::sample(
        g, tg, [](const SpacePoint& x, double t) {
            return std::sin(13.0 * x[0]) * std::exp(-t) / 3.0;
        });
    const std::string text = field_csv_string(f);
    const ScalarField back = parse_field_csv(text, "<mem>");
    CHECK(back.grid() == g);
    CHECK(back.time_grid() == tg);
    CHECK(back.values() == f.values());  // %.17g reproduces doubles exactly

    // 2D variant
    const Grid g2 = Grid::make(2, {0.0, -1.0}, {1.0, 2.0}, {4, 6});
    const ScalarField f2 = ScalarField::sample(
        g2, tg, [](const SpacePoint& x, double t) { return x[0] - 2 * x[1] + t; });
    const ScalarField back2 = parse_field_csv(field_csv_string(f2), "<mem>");
    CHECK(back2.grid() == g2);
    CHECK(back2.values() == f2.values());
}

TEST_CASE("malformed csv reports the line number") {
    try {
        parse_field_csv("x,t,value\n0,0,1\n0.5,zero,1\n", "bad.csv");
        FAIL("expected parse error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("bad.csv:3") != std::string::npos);
    }
    CHECK_THROWS(parse_field_csv("a,b\n", "bad.csv"));
    CHECK_THROWS(parse_field_csv("x,t,value\n0,0,1\n", "bad.csv"));  // too few rows
}

TEST_CASE("metadata sidecar round trip") {
    TempDir tmp;
    const std::string path = tmp.str() + "/run.meta";
    std::map<std::string, std::string> meta{{"scenario", "stationary-1d"},
                                            {"config.hash", "abc123"},
                                            {"time.dt", "0.005"}};
    write_metadata(meta, path);
    CHECK(read_metadata(path) == meta);
}

TEST_CASE("simulate writes outputs, prints error, honors dry-run") {
    TempDir tmp;
    RunConfig cfg = RunConfig::defaults_for("stationary-1d");
    cfg.set("grid.n_cells", "100");
    cfg.set("time.dt", "0.01");
    cfg.set("time.n_steps", "300");

    CHECK(cmd_simulate(cfg, tmp.str() + "/dry", true) == kExitOk);
    CHECK_FALSE(fs::exists(tmp.str() + "/dry/trajectory.csv"));

    CHECK(cmd_simulate(cfg, tmp.str() + "/run", false) == kExitOk);
    CHECK(fs::exists(tmp.str() + "/run/trajectory.csv"));
    CHECK(fs::exists(tmp.str() + "/run/trajectory.meta"));
    CHECK(fs::exists(tmp.str() + "/run/overlay.svg"));

    const auto meta = read_metadata(tmp.str() + "/run/trajectory.meta");
    CHECK(meta.at("scenario") == "stationary-1d");
    CHECK(meta.at("config.hash") == cfg.hash());
    CHECK(meta.at("forcing.admissible") == "true");

    // negative relaxation time is rejected before any computation
    RunConfig bad = cfg;
    bad.set("constants.t1", "-1");
    CHECK(cmd_simulate(bad, tmp.str() + "/bad", false) == kExitConfig);
    CHECK_FALSE(fs::exists(tmp.str() + "/bad/trajectory.csv"));

    // a stalled solve exits 1 and writes nothing
    RunConfig stall = cfg;
    stall.set("solver.max_iters", "1");
    CHECK(cmd_simulate(stall, tmp.str() + "/stall", false) == kExitFailure);
    CHECK_FALSE(fs::exists(tmp.str() + "/stall/trajectory.csv"));
}

TEST_CASE("determinism: identical configs give byte-identical csv") {
    TempDir tmp;
    RunConfig cfg = RunConfig::defaults_for("traveling-wave-1d");
    cfg.set("grid.n_cells", "60");
    cfg.set("time.dt", "0.005");
    cfg.set("time.n_steps", "80");
    REQUIRE(cmd_simulate(cfg, tmp.str() + "/a", false) == kExitOk);
    REQUIRE(cmd_simulate(cfg, tmp.str() + "/b", false) == kExitOk);
    CHECK(slurp(tmp.str() + "/a/trajectory.csv") ==
          slurp(tmp.str() + "/b/trajectory.csv"));
    CHECK(slurp(tmp.str() + "/a/trajectory.meta") ==
          slurp(tmp.str() + "/b/trajectory.meta"));
}

TEST_CASE("analyze labels the stationary run regular") {
    TempDir tmp;
    RunConfig cfg = RunConfig::defaults_for("stationary-1d");
    cfg.set("grid.n_cells", "200");
    cfg.set("time.dt", "0.01");
    cfg.set("time.n_steps", "400");
    cfg.set("analysis.max_points", "6");
    cfg.set("analysis.quad_n_xi", "48");
    cfg.set("analysis.quad_n_sigma", "24");
    REQUIRE(cmd_simulate(cfg, tmp.str(), false) == kExitOk);
    REQUIRE(cmd_analyze(tmp.str() + "/trajectory.csv", cfg, tmp.str()) == kExitOk);

    CHECK(fs::exists(tmp.str() + "/regularity.csv"));
    CHECK(fs::exists(tmp.str() + "/weiss.csv"));
    const std::string cls = slurp(tmp.str() + "/classification.csv");
    CHECK(cls.find("regular") != std::string::npos);
    CHECK(cls.find("singular") == std::string::npos);

    // exponents within the quadratic-growth band
    std::istringstream reg(slurp(tmp.str() + "/regularity.csv"));
    std::string line;
    std::getline(reg, line);  // header
    int checked = 0;
    while (std::getline(reg, line)) {
        std::stringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');  // x
        std::getline(ss, tok, ',');  // t
        std::getline(ss, tok, ',');  // exponent
        if (tok == "nan" || tok.empty()) continue;
        const double expnt = std::stod(tok);
        CHECK(expnt >= 1.8);
        CHECK(expnt <= 2.2);
        ++checked;
    }
    CHECK(checked >= 1);
}

TEST_CASE("analyze labels the synthetic parabola singular") {
    TempDir tmp;
    // synthetic x^2/2 trajectory written by hand, analyzed via the stationary
    // scenario so f = 1; the vertex must be a node so the contact set is seen
    const Grid g = Grid::make1d(-0.6, 2.0, 400);
    const TimeGrid tg = TimeGrid::make(0.0, 0.01, 60);
    const ScalarField u = ScalarField::sample(
        g, tg, [](const SpacePoint& x, double) { return 0.5 * x[0] * x[0]; });
    write_field_csv(u, tmp.str() + "/synthetic.csv");

    RunConfig cfg = RunConfig::defaults_for("stationary-1d");
    cfg.set("analysis.max_points", "2");
    cfg.set("analysis.tau_values", "0.24,0.17,0.12");
    cfg.set("analysis.quad_n_xi", "48");
    cfg.set("analysis.quad_n_sigma", "24");
    REQUIRE(cmd_analyze(tmp.str() + "/synthetic.csv", cfg, tmp.str()) == kExitOk);
    const std::string cls = slurp(tmp.str() + "/classification.csv");
    CHECK(cls.find("singular") != std::string::npos);
}

TEST_CASE("analyze of an empty free boundary notes it and exits 0") {
    TempDir tmp;
    const Grid g = Grid::make1d(0.0, 1.0, 20);
    const TimeGrid tg = TimeGrid::make(0.0, 0.1, 3);
    ScalarField u(g, tg);
    std::fill(u.values().begin(), u.values().end(), 2.0);
    write_field_csv(u, tmp.str() + "/flat.csv");
    RunConfig cfg = RunConfig::defaults_for("stationary-1d");
    CHECK(cmd_analyze(tmp.str() + "/flat.csv", cfg, tmp.str()) == kExitOk);
}

TEST_CASE("scale report json and overrides") {
    RunConfig cfg;
    CHECK(cmd_scale_report(cfg, true) == kExitOk);
    cfg.set("charge.charges_per_area", "0");
    CHECK(cmd_scale_report(cfg, false) == kExitOk);
}

TEST_CASE("validate: lcp check catches an injected stencil fault") {
    CHECK(cmd_validate("lcp") == kExitOk);
#ifndef _WIN32
    setenv("POROSIM_FAULT_STENCIL", "1", 1);
    CHECK(cmd_validate("lcp") == kExitFailure);
    unsetenv("POROSIM_FAULT_STENCIL");
#endif
    CHECK(cmd_validate("no-such-check") == kExitConfig);
}

TEST_CASE("sweep runs each value into its own directory") {
    TempDir tmp;
    RunConfig cfg = RunConfig::defaults_for("stationary-1d");
    cfg.set("grid.n_cells", "60");
    cfg.set("time.dt", "0.02");
    cfg.set("time.n_steps", "50");
    cfg.set("sweep.key", "constants.t1");
    cfg.set("sweep.values", "2.0,1.0");
    CHECK(cmd_sweep(cfg, tmp.str()) == kExitOk);
    CHECK(fs::exists(tmp.str() + "/sweep_0/trajectory.csv"));
    CHECK(fs::exists(tmp.str() + "/sweep_1/trajectory.csv"));
    const auto meta0 = read_metadata(tmp.str() + "/sweep_0/trajectory.meta");
    const auto meta1 = read_metadata(tmp.str() + "/sweep_1/trajectory.meta");
    CHECK(meta0.at("constants.t1") != meta1.at("constants.t1"));
}

TEST_CASE("initial.table seeds the run from a stored field") {
    TempDir tmp;
    // store a bump as the initial condition
    const Grid g = Grid::make1d(-1.0, 2.0, 80);
    const TimeGrid tg = TimeGrid::make(0.0, 1.0, 1);
    const ScalarField init = ScalarField::sample(
        g, tg, [](const SpacePoint& x, double) {
            return std::max(0.0, 0.2 - x[0] * x[0]);
        });
    const std::string path = tmp.str() + "/init.csv";
    write_field_csv(init, path);

    RunConfig cfg = RunConfig::defaults_for("traveling-wave-1d");
    cfg.set("grid.n_cells", "50");
    cfg.set("time.dt", "0.01");
    cfg.set("time.n_steps", "20");
    cfg.set("initial.table", path);
    const Scenario sc = build_scenario(cfg);
    REQUIRE(sc.spec.initial_u.size() == sc.spec.grid.node_count());
    const std::size_t mid = sc.spec.grid.node_index(25);
    CHECK(sc.spec.initial_u[mid] == doctest::Approx(0.2).epsilon(1e-6));

    // a missing path is a config error
    RunConfig bad = cfg;
    bad.set("initial.table", tmp.str() + "/nope.csv");
    CHECK_THROWS(bad.validate());
}
