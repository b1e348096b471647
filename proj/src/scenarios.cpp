#include "porosim/scenarios.hpp"

#include <cmath>
#include <stdexcept>

#include "porosim/csv_io.hpp"

namespace porosim {

namespace {

// the free boundary sits 91/150 from the left edge: at h = 1/50, 1/100 and
// 1/200 the node offset cycles 1/3, 2/3, 1/3, keeping it off the nodes with
// matching alignment at the outer resolutions of the convergence sweep
constexpr double kStationaryLeft = -91.0 / 150.0;

ObstacleProblemSpec base_spec(const RunConfig& cfg, int dim, SpacePoint origin,
                              SpacePoint extent, int n_cells_default,
                              double dt_default, int n_steps_default) {
    ObstacleProblemSpec spec;
    const int nc = cfg.get_int("grid.n_cells", n_cells_default);
    const int ncy = cfg.get_int("grid.n_cells_y", nc);
    spec.grid = dim == 1 ? Grid::make1d(origin[0], extent[0], nc)
                         : Grid::make(2, origin, extent, {nc, ncy});
    spec.time_grid = TimeGrid::make(0.0, cfg.get_double("time.dt", dt_default),
                                    cfg.get_int("time.n_steps", n_steps_default));
    spec.constants = PhysicalConstants::make(cfg.get_double("constants.rho", 1.0),
                                             cfg.get_double("constants.t0_tension", 1.0),
                                             cfg.get_double("constants.t1", 2.0));
    return spec;
}

WaveForcingParams wave_params(const RunConfig& cfg) {
    WaveForcingParams p;
    const auto bhat = cfg.get_list("wave.b_hat", {0.0, 1.4, 0.0});
    const auto bdc = cfg.get_list("wave.b_dc", {0.0, 4.0, 0.0});
    const auto k = cfg.get_list("wave.k", {2.0 * M_PI, 0.0, 0.0});
    const auto e0 = cfg.get_list("wave.e0", {0.0, 0.0, 0.0});
    p.b_hat = {bhat[0], bhat[1], bhat[2]};
    p.b_dc = {bdc[0], bdc[1], bdc[2]};
    p.k_vec = {k[0], k[1], k[2]};
    p.e0 = {e0[0], e0[1], e0[2]};
    p.v = cfg.get_double("wave.v", 0.25);
    p.q = cfg.get_double("wave.q", 1.0);
    p.gamma = cfg.get_double("wave.gamma", 0.0);
    p.f_osc = cfg.get_double("wave.f_osc", p.k_vec.norm() * p.v / (2.0 * M_PI));
    return p;
}

ForcingSpec scenario_wave_forcing(const RunConfig& cfg) {
    const auto normal = cfg.get_list("wave.normal", {0.0, 0.0, 1.0});
    return wave_forcing(wave_params(cfg), {normal[0], normal[1], normal[2]},
                        cfg.get_double("wave.reference_area", 1.0));
}

Scenario make_stationary_1d(const RunConfig& cfg) {
    Scenario s;
    s.name = "stationary-1d";
    s.spec = base_spec(cfg, 1, {kStationaryLeft, 0.0}, {2.0, 0.0}, 200, 0.005, 800);
    s.spec.forcing = constant_forcing(-1.0);  // obstacle load f = 1
    auto exact = [](const SpacePoint& x, double) {
        return x[0] > 0.0 ? 0.5 * x[0] * x[0] : 0.0;
    };
    s.spec.boundary = BoundarySpec::prescribed(exact);
    const Grid& g = s.spec.grid;
    s.spec.initial_u.resize(g.node_count());
    for (std::size_t n = 0; n < g.node_count(); ++n)
        s.spec.initial_u[n] = exact(g.node_coords(n), 0.0);
    s.exact = exact;
    s.obstacle_datum = [](const SpacePoint&, double) { return 1.0; };
    s.rho_values = cfg.get_list("analysis.rho_values",
                                {0.30, 0.26, 0.22, 0.185, 0.155, 0.13});
    s.tau_values = cfg.get_list("analysis.tau_values",
                                {0.30, 0.2121320343559643, 0.15, 0.1060660171779821});
    return s;
}

Scenario make_radial_2d(const RunConfig& cfg) {
    Scenario s;
    s.name = "radial-2d";
    s.spec = base_spec(cfg, 2, {-1.0, -1.0}, {2.0, 2.0}, 100, 0.005, 100);
    s.spec.forcing = constant_forcing(-1.0);
    const double r0 = 0.4;
    auto exact = [r0](const SpacePoint& x, double) {
        return radial_stationary_profile(std::hypot(x[0], x[1]), r0);
    };
    s.spec.boundary = BoundarySpec::prescribed(exact);
    const Grid& g = s.spec.grid;
    s.spec.initial_u.resize(g.node_count());
    for (std::size_t n = 0; n < g.node_count(); ++n)
        s.spec.initial_u[n] = exact(g.node_coords(n), 0.0);
    s.exact = exact;
    s.obstacle_datum = [](const SpacePoint&, double) { return 1.0; };
    s.rho_values =
        cfg.get_list("analysis.rho_values", {0.24, 0.205, 0.175, 0.15, 0.125, 0.105});
    s.tau_values = cfg.get_list("analysis.tau_values",
                                {0.24, 0.1697056274847714, 0.12, 0.0848528137423857});
    return s;
}

Scenario make_traveling_wave_1d(const RunConfig& cfg) {
    Scenario s;
    s.name = "traveling-wave-1d";
    s.spec = base_spec(cfg, 1, {-1.0, 0.0}, {2.0, 0.0}, 200, 0.002, 400);
    s.spec.forcing = scenario_wave_forcing(cfg);
    s.spec.boundary = BoundarySpec::clamped();
    s.obstacle_datum = [forcing = s.spec.forcing](const SpacePoint& x, double t) {
        return -forcing(x, t);
    };
    s.rho_values =
        cfg.get_list("analysis.rho_values", {0.30, 0.26, 0.22, 0.185, 0.155, 0.13});
    s.tau_values = cfg.get_list("analysis.tau_values",
                                {0.30, 0.2121320343559643, 0.15, 0.1060660171779821});
    return s;
}

Scenario make_flicker_1d(const RunConfig& cfg) {
    // traveling wave whose source is switched off mid-run
    Scenario s = make_traveling_wave_1d(cfg);
    s.name = "flicker-1d";
    const double t_end = s.spec.time_grid.t_end();
    const double cutoff = cfg.get_double("forcing.cutoff_time", 0.5 * t_end);
    ForcingSpec wave = s.spec.forcing;
    ScalarField table = ScalarField::sample(
        s.spec.grid, s.spec.time_grid,
        [&wave, cutoff](const SpacePoint& x, double t) {
            return t < cutoff ? wave(x, t) : 0.0;
        },
        "f");
    s.spec.forcing = tabulated_forcing(std::move(table));
    s.obstacle_datum = [forcing = s.spec.forcing](const SpacePoint& x, double t) {
        return -forcing(x, t);
    };
    return s;
}

Scenario make_two_bump_1d(const RunConfig& cfg) {
    Scenario s;
    s.name = "two-bump-collision-1d";
    s.spec = base_spec(cfg, 1, {-1.0, 0.0}, {2.0, 0.0}, 200, 0.001, 1200);
    s.spec.forcing = constant_forcing(-1.0);
    const double a = 0.45;
    const double b0 = 0.5 * (1.0 - a) * (1.0 - a);
    const double b1 = 0.62;
    const double t_end = s.spec.time_grid.t_end();
    s.spec.boundary = BoundarySpec::prescribed(
        [b0, b1, t_end](const SpacePoint&, double t) {
            return b0 + (b1 - b0) * std::min(1.0, t / t_end);
        });
    const Grid& g = s.spec.grid;
    s.spec.initial_u.resize(g.node_count());
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const double d = std::abs(g.node_coords(n)[0]) - a;
        s.spec.initial_u[n] = d > 0.0 ? 0.5 * d * d : 0.0;
    }
    s.obstacle_datum = [](const SpacePoint&, double) { return 1.0; };
    s.rho_values =
        cfg.get_list("analysis.rho_values", {0.30, 0.26, 0.22, 0.185, 0.155, 0.13});
    s.tau_values = cfg.get_list("analysis.tau_values",
                                {0.28, 0.1979898987322333, 0.14, 0.0989949493661167});
    return s;
}

}  // namespace

double radial_stationary_profile(double r, double r0) {
    if (r <= r0) return 0.0;
    return 0.25 * (r * r - r0 * r0) - 0.5 * r0 * r0 * std::log(r / r0);
}

std::vector<std::string> scenario_names() {
    return {"stationary-1d", "radial-2d", "traveling-wave-1d", "flicker-1d",
            "two-bump-collision-1d"};
}

Scenario build_scenario(const RunConfig& cfg) {
    cfg.validate();
    const std::string name = cfg.get_str("scenario", "");
    Scenario s;
    if (name == "stationary-1d")
        s = make_stationary_1d(cfg);
    else if (name == "radial-2d")
        s = make_radial_2d(cfg);
    else if (name == "traveling-wave-1d")
        s = make_traveling_wave_1d(cfg);
    else if (name == "flicker-1d")
        s = make_flicker_1d(cfg);
    else if (name == "two-bump-collision-1d")
        s = make_two_bump_1d(cfg);
    else {
        std::string known;
        for (const auto& n : scenario_names()) known += n + " ";
        throw std::runtime_error("unknown scenario '" + name + "'; bundled: " + known);
    }
    s.theta = cfg.get_double("analysis.theta", 0.25);

    if (cfg.has("forcing.table")) {
        s.spec.forcing = tabulated_forcing(read_field_csv(cfg.get_str("forcing.table", "")));
        s.obstacle_datum = [forcing = s.spec.forcing](const SpacePoint& x, double t) {
            return -forcing(x, t);
        };
    }
    if (cfg.has("initial.table")) {
        const ScalarField init = read_field_csv(cfg.get_str("initial.table", ""));
        const Grid& g = s.spec.grid;
        s.spec.initial_u.resize(g.node_count());
        const double t0 = init.time_grid().t0;
        for (std::size_t n = 0; n < g.node_count(); ++n)
            s.spec.initial_u[n] = std::max(0.0, init.interpolate(g.node_coords(n), t0));
    }
    s.spec.validate();
    return s;
}

}  // namespace porosim
