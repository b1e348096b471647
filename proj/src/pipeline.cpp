#include "porosim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "porosim/analysis.hpp"
#include "porosim/csv_io.hpp"
#include "porosim/oracle.hpp"
#include "porosim/scenarios.hpp"
#include "porosim/solver.hpp"
#include "porosim/svg.hpp"

namespace porosim {

namespace {

namespace fs = std::filesystem;

SolverSettings solver_settings(const RunConfig& cfg) {
    SolverSettings st;
    st.omega = cfg.get_double("solver.omega", 1.5);
    st.max_iters = cfg.get_int("solver.max_iters", 10000);
    st.tol = cfg.get_double("solver.tol", 1e-10);
    st.chi_eps_rel = cfg.get_double("solver.chi_eps_rel", 1e-12);
    st.explicit_wave = cfg.get_bool("solver.explicit_wave", false);
    return st;
}

std::map<std::string, std::string> run_metadata(const Scenario& sc,
                                                const RunConfig& cfg,
                                                const SolveResult& result) {
    const Grid& g = sc.spec.grid;
    const TimeGrid& tg = sc.spec.time_grid;
    std::map<std::string, std::string> meta;
    meta["config.hash"] = cfg.hash();
    meta["scenario"] = sc.name;
    meta["grid.dim"] = std::to_string(g.dim());
    meta["grid.origin.x"] = format_g17(g.origin(0));
    meta["grid.extent.x"] = format_g17(g.extent(0));
    meta["grid.n_cells.x"] = std::to_string(g.n_cells(0));
    if (g.dim() == 2) {
        meta["grid.origin.y"] = format_g17(g.origin(1));
        meta["grid.extent.y"] = format_g17(g.extent(1));
        meta["grid.n_cells.y"] = std::to_string(g.n_cells(1));
    }
    meta["time.t0"] = format_g17(tg.t0);
    meta["time.dt"] = format_g17(tg.dt);
    meta["time.n_steps"] = std::to_string(tg.n_steps);
    meta["constants.rho"] = format_g17(sc.spec.constants.rho);
    meta["constants.t0_tension"] = format_g17(sc.spec.constants.T0);
    meta["constants.t1"] = format_g17(sc.spec.constants.T1);
    meta["constants.c_s"] = format_g17(sc.spec.constants.c_s);
    meta["normalization.space_scale"] = format_g17(sc.spec.normalization.space_scale);
    meta["normalization.time_scale"] = format_g17(sc.spec.normalization.time_scale);
    meta["normalization.u_scale"] = format_g17(sc.spec.normalization.u_scale);
    meta["normalization.f_scale"] = format_g17(sc.spec.normalization.f_scale);
    meta["solver.omega"] = format_g17(cfg.get_double("solver.omega", 1.5));
    meta["solver.max_iters"] = std::to_string(cfg.get_int("solver.max_iters", 10000));
    meta["solver.tol"] = format_g17(cfg.get_double("solver.tol", 1e-10));

    std::string iters, residuals;
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        if (i) {
            iters += ",";
            residuals += ",";
        }
        iters += std::to_string(result.steps[i].iterations);
        residuals += format_g17(result.steps[i].residual);
    }
    meta["steps.iterations"] = iters;
    meta["steps.residuals"] = residuals;

    // admissibility of the obstacle-problem datum on a coarse sample
    if (sc.obstacle_datum) {
        const int nc = std::min(20, g.n_cells(0));
        Grid coarse = g.dim() == 1
                          ? Grid::make1d(g.origin(0), g.extent(0), nc)
                          : Grid::make(2, {g.origin(0), g.origin(1)},
                                       {g.extent(0), g.extent(1)}, {nc, nc});
        TimeGrid ct = TimeGrid::make(tg.t0, tg.t_end() == tg.t0 ? 1.0
                                             : (tg.t_end() - tg.t0) / 8.0,
                                     8);
        ScalarField fs = ScalarField::sample(coarse, ct, sc.obstacle_datum, "f");
        const auto rep = check_admissible(
            fs, cfg.get_double("analysis.alpha", 0.5), 10000,
            static_cast<unsigned long long>(cfg.get_int("seed", 1234)));
        meta["forcing.delta0"] = format_g17(rep.delta0);
        meta["forcing.holder_const"] = format_g17(rep.holder_const);
        meta["forcing.admissible"] = rep.ok ? "true" : "false";
    }
    return meta;
}

double final_slice_linf_error(
    const ScalarField& u, const std::function<double(const SpacePoint&, double)>& exact) {
    const Grid& g = u.grid();
    const int j = u.time_grid().n_steps;
    const double t = u.time_grid().t_end();
    double err = 0.0;
    for (std::size_t n = 0; n < g.node_count(); ++n)
        err = std::max(err, std::abs(u.at(n, j) - exact(g.node_coords(n), t)));
    return err;
}

}  // namespace

int cmd_simulate(const RunConfig& config, const std::string& out_dir, bool dry_run) {
    Scenario sc;
    try {
        sc = build_scenario(config);
    } catch (const std::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return kExitConfig;
    }

    if (dry_run) {
        std::cout << "scenario=" << sc.name << "\n" << config.canonical_text();
        std::cout << "resolved.grid.n_cells.x=" << sc.spec.grid.n_cells(0) << "\n"
                  << "resolved.time.n_steps=" << sc.spec.time_grid.n_steps << "\n"
                  << "resolved.out_dir=" << out_dir << " (nothing written)\n";
        return kExitOk;
    }

    SolveResult result;
    try {
        result = solve_parabolic(sc.spec, solver_settings(config));
    } catch (const SolverError& e) {
        std::cerr << "error: solver: time_index=" << e.time_index
                  << " residual=" << format_g17(e.residual) << " msg=" << e.what()
                  << "\n";
        return kExitFailure;
    }

    try {
        fs::create_directories(out_dir);
        write_field_csv(result.u, out_dir + "/trajectory.csv");
        write_metadata(run_metadata(sc, config, result), out_dir + "/trajectory.meta");
        const double eps = config.get_double("analysis.eps_rel", 1e-12) *
                           std::max(1.0, result.u.max_value());
        const FreeBoundarySet fb = extract_free_boundary(result.u, eps);
        write_overlay_svg(result.u, fb, out_dir + "/overlay.svg");

        std::cout << "wrote " << out_dir << "/trajectory.csv ("
                  << result.u.values().size() << " samples), trajectory.meta, overlay.svg\n";
        std::cout << "free boundary points: " << fb.total_count() << "\n";
        if (sc.exact) {
            const double err = final_slice_linf_error(result.u, sc.exact);
            std::cout << "final-slice Linf error vs reference: " << format_g17(err)
                      << " (h = " << format_g17(sc.spec.grid.h_max()) << ")\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: output: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_analyze(const std::string& trajectory_path, const RunConfig& config,
                const std::string& out_dir) {
    Scenario sc;
    ScalarField u;
    try {
        sc = build_scenario(config);
        u = read_field_csv(trajectory_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        fs::create_directories(out_dir);
        const double eps = config.get_double("analysis.eps_rel", 1e-12) *
                           std::max(1.0, u.max_value());
        FreeBoundarySet fb = extract_free_boundary(u, eps);
        if (fb.empty()) {
            std::ofstream note(out_dir + "/classification.csv");
            note << "x,t,label\n";
            std::cout << "no FB points: {u > eps} has no interface in the domain\n";
            return kExitOk;
        }

        const ScalarField f_field =
            ScalarField::sample(u.grid(), u.time_grid(), sc.obstacle_datum, "f");

        // per-point diagnostics on a bounded subset, newest slices first
        const std::size_t max_points =
            static_cast<std::size_t>(config.get_int("analysis.max_points", 48));
        std::vector<FbPoint> pts = fb.all();
        std::stable_sort(pts.begin(), pts.end(),
                         [](const FbPoint& a, const FbPoint& b) {
                             return a.t_idx > b.t_idx;
                         });
        if (pts.size() > max_points) {
            std::vector<FbPoint> sub;
            const double stride = static_cast<double>(pts.size()) / max_points;
            for (std::size_t k = 0; k < max_points; ++k)
                sub.push_back(pts[static_cast<std::size_t>(k * stride)]);
            pts.swap(sub);
        }

        WeissSettings quad;
        quad.n_xi = config.get_int("analysis.quad_n_xi", 64);
        quad.n_sigma = config.get_int("analysis.quad_n_sigma", 32);
        double a_n = 0.0;  // computed lazily

        std::vector<FbReportRow> rows;
        std::vector<WeissValue> sweeps;
        std::vector<BlowupFit> fits;
        for (auto& p : pts) {
            FbReportRow row;
            row.point = p;
            try {
                const auto growth =
                    quadratic_growth_sweep(u, p.x, p.t, sc.rho_values, eps);
                row.exponent = growth.fitted_exponent;
                row.C_upper = growth.fitted_C_upper;
                const auto nondeg =
                    nondegeneracy_sweep(u, p.x, p.t, sc.rho_values, eps);
                row.c_lower = nondeg.fitted_c_lower;
            } catch (const std::exception&) {
                // cylinders spill outside the domain for this point; leave NaN
            }
            try {
                row.M_bound = derivative_bounds(u, p.x, p.t,
                                                sc.rho_values[sc.rho_values.size() / 2],
                                                eps);
            } catch (const std::exception&) {
            }

            const double f_here = sc.obstacle_datum(p.x, p.t);
            if (f_here > 0.0) {
                // clip the tau sweep to radii whose window fits this point
                std::vector<double> taus;
                for (double tau : sc.tau_values) {
                    bool fits = p.t - 4.0 * tau * tau >= u.time_grid().t0;
                    for (int a = 0; a < u.grid().dim(); ++a)
                        fits = fits && p.x[a] - tau >= u.grid().origin(a) &&
                               p.x[a] + tau <=
                                   u.grid().origin(a) + u.grid().extent(a);
                    if (fits) taus.push_back(tau);
                }
                try {
                    if (taus.size() < 3)
                        throw std::invalid_argument("tau sweep infeasible here");
                    ClassifySettings cls;
                    cls.tau_values = taus;
                    cls.theta = sc.theta;
                    cls.quad = quad;
                    if (a_n == 0.0) a_n = compute_A_n(u.grid().dim(), quad);
                    cls.A_n = a_n;
                    const auto res = classify_point(u, f_field, p.x, p.t, cls);
                    row.point.label = res.label;
                    row.weiss_ratio = res.weiss.ratio;
                    p.label = res.label;
                    p.weiss_ratio = res.weiss.ratio;
                    sweeps.push_back(res.weiss);
                } catch (const std::exception&) {
                }
                try {
                    const double lambda =
                        0.5 * std::min(1.0, sc.rho_values.front()) * std::sqrt(f_here);
                    const ScalarField zoom =
                        rescale_blowup(u, p.x, p.t, lambda, f_here, 32, 32);
                    const BlowupFit fit = fit_blowup(zoom);
                    fits.push_back(fit);
                    row.blowup_kind = fit.kind == BlowupFit::Kind::half_space
                                          ? "half_space"
                                          : fit.kind == BlowupFit::Kind::polynomial
                                                ? "polynomial"
                                                : "unresolved";
                } catch (const std::exception&) {
                    fits.push_back(BlowupFit{});
                }
            } else {
                fits.push_back(BlowupFit{});
            }
            rows.push_back(row);
        }

        const int dim = u.grid().dim();
        write_regularity_csv(rows, dim, out_dir + "/regularity.csv");
        write_fb_report_csv(rows, dim, out_dir + "/classification.csv");
        write_weiss_sweep_csv(sweeps, dim, out_dir + "/weiss.csv");

        // overlay with classified labels where available
        FreeBoundarySet labeled = fb;
        for (auto& bucket : labeled.per_slice)
            for (auto& q : bucket)
                for (const auto& p : pts)
                    if (p.t_idx == q.t_idx && std::abs(p.x[0] - q.x[0]) < 1e-12 &&
                        std::abs(p.x[1] - q.x[1]) < 1e-12)
                        q.label = p.label;
        write_overlay_svg(u, labeled, out_dir + "/overlay.svg");

        // structural summary of the singular set
        FreeBoundarySet analyzed;
        analyzed.per_slice.resize(u.time_grid().n_times());
        for (const auto& p : pts) analyzed.per_slice[p.t_idx].push_back(p);
        const auto structure =
            singular_structure(analyzed, fits, u.grid().h_max());
        std::cout << "analyzed " << rows.size() << " of " << fb.total_count()
                  << " FB points; singular: " << structure.singular_points << "\n";
        for (const auto& grp : structure.groups) {
            std::size_t isolated =
                std::count(grp.isolated.begin(), grp.isolated.end(), true);
            std::cout << "  S(" << grp.kern_dim << "): " << grp.points.size()
                      << " points, " << isolated << " isolated\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: analyze: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

namespace {

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

CheckResult check_exact_solutions() {
    // closed-form profiles satisfy their defining relation on {u > 0}
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    double worst = 0.0;
    const double fd = 0.0625;  // exact stencil for the polynomial pieces

    const auto hs = exact_half_space({1.0, 0.0}, 1);
    for (int k = 0; k < 100; ++k) {
        const double x = 0.2 + 0.6 * std::abs(coord(rng));  // stay off the kink
        const double lap = (hs.u({x - fd, 0}, 0) - 2 * hs.u({x, 0}, 0) +
                            hs.u({x + fd, 0}, 0)) /
                           (fd * fd);
        worst = std::max(worst, std::abs(lap - hs.f({x, 0}, 0)));
    }

    const auto poly = exact_polynomial(-0.5, {0.25, 0.0, 0.0}, 1);
    for (int k = 0; k < 100; ++k) {
        const double x = coord(rng), t = -std::abs(coord(rng));
        const double lap =
            (poly.u({x - fd, 0}, t) - 2 * poly.u({x, 0}, t) + poly.u({x + fd, 0}, t)) /
            (fd * fd);
        const double dudt =
            (poly.u({x, 0}, t + fd) - poly.u({x, 0}, t - fd)) / (2 * fd);
        worst = std::max(worst, std::abs(lap - dudt - poly.f({x, 0}, t)));
    }

    const auto radial = exact_radial_stationary(0.4);
    double worst_radial = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double r = 0.5 + 0.4 * std::abs(coord(rng));
        const double closed = radial_stationary_profile(r, 0.4);
        worst_radial = std::max(worst_radial,
                                std::abs(radial.u({r, 0.0}, 0.0) - closed));
    }

    const bool pass = worst < 1e-12 && worst_radial < 1e-8;
    return {"exact-solutions",
            pass,
            "pde residual " + format_g17(worst) + ", radial vs closed form " +
                format_g17(worst_radial)};
}

CheckResult check_lcp_oracle() {
    const bool fault = std::getenv("POROSIM_FAULT_STENCIL") != nullptr;
    double worst = 0.0;
    for (int k = 0; k < 40; ++k) {
        const int n = 1 + static_cast<int>(k % 12);
        LcpSystem sys = random_spd_lcp(7000 + k, n);
        const auto exact = brute_force_lcp(sys);
        LcpSystem solved = sys;
        if (fault && !solved.off[0].empty())
            solved.off[0][0].second = -solved.off[0][0].second;  // corrupted stencil
        const auto psor = psor_solve(solved, std::vector<double>(n, 0.0),
                                     PsorSettings{1.5, 20000, 1e-13});
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(psor.u[i] - exact[i]));
    }
    return {"lcp", worst < 1e-10,
            "max |psor - enumeration| = " + format_g17(worst) +
                (fault ? " (stencil fault injected)" : "")};
}

CheckResult check_an_stability() {
    WeissSettings coarse{64, 32}, fine{128, 64};
    const double a1 = compute_A_n(1, coarse);
    const double a1f = compute_A_n(1, fine);
    const double drift = std::abs(a1f - a1) / a1f;

    // rotation invariance of the 2D half-space energy on a shared grid
    Grid g = Grid::make(2, {-0.75, -0.75}, {1.5, 1.5}, {192, 192});
    TimeGrid tg = TimeGrid::make(-0.3, 0.05, 6);
    auto make_dir_field = [&](int axis) {
        return ScalarField::sample(
            g, tg,
            [axis](const SpacePoint& x, double) {
                const double p = x[axis];
                return p > 0.0 ? 0.5 * p * p : 0.0;
            },
            "u0");
    };
    ScalarField ux = make_dir_field(0), uy = make_dir_field(1);
    ScalarField f1 = ScalarField::sample(
        g, tg, [](const SpacePoint&, double) { return 1.0; }, "f");
    const double wx = weiss_energy(ux, f1, {0, 0}, 0.0, 0.2, coarse);
    const double wy = weiss_energy(uy, f1, {0, 0}, 0.0, 0.2, coarse);
    const double rot = std::abs(wx - wy) / std::max(wx, wy);

    const bool pass = drift < 1e-3 && rot < 1e-10;
    return {"an-stability", pass,
            "A_1 = " + format_g17(a1f) + ", refinement drift " + format_g17(drift) +
                ", rotation gap " + format_g17(rot)};
}

CheckResult check_quasistatic() {
    RunConfig cfg = RunConfig::defaults_for("traveling-wave-1d");
    cfg.set("grid.n_cells", "100");
    cfg.set("time.dt", "0.004");
    cfg.set("time.n_steps", "150");
    std::vector<double> gaps;
    for (double t1 : {2.0, 1.0, 0.5, 0.25}) {
        cfg.set("constants.t1", format_g17(t1));
        const Scenario sc = build_scenario(cfg);
        const auto para = solve_parabolic(sc.spec);
        const auto wave = solve_damped_wave(sc.spec);
        double gap = 0.0;
        for (std::size_t i = 0; i < para.u.values().size(); ++i)
            gap = std::max(gap,
                           std::abs(para.u.values()[i] - wave.u.values()[i]));
        gaps.push_back(gap);
    }
    bool monotone = true;
    std::string seq;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (i && !(gaps[i] < gaps[i - 1])) monotone = false;
        seq += format_g17(gaps[i]) + " ";
    }
    return {"quasistatic", monotone, "Linf gaps over decreasing T1: " + seq};
}

}  // namespace

int cmd_validate(const std::string& filter) {
    std::vector<CheckResult> results;
    auto want = [&](const std::string& name) {
        return filter.empty() || name.find(filter) != std::string::npos;
    };
    try {
        if (want("exact-solutions")) results.push_back(check_exact_solutions());
        if (want("lcp")) results.push_back(check_lcp_oracle());
        if (want("an-stability")) results.push_back(check_an_stability());
        if (want("quasistatic")) results.push_back(check_quasistatic());
    } catch (const std::exception& e) {
        std::cerr << "error: validate: " << e.what() << "\n";
        return kExitFailure;
    }
    if (results.empty()) {
        std::cerr << "error: no validation check matches filter '" << filter << "'\n";
        return kExitConfig;
    }
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail
                  << "\n";
        all = all && r.pass;
    }
    return all ? kExitOk : kExitFailure;
}

int cmd_scale_report(const RunConfig& config, bool json) {
    ChargeScaleParams p;
    p.charges_per_area = config.get_double("charge.charges_per_area", 1e7);
    p.dimple_area = config.get_double("charge.dimple_area", 100.0);
    p.energy_per_molecule = config.get_double("charge.energy_per_molecule", 1e-19);
    p.characteristic_length =
        config.get_double("charge.characteristic_length", 1e-8);
    p.dimple_mass = config.get_double("charge.dimple_mass", 1e-21);
    ScaleReport r;
    try {
        r = scale_report(p);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    if (json) {
        std::cout << "{\"carriers\": " << format_g17(r.carriers)
                  << ", \"per_molecule_force_N\": " << format_g17(r.per_molecule_force)
                  << ", \"total_force_N\": " << format_g17(r.total_force)
                  << ", \"gravity_force_N\": " << format_g17(r.gravity_force) << "}\n";
    } else {
        std::cout << "charge carriers over the dimple top : " << format_g17(r.carriers)
                  << "\n"
                  << "force per charged molecule [N]      : "
                  << format_g17(r.per_molecule_force) << "\n"
                  << "total electric force [N]            : " << format_g17(r.total_force)
                  << "\n"
                  << "gravity on the dimple mass [N]      : "
                  << format_g17(r.gravity_force) << "\n";
    }
    return kExitOk;
}

int cmd_sweep(const RunConfig& config, const std::string& out_dir) {
    const std::string key = config.get_str("sweep.key", "");
    if (key.empty()) {
        std::cerr << "error: sweep needs sweep.key and sweep.values\n";
        return kExitConfig;
    }
    std::vector<double> values;
    try {
        values = config.get_list("sweep.values", {});
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    int max_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("POROSIM_THREADS"))
        max_threads = std::max(1, std::atoi(env));
    max_threads = std::max(1, std::min(max_threads, static_cast<int>(values.size())));

    std::atomic<int> next{0};
    std::atomic<int> worst{kExitOk};
    auto worker = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= static_cast<int>(values.size())) return;
            RunConfig cfg = config;
            cfg.set(key, format_g17(values[i]));
            const std::string dir = out_dir + "/sweep_" + std::to_string(i);
            const int rc = cmd_simulate(cfg, dir, false);
            int cur = worst.load();
            while (rc > cur && !worst.compare_exchange_weak(cur, rc)) {
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 0; k < max_threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return worst.load();
}

}  // namespace porosim
