#include "porosim/solver.hpp"

#include <algorithm>
#include <cmath>

namespace porosim {

PhysicalConstants PhysicalConstants::make(double rho, double T0, double T1) {
    PhysicalConstants c;
    c.rho = rho;
    c.T0 = T0;
    c.T1 = T1;
    c.c_s = std::sqrt(T0 / rho);
    c.validate();
    return c;
}

void PhysicalConstants::validate() const {
    if (!(rho > 0.0) || !(T0 > 0.0) || !(T1 > 0.0))
        throw std::invalid_argument("PhysicalConstants: rho, T0, T1 must be positive");
    if (std::abs(c_s * c_s - T0 / rho) > 1e-12 * (T0 / rho))
        throw std::invalid_argument("PhysicalConstants: c_s^2 != T0/rho");
}

BoundarySpec BoundarySpec::clamped() { return BoundarySpec{}; }

BoundarySpec BoundarySpec::prescribed(
    std::function<double(const SpacePoint&, double)> fn) {
    BoundarySpec b;
    b.kind = Kind::prescribed_trace;
    b.trace = std::move(fn);
    return b;
}

double BoundarySpec::value(const SpacePoint& x, double t) const {
    if (kind == Kind::clamped_zero) return 0.0;
    const double v = trace(x, t);
    if (v < 0.0)
        throw std::invalid_argument("BoundarySpec: boundary data must be >= 0");
    return v;
}

void ObstacleProblemSpec::validate() const {
    constants.validate();
    forcing.validate();
    if (!initial_u.empty()) {
        if (initial_u.size() != grid.node_count())
            throw std::invalid_argument("ObstacleProblemSpec: initial_u size mismatch");
        for (double v : initial_u)
            if (v < 0.0)
                throw std::invalid_argument("ObstacleProblemSpec: initial_u must be >= 0");
    }
}

std::vector<double> ObstacleProblemSpec::initial_slice() const {
    if (!initial_u.empty()) return initial_u;
    return std::vector<double>(grid.node_count(), 0.0);
}

namespace {

bool is_boundary_node(const Grid& g, std::size_t node) {
    if (g.dim() == 1) {
        const int i = static_cast<int>(node);
        return i == 0 || i == g.n_cells(0);
    }
    const int nx = g.n_nodes(0);
    const int i = static_cast<int>(node % nx);
    const int j = static_cast<int>(node / nx);
    return i == 0 || i == g.n_cells(0) || j == 0 || j == g.n_cells(1);
}

std::vector<double> boundary_slice(const Grid& g, const BoundarySpec& b, double t) {
    std::vector<double> out(g.node_count(), 0.0);
    for (std::size_t n = 0; n < g.node_count(); ++n)
        if (is_boundary_node(g, n)) out[n] = b.value(g.node_coords(n), t);
    return out;
}

struct Coefficients {
    double a_t, a_x, a_f;
};

Coefficients coefficients(const PhysicalConstants& c) {
    return {2.0 / c.T1, c.c_s * c.c_s, 1.0 / c.rho};
}

// Neighbors of an interior node with the 1/h^2 weights of -Lap_h.
struct Stencil {
    std::array<std::size_t, 4> nb;
    std::array<double, 4> w;
    int count = 0;
    double center = 0.0;
};

Stencil laplacian_row(const Grid& g, std::size_t node) {
    Stencil s;
    const double wx = 1.0 / (g.h(0) * g.h(0));
    if (g.dim() == 1) {
        s.nb = {node - 1, node + 1, 0, 0};
        s.w = {wx, wx, 0, 0};
        s.count = 2;
        s.center = 2.0 * wx;
    } else {
        const int nx = g.n_nodes(0);
        const double wy = 1.0 / (g.h(1) * g.h(1));
        s.nb = {node - 1, node + 1, node - static_cast<std::size_t>(nx),
                node + static_cast<std::size_t>(nx)};
        s.w = {wx, wx, wy, wy};
        s.count = 4;
        s.center = 2.0 * wx + 2.0 * wy;
    }
    return s;
}

}  // namespace

std::vector<std::size_t> interior_nodes(const Grid& g) {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < g.node_count(); ++n)
        if (!is_boundary_node(g, n)) out.push_back(n);
    return out;
}

LcpSystem assemble_parabolic_step(const Grid& g, const std::vector<double>& u_prev,
                                  const std::vector<double>& g_slice,
                                  const std::vector<double>& boundary_values,
                                  double dt, const PhysicalConstants& constants) {
    const Coefficients c = coefficients(constants);
    const auto interior = interior_nodes(g);
    std::vector<int> local(g.node_count(), -1);
    for (std::size_t k = 0; k < interior.size(); ++k)
        local[interior[k]] = static_cast<int>(k);

    LcpSystem sys;
    sys.diag.resize(interior.size());
    sys.off.resize(interior.size());
    sys.rhs.resize(interior.size());

    for (std::size_t k = 0; k < interior.size(); ++k) {
        const std::size_t n = interior[k];
        const Stencil st = laplacian_row(g, n);
        sys.diag[k] = c.a_t / dt + c.a_x * st.center;
        double rhs = (c.a_t / dt) * u_prev[n] + c.a_f * g_slice[n];
        for (int m = 0; m < st.count; ++m) {
            const std::size_t nb = st.nb[m];
            const double coeff = -c.a_x * st.w[m];
            if (local[nb] >= 0)
                sys.off[k].emplace_back(local[nb], coeff);
            else
                rhs -= coeff * boundary_values[nb];
        }
        sys.rhs[k] = rhs;
    }
    return sys;
}

std::vector<double> step_parabolic(const Grid& g, const std::vector<double>& u_prev,
                                   const std::vector<double>& g_slice,
                                   const std::vector<double>& boundary_values,
                                   double dt, const PhysicalConstants& constants,
                                   const SolverSettings& settings, StepStats* stats) {
    const auto interior = interior_nodes(g);
    LcpSystem sys =
        assemble_parabolic_step(g, u_prev, g_slice, boundary_values, dt, constants);

    std::vector<double> warm(interior.size());
    for (std::size_t k = 0; k < interior.size(); ++k) warm[k] = u_prev[interior[k]];

    PsorSettings ps{settings.omega, settings.max_iters, settings.tol};
    PsorResult res = psor_solve(sys, warm, ps);
    if (!res.converged)
        throw SolverError("step_parabolic: PSOR did not converge; complementarity residual = " +
                              std::to_string(res.residual),
                          -1, res.residual);
    if (stats) {
        stats->iterations = res.iterations;
        stats->residual = res.residual;
    }

    std::vector<double> out = boundary_values;
    for (std::size_t k = 0; k < interior.size(); ++k) out[interior[k]] = res.u[k];
    return out;
}

SolveResult solve_parabolic(const ObstacleProblemSpec& spec,
                            const SolverSettings& settings) {
    spec.validate();
    const Grid& g = spec.grid;
    const TimeGrid& tg = spec.time_grid;
    const ScalarField gfield = forcing_density(spec.forcing, g, tg);

    SolveResult result;
    result.u = ScalarField(g, tg, "u");
    result.steps.reserve(tg.n_steps);

    std::vector<double> u = spec.initial_slice();
    {
        // boundary trace applies from t0
        auto bc = boundary_slice(g, spec.boundary, tg.t0);
        for (std::size_t n = 0; n < g.node_count(); ++n)
            if (is_boundary_node(g, n)) u[n] = bc[n];
    }
    result.u.set_slice(0, u);

    for (int j = 1; j <= tg.n_steps; ++j) {
        const double t = tg.time(j);
        const auto bc = boundary_slice(g, spec.boundary, t);
        std::vector<double> gs(gfield.slice(j), gfield.slice(j) + g.node_count());
        StepStats st;
        try {
            u = step_parabolic(g, u, gs, bc, tg.dt, spec.constants, settings, &st);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " (time index " +
                                  std::to_string(j) + ")",
                              j, e.residual);
        }
        result.steps.push_back(st);
        result.u.set_slice(j, u);
    }
    if (!result.u.all_finite())
        throw SolverError("solve_parabolic: non-finite values in the trajectory",
                          tg.n_steps, std::nan(""));
    return result;
}

SolveResult solve_damped_wave(const ObstacleProblemSpec& spec,
                              const SolverSettings& settings) {
    spec.validate();
    const Grid& g = spec.grid;
    const TimeGrid& tg = spec.time_grid;
    const Coefficients c = coefficients(spec.constants);
    const double d = c.a_t;  // damping 2/T1
    const double dt = tg.dt;
    const ScalarField gfield = forcing_density(spec.forcing, g, tg);
    const auto interior = interior_nodes(g);

    SolveResult result;
    result.u = ScalarField(g, tg, "u");

    std::vector<double> u_prev = spec.initial_slice();
    {
        auto bc = boundary_slice(g, spec.boundary, tg.t0);
        for (std::size_t n = 0; n < g.node_count(); ++n)
            if (is_boundary_node(g, n)) u_prev[n] = bc[n];
    }
    result.u.set_slice(0, u_prev);
    if (tg.n_steps == 0) return result;

    auto lap = [&](const std::vector<double>& v, std::size_t n) {
        const Stencil st = laplacian_row(g, n);
        double s = -st.center * v[n];
        for (int m = 0; m < st.count; ++m) s += st.w[m] * v[st.nb[m]];
        return s;
    };

    // first step: Taylor expansion with zero initial velocity
    std::vector<double> u_cur = u_prev;
    {
        const auto bc = boundary_slice(g, spec.boundary, tg.time(1));
        for (std::size_t n : interior) {
            const double acc = c.a_x * lap(u_prev, n) + c.a_f * gfield.at(n, 0);
            u_cur[n] = u_prev[n] + 0.5 * dt * dt * acc;
        }
        for (std::size_t n = 0; n < g.node_count(); ++n)
            if (is_boundary_node(g, n)) u_cur[n] = bc[n];
    }
    result.u.set_slice(1, u_cur);

    const double cfl = spec.constants.c_s * dt *
                       std::sqrt(1.0 / (g.h(0) * g.h(0)) +
                                 (g.dim() == 2 ? 1.0 / (g.h(1) * g.h(1)) : 0.0));
    if (settings.explicit_wave && cfl > 1.0)
        throw SolverError("solve_damped_wave: explicit scheme violates CFL, c_s*dt*|1/h| = " +
                              std::to_string(cfl) + " > 1",
                          0, cfl);
    const double blowup = 1e12 * std::max(1.0, result.u.max_value());

    std::vector<int> local(g.node_count(), -1);
    for (std::size_t k = 0; k < interior.size(); ++k)
        local[interior[k]] = static_cast<int>(k);

    for (int j = 2; j <= tg.n_steps; ++j) {
        const auto bc = boundary_slice(g, spec.boundary, tg.time(j));
        std::vector<double> u_next(g.node_count(), 0.0);
        for (std::size_t n = 0; n < g.node_count(); ++n)
            if (is_boundary_node(g, n)) u_next[n] = bc[n];

        if (settings.explicit_wave) {
            for (std::size_t n : interior) {
                const double acc = c.a_x * lap(u_cur, n) -
                                   d * (u_cur[n] - u_prev[n]) / dt +
                                   c.a_f * gfield.at(n, j - 1);
                u_next[n] = 2.0 * u_cur[n] - u_prev[n] + dt * dt * acc;
            }
        } else {
            // time-symmetric implicit scheme:
            // (u+ - 2u + u-)/dt^2 + d (u+ - u-)/(2 dt)
            //   + a_x (-Lap)(u+ + u-)/2 = a_f g(t_n)
            LcpSystem sys;
            sys.diag.resize(interior.size());
            sys.off.resize(interior.size());
            sys.rhs.resize(interior.size());
            const double lhs_i = 1.0 / (dt * dt) + d / (2.0 * dt);
            const double rhs_i = 1.0 / (dt * dt) - d / (2.0 * dt);
            for (std::size_t k = 0; k < interior.size(); ++k) {
                const std::size_t n = interior[k];
                const Stencil st = laplacian_row(g, n);
                sys.diag[k] = lhs_i + 0.5 * c.a_x * st.center;
                double rhs = (2.0 / (dt * dt)) * u_cur[n] - rhs_i * u_prev[n] -
                             0.5 * c.a_x * st.center * u_prev[n] +
                             c.a_f * gfield.at(n, j - 1);
                for (int m = 0; m < st.count; ++m) {
                    const std::size_t nb = st.nb[m];
                    const double coeff = -0.5 * c.a_x * st.w[m];
                    rhs += 0.5 * c.a_x * st.w[m] * u_prev[nb];
                    if (local[nb] >= 0)
                        sys.off[k].emplace_back(local[nb], coeff);
                    else
                        rhs -= coeff * u_next[nb];  // boundary value at new level
                }
                sys.rhs[k] = rhs;
            }
            std::vector<double> warm(interior.size());
            for (std::size_t k = 0; k < interior.size(); ++k)
                warm[k] = u_cur[interior[k]];
            PsorSettings ps{settings.omega, settings.max_iters, settings.tol};
            PsorResult res = sor_solve(sys, warm, ps);
            if (!res.converged)
                throw SolverError("solve_damped_wave: linear solve stalled at step " +
                                      std::to_string(j),
                                  j, res.residual);
            for (std::size_t k = 0; k < interior.size(); ++k)
                u_next[interior[k]] = res.u[k];
        }

        for (std::size_t n : interior)
            if (!std::isfinite(u_next[n]) || std::abs(u_next[n]) > blowup)
                throw SolverError(
                    "solve_damped_wave: instability detected at step " +
                        std::to_string(j) + "; CFL number c_s*dt*|1/h| = " +
                        std::to_string(cfl) + " (explicit stability needs <= 1)",
                    j, cfl);

        u_prev.swap(u_cur);
        u_cur.swap(u_next);
        result.u.set_slice(j, u_cur);
    }
    return result;
}

ObstacleProblemSpec normalize(const ObstacleProblemSpec& spec) {
    spec.validate();
    const PhysicalConstants& pc = spec.constants;
    const double s = pc.c_s * pc.T1 / 2.0;
    const double tau = pc.T1 / 2.0;
    const double U = 1.0;
    const double f_scale = 2.0 * U * pc.rho / (tau * pc.T1);

    ObstacleProblemSpec out = spec;
    out.grid = Grid::make(spec.grid.dim(),
                          {spec.grid.origin(0) / s, spec.grid.origin(1) / s},
                          {spec.grid.dim() >= 1 ? spec.grid.extent(0) / s : 1.0,
                           spec.grid.dim() == 2 ? spec.grid.extent(1) / s : 0.0},
                          {spec.grid.n_cells(0), spec.grid.n_cells(1)},
                          UnitSystem::normalized);
    out.time_grid = TimeGrid::make(spec.time_grid.t0 / tau, spec.time_grid.dt / tau,
                                   spec.time_grid.n_steps);
    out.constants = PhysicalConstants::make(1.0, 1.0, 2.0);

    out.forcing = spec.forcing;
    out.forcing.space_scale *= s;
    out.forcing.time_scale *= tau;
    out.forcing.value_scale *= f_scale;

    if (spec.boundary.kind == BoundarySpec::Kind::prescribed_trace) {
        auto phys = spec.boundary.trace;
        out.boundary = BoundarySpec::prescribed(
            [phys, s, tau, U](const SpacePoint& x, double t) {
                return phys({x[0] * s, x[1] * s}, t * tau) / U;
            });
    }
    out.normalization = NormalizationRecord{s, tau, U, f_scale};
    return out;
}

ObstacleProblemSpec denormalize(const ObstacleProblemSpec& spec) {
    const NormalizationRecord& r = spec.normalization;
    ObstacleProblemSpec out = spec;
    out.grid = Grid::make(
        spec.grid.dim(),
        {spec.grid.origin(0) * r.space_scale, spec.grid.origin(1) * r.space_scale},
        {spec.grid.extent(0) * r.space_scale,
         spec.grid.dim() == 2 ? spec.grid.extent(1) * r.space_scale : 0.0},
        {spec.grid.n_cells(0), spec.grid.n_cells(1)}, UnitSystem::physical);
    out.time_grid =
        TimeGrid::make(spec.time_grid.t0 * r.time_scale,
                       spec.time_grid.dt * r.time_scale, spec.time_grid.n_steps);
    // recover the physical constants: tau = T1/2, s = c_s T1/2
    const double T1 = 2.0 * r.time_scale;
    const double c_s = r.space_scale / r.time_scale;
    const double rho = r.f_scale * r.time_scale * T1 / (2.0 * r.u_scale);
    out.constants = PhysicalConstants::make(rho, c_s * c_s * rho, T1);

    out.forcing = spec.forcing;
    out.forcing.space_scale /= r.space_scale;
    out.forcing.time_scale /= r.time_scale;
    out.forcing.value_scale /= r.f_scale;

    if (spec.boundary.kind == BoundarySpec::Kind::prescribed_trace) {
        auto norm = spec.boundary.trace;
        const double s = r.space_scale, tau = r.time_scale, U = r.u_scale;
        out.boundary = BoundarySpec::prescribed(
            [norm, s, tau, U](const SpacePoint& x, double t) {
                return U * norm({x[0] / s, x[1] / s}, t / tau);
            });
    }
    out.normalization = NormalizationRecord{};
    return out;
}

ScalarField residual_field(const ScalarField& u, const ScalarField& f,
                           const PhysicalConstants& constants, double chi_eps_rel) {
    if (!(u.grid() == f.grid()) || !(u.time_grid() == f.time_grid()))
        throw std::invalid_argument("residual_field: grid mismatch");
    const Grid& g = u.grid();
    const TimeGrid& tg = u.time_grid();
    const Coefficients c = coefficients(constants);
    const double eps = chi_eps_rel * std::max(1.0, u.max_value());

    ScalarField out(g, tg, "residual");
    const auto interior = interior_nodes(g);
    for (int j = 1; j < tg.n_times(); ++j) {
        for (std::size_t n : interior) {
            const Stencil st = laplacian_row(g, n);
            double lap = -st.center * u.at(n, j);
            for (int m = 0; m < st.count; ++m) lap += st.w[m] * u.at(st.nb[m], j);
            const double dudt = (u.at(n, j) - u.at(n, j - 1)) / tg.dt;
            const double chi = u.at(n, j) > eps ? 1.0 : 0.0;
            out.at(n, j) =
                std::abs(c.a_x * lap - c.a_t * dudt - c.a_f * f.at(n, j) * chi);
        }
    }
    return out;
}

StefanReport check_stefan(const ScalarField& u, double tol) {
    const TimeGrid& tg = u.time_grid();
    if (tg.n_steps < 1)
        throw std::invalid_argument("check_stefan: need at least 2 time slices");
    double worst = 0.0;
    const std::size_t n_nodes = u.grid().node_count();
    for (int j = 1; j < tg.n_times(); ++j)
        for (std::size_t n = 0; n < n_nodes; ++n)
            worst = std::min(worst, (u.at(n, j) - u.at(n, j - 1)) / tg.dt);
    return StefanReport{worst >= -tol, worst};
}

}  // namespace porosim
