#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "porosim/forcing.hpp"
#include "porosim/grid.hpp"
#include "porosim/lcp.hpp"

namespace porosim {

/**
 * Membrane constants of the damped-wave equation
 *   u_tt + (2/T1) u_t - c_s^2 Lap(u) = (1/rho) g.
 * c_s is stored so that c_s^2 = T0/rho holds exactly.
 */
struct PhysicalConstants {
    double rho = 1.0;   // density: kg/m (1D), kg/m^2 (2D)
    double T0 = 1.0;    // tension magnitude
    double T1 = 2.0;    // relaxation time [s]
    double c_s = 1.0;   // speed of sound, sqrt(T0/rho)

    static PhysicalConstants make(double rho, double T0, double T1);
    void validate() const;
};

/// Scales mapping a physical problem onto unit coefficients for du/dt and
/// Lap(u):  x = space_scale * x~,  t = time_scale * t~,  u = u_scale * u~,
/// g = f_scale * g~.
struct NormalizationRecord {
    double space_scale = 1.0;
    double time_scale = 1.0;
    double u_scale = 1.0;
    double f_scale = 1.0;
};

struct BoundarySpec {
    enum class Kind { clamped_zero, prescribed_trace };
    Kind kind = Kind::clamped_zero;
    std::function<double(const SpacePoint&, double)> trace;

    static BoundarySpec clamped();
    static BoundarySpec prescribed(std::function<double(const SpacePoint&, double)> fn);
    double value(const SpacePoint& x, double t) const;
};

/**
 * Full statement of one membrane run.
 *
 * The forcing supplies the signed source term g of
 *   u_t - Lap(u) = g  on {u > 0}   (normalized form; general constants scale
 * the terms as in PhysicalConstants). g > 0 drives the membrane toward the
 * vesicle; g = -f with f > 0 reproduces the obstacle-load problem whose
 * datum f appears in the regularity estimates.
 */
struct ObstacleProblemSpec {
    Grid grid = Grid::make1d(0.0, 1.0, 2);
    TimeGrid time_grid;
    PhysicalConstants constants;
    ForcingSpec forcing;
    BoundarySpec boundary;
    std::vector<double> initial_u;  // one slice; empty means u = 0
    NormalizationRecord normalization;

    void validate() const;
    std::vector<double> initial_slice() const;
};

struct SolverSettings {
    double omega = 1.5;
    int max_iters = 10000;
    double tol = 1e-10;            // complementarity tolerance
    double chi_eps_rel = 1e-12;    // epsilon = chi_eps_rel * max(1, max u)
    bool explicit_wave = false;    // explicit leapfrog for the wave solver
};

struct StepStats {
    int iterations = 0;
    double residual = 0.0;
};

struct SolveResult {
    ScalarField u;
    std::vector<StepStats> steps;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, int time_index, double residual)
        : std::runtime_error(msg), time_index(time_index), residual(residual) {}
    int time_index = -1;
    double residual = 0.0;
};

/// Flat indices of the interior (non-boundary) nodes.
std::vector<std::size_t> interior_nodes(const Grid& g);

/// Backward-Euler complementarity system for one step:
///   A u = (a_t/dt) u_prev + a_f g + boundary terms,  u >= 0 componentwise,
/// with A = (a_t/dt) I + a_x (-Lap_h) over interior nodes.
LcpSystem assemble_parabolic_step(const Grid& g, const std::vector<double>& u_prev,
                                  const std::vector<double>& g_slice,
                                  const std::vector<double>& boundary_values,
                                  double dt, const PhysicalConstants& constants);

/// One implicit step of the constrained parabolic problem. boundary_values
/// holds the trace at the new time level on boundary nodes.
std::vector<double> step_parabolic(const Grid& g, const std::vector<double>& u_prev,
                                   const std::vector<double>& g_slice,
                                   const std::vector<double>& boundary_values,
                                   double dt, const PhysicalConstants& constants,
                                   const SolverSettings& settings,
                                   StepStats* stats = nullptr);

/// Full quasi-static trajectory (backward Euler + PSOR per step).
SolveResult solve_parabolic(const ObstacleProblemSpec& spec,
                            const SolverSettings& settings = {});

/// Full damped-wave trajectory, without the u >= 0 constraint. Validates the
/// quasi-static reduction: bigger damping, smaller gap to solve_parabolic.
SolveResult solve_damped_wave(const ObstacleProblemSpec& spec,
                              const SolverSettings& settings = {});

/// Normalize to unit coefficients; round-trips with denormalize.
ObstacleProblemSpec normalize(const ObstacleProblemSpec& spec);
ObstacleProblemSpec denormalize(const ObstacleProblemSpec& spec);

/// Pointwise |a_x Lap_h u - a_t D_t u - a_f f chi_{u>eps}| at interior
/// space-time nodes; f is the obstacle-problem datum (f = -g).
ScalarField residual_field(const ScalarField& u, const ScalarField& f,
                           const PhysicalConstants& constants = {},
                           double chi_eps_rel = 1e-12);

struct StefanReport {
    bool monotone = false;
    double violation = 0.0;  // most negative discrete du/dt
};

/// Checks the no-return condition du/dt >= -tol over the whole trajectory.
StefanReport check_stefan(const ScalarField& u, double tol = 1e-8);

}  // namespace porosim
