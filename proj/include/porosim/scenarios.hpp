#pragma once

#include <functional>
#include <string>
#include <vector>

#include "porosim/config.hpp"
#include "porosim/solver.hpp"

namespace porosim {

/**
 * A fully assembled run: the problem statement plus analysis defaults and,
 * when a closed form exists, the reference solution for error reporting.
 *
 * Orientation of the source term per scenario:
 *   stationary-1d, radial-2d, two-bump-collision-1d drive the membrane with
 *   boundary data against the obstacle load f > 0 (source g = -f), which is
 *   the regime of the regularity estimates. traveling-wave-1d and flicker-1d
 *   use the Lorentz density as a growth source (g > 0) from flat data.
 */
struct Scenario {
    std::string name;
    ObstacleProblemSpec spec;
    std::vector<double> rho_values;
    std::vector<double> tau_values;
    double theta = 0.25;
    /// Obstacle-problem datum f = -g for the analysis pipeline.
    std::function<double(const SpacePoint&, double)> obstacle_datum;
    /// Reference displacement, when known in closed form.
    std::function<double(const SpacePoint&, double)> exact;
};

std::vector<std::string> scenario_names();

/// Builds a bundled scenario; config keys override the bundled defaults.
Scenario build_scenario(const RunConfig& config);

/// Stationary contact profile of the radial problem with unit datum:
/// (r^2 - r0^2)/4 - (r0^2/2) ln(r/r0) outside the contact disk.
double radial_stationary_profile(double r, double r0);

}  // namespace porosim
