#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "porosim/grid.hpp"
#include "porosim/lcp.hpp"

namespace porosim {

/**
 * Closed-form reference solutions used only for validation. Each evaluator
 * satisfies Lap(u) - du/dt = f on {u > 0} analytically:
 *   half_space:      u = ((x.e)_+)^2 / 2, f = 1, second derivative along e is 1.
 *   polynomial:      u = m t + x.M.x,     f = 1, 2 Tr(M) - m = 1.
 *   radial_2d:       u'' + u'/r = f outside the contact disk, u(r0)=u'(r0)=0.
 */
struct ExactSolution {
    enum class Kind { half_space, polynomial, radial_2d_stationary };
    Kind kind;
    std::string description;
    std::function<double(const SpacePoint&, double)> u;
    std::function<double(const SpacePoint&, double)> f;
};

/// u = ((x.e)_+)^2 / 2 with |e| = 1; free boundary is the hyperplane x.e = 0.
ExactSolution exact_half_space(const std::array<double, 2>& e, int dim);

/// u = m t + x.M.x on t <= 0. M is symmetric: {Mxx, Myy, Mxy} (1D uses Mxx).
/// Rejects (m, M) violating 2 Tr(M) - m = 1, negative eigenvalues, or m > 0.
ExactSolution exact_polynomial(double m, const std::array<double, 3>& M, int dim);

/// Stationary radial profile with constant datum, integrated on a fine
/// radial grid; closed form is (r^2-r0^2)/4 - (r0^2/2) ln(r/r0) for f = 1.
ExactSolution exact_radial_stationary(double r0, double f_const = 1.0,
                                      int radial_cells = 20000,
                                      double r_max = 4.0);

/// Exhaustive active-set enumeration; exact up to linear-solve precision.
/// Rejects systems with more than max_dim unknowns (2^N candidates).
std::vector<double> brute_force_lcp(const LcpSystem& system, int max_dim = 20);

/// Random symmetric strictly diagonally dominant (hence SPD) system with a
/// mixed-sign right-hand side; deterministic in the seed.
LcpSystem random_spd_lcp(unsigned long long seed, int n);

enum class QuadratureRule { trapezoid, simpson };

/// Composite 1D rule at a fixed resolution over [a, b].
double reference_quadrature(const std::function<double(double)>& fn, double a,
                            double b, int n_panels,
                            QuadratureRule rule = QuadratureRule::simpson);

/// Tensor rule over [a0,b0] x [a1,b1].
double reference_quadrature_2d(const std::function<double(double, double)>& fn,
                               double a0, double b0, double a1, double b1,
                               int n_panels,
                               QuadratureRule rule = QuadratureRule::simpson);

}  // namespace porosim
