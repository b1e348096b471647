#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace porosim {

/**
 * Symmetric positive-definite system for the complementarity problem
 *   u >= 0,  A u - rhs >= 0,  u . (A u - rhs) = 0.
 * Rows store the strictly-off-diagonal entries; the diagonal is separate.
 * Strict diagonal dominance guarantees projected relaxation converges.
 */
struct LcpSystem {
    std::vector<double> diag;
    std::vector<std::vector<std::pair<int, double>>> off;  // per row: (col, coeff)
    std::vector<double> rhs;

    std::size_t size() const { return diag.size(); }
    double row_apply(const std::vector<double>& u, std::size_t i) const;
    /// min(u_i, (A u - rhs)_i), the pointwise complementarity defect.
    double complementarity_residual(const std::vector<double>& u) const;
    void validate() const;
};

struct PsorSettings {
    double omega = 1.5;      // relaxation factor, (0, 2)
    int max_iters = 10000;
    double tol = 1e-10;      // absolute complementarity tolerance (scaled)
};

struct PsorResult {
    std::vector<double> u;
    int iterations = 0;
    double residual = 0.0;  // final complementarity residual
    bool converged = false;
};

/// Projected SOR on the LCP; u0 is the warm start (clamped to >= 0).
PsorResult psor_solve(const LcpSystem& sys, const std::vector<double>& u0,
                      const PsorSettings& settings);

/// Plain SOR on A u = rhs (no projection); used by the damped-wave stepper.
PsorResult sor_solve(const LcpSystem& sys, const std::vector<double>& u0,
                     const PsorSettings& settings);

}  // namespace porosim
