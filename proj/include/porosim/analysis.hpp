#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "porosim/grid.hpp"

namespace porosim {

enum class FbLabel { unresolved, regular, singular };

struct FbPoint {
    SpacePoint x{0.0, 0.0};
    double t = 0.0;
    int t_idx = 0;
    FbLabel label = FbLabel::unresolved;
    double weiss_ratio = 0.0;  // filled by classification
};

/// Free boundary Gamma as edge-interpolated points, one bucket per slice.
struct FreeBoundarySet {
    std::vector<std::vector<FbPoint>> per_slice;

    std::size_t total_count() const;
    std::vector<FbPoint> all() const;
    bool empty() const { return total_count() == 0; }
};

struct RegularityReport {
    SpacePoint x0{0.0, 0.0};
    double t0 = 0.0;
    std::vector<double> rho_values;  // strictly decreasing
    std::vector<double> sup_values;
    double fitted_exponent = 0.0;
    double fitted_c_lower = 0.0;  // min over rho of sup/rho^2
    double fitted_C_upper = 0.0;  // max over rho of sup/rho^2
    double M_bound = 0.0;         // filled by derivative_bounds
};

struct BlowupFit {
    enum class Kind { half_space, polynomial, unresolved };
    Kind kind = Kind::unresolved;
    SpacePoint e{1.0, 0.0};           // half-space direction
    double m = 0.0;                   // polynomial: u = m t + x.M.x
    std::array<double, 3> M{0, 0, 0}; // {Mxx, Myy, Mxy}
    double fit_residual = 0.0;        // relative L2 of the winning family
    double residual_half_space = 0.0;
    double residual_polynomial = 0.0;
    double trace_gap = 0.0;           // Tr(M) - (m + 1), alternate bookkeeping
    bool m_psd_ok = true;
};

struct WeissValue {
    SpacePoint x_star{0.0, 0.0};
    double t_star = 0.0;
    std::vector<double> tau_values;  // strictly decreasing
    std::vector<double> W_values;
    double extrapolated_limit = 0.0;
    double extrapolation_residual = 0.0;
    double A_n = 0.0;
    double ratio = 0.0;  // extrapolated limit / A_n
};

struct ClassifyResult {
    FbLabel label = FbLabel::unresolved;
    WeissValue weiss;
};

struct WeissSettings {
    int n_xi = 96;     // spatial quadrature panels per direction (radial in 2D)
    int n_sigma = 48;  // panels over the time-like variable
};

struct ClassifySettings {
    std::vector<double> tau_values;  // geometric, strictly decreasing
    double theta = 0.25;             // acceptance band around ratios 1 and 2
    WeissSettings quad;
    double A_n = 0.0;  // 0 means: compute from the half-space reference
};

struct SingularGroup {
    int kern_dim = 0;
    std::vector<FbPoint> points;
    std::vector<bool> isolated;  // no other singular point within 3h
};

struct SingularStructureReport {
    std::vector<SingularGroup> groups;       // indexed by kern dim presence
    std::vector<int> per_slice_counts;       // singular points per slice
    std::size_t total_points = 0;            // all FB points seen
    std::size_t singular_points = 0;
};

/// Edge crossings of the level u = eps, per time slice.
FreeBoundarySet extract_free_boundary(const ScalarField& u, double eps);

/// sup_{Q_rho} u against c rho^2 from below over a decreasing rho sweep.
/// z0 must lie in the closure of {u > eps}.
RegularityReport nondegeneracy_sweep(const ScalarField& u, const SpacePoint& x0,
                                     double t0, const std::vector<double>& rho_values,
                                     double eps);

/// Same sweep read as the upper bound sup_{Q_rho} u <= C rho^2; z0 must be a
/// free boundary point.
RegularityReport quadratic_growth_sweep(const ScalarField& u, const SpacePoint& x0,
                                        double t0,
                                        const std::vector<double>& rho_values,
                                        double eps);

/// Largest |second space differences| + |du/dt| over Q_rho(z0) cut to {u>eps},
/// using only nodes whose stencil stays inside {u > eps}.
double derivative_bounds(const ScalarField& u, const SpacePoint& x0, double t0,
                         double rho, double eps);

/// Parabolic zoom u_lambda(x,t) = u(x* + x lambda/sqrt(f*), t* + t lambda^2/f*)
/// / lambda^2 resampled onto the reference cylinder [-1,1]^n x [-1,0].
ScalarField rescale_blowup(const ScalarField& u, const SpacePoint& x_star,
                           double t_star, double lambda, double f_at_zstar,
                           int ref_cells = 64, int ref_steps = 64);

/// Constrained least squares against the two blow-up families.
BlowupFit fit_blowup(const ScalarField& u_lambda, double residual_threshold = 0.2);

/// The displayed energy functional W(tau, z*, u, f); spatial integral over
/// {|x - x*| < tau} as displayed, heat kernel G(y,s) = (4 pi s)^{-n/2}
/// exp(-|y|^2/(4s)).
double weiss_energy(const ScalarField& u, const ScalarField& f,
                    const SpacePoint& x_star, double t_star, double tau,
                    const WeissSettings& settings = {});

/// tau -> 0 value of W on the exact half-space profile, extrapolated over a
/// geometric tau sweep at the given quadrature resolution.
double compute_A_n(int n, const WeissSettings& settings = {},
                   WeissValue* detail = nullptr);

/// Weiss dichotomy at a free boundary point: ratio near 1 -> regular, near
/// 2 -> singular, otherwise unresolved.
ClassifyResult classify_point(const ScalarField& u, const ScalarField& f,
                              const SpacePoint& x_star, double t_star,
                              const ClassifySettings& settings);

/// Groups singular points by dim Kern(M) and checks isolation.
SingularStructureReport singular_structure(const FreeBoundarySet& fb,
                                           const std::vector<BlowupFit>& fits,
                                           double h);

/// (count of space-time nodes adjacent to Gamma) * h^(n+1); tends to zero
/// under simultaneous refinement.
double fb_measure_estimate(const ScalarField& u, double eps);

}  // namespace porosim
