#include "porosim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace porosim {

std::size_t FreeBoundarySet::total_count() const {
    std::size_t n = 0;
    for (const auto& s : per_slice) n += s.size();
    return n;
}

std::vector<FbPoint> FreeBoundarySet::all() const {
    std::vector<FbPoint> out;
    out.reserve(total_count());
    for (const auto& s : per_slice) out.insert(out.end(), s.begin(), s.end());
    return out;
}

FreeBoundarySet extract_free_boundary(const ScalarField& u, double eps) {
    const Grid& g = u.grid();
    const TimeGrid& tg = u.time_grid();
    FreeBoundarySet fb;
    fb.per_slice.resize(tg.n_times());

    auto crossing = [&](double ua, double ub) -> std::optional<double> {
        const bool a = ua > eps, b = ub > eps;
        if (a == b) return std::nullopt;
        return (eps - ua) / (ub - ua);  // fraction along the edge
    };

    for (int j = 0; j < tg.n_times(); ++j) {
        const double t = tg.time(j);
        auto& bucket = fb.per_slice[j];
        if (g.dim() == 1) {
            for (int i = 0; i < g.n_cells(0); ++i) {
                if (auto s = crossing(u.at_ij(i, 0, j), u.at_ij(i + 1, 0, j))) {
                    FbPoint p;
                    p.x = {g.coord(0, i) + *s * g.h(0), 0.0};
                    p.t = t;
                    p.t_idx = j;
                    bucket.push_back(p);
                }
            }
        } else {
            for (int jj = 0; jj < g.n_nodes(1); ++jj)
                for (int i = 0; i < g.n_cells(0); ++i)
                    if (auto s = crossing(u.at_ij(i, jj, j), u.at_ij(i + 1, jj, j))) {
                        FbPoint p;
                        p.x = {g.coord(0, i) + *s * g.h(0), g.coord(1, jj)};
                        p.t = t;
                        p.t_idx = j;
                        bucket.push_back(p);
                    }
            for (int jj = 0; jj < g.n_cells(1); ++jj)
                for (int i = 0; i < g.n_nodes(0); ++i)
                    if (auto s = crossing(u.at_ij(i, jj, j), u.at_ij(i, jj + 1, j))) {
                        FbPoint p;
                        p.x = {g.coord(0, i), g.coord(1, jj) + *s * g.h(1)};
                        p.t = t;
                        p.t_idx = j;
                        bucket.push_back(p);
                    }
        }
    }
    return fb;
}

namespace {

int nearest_slice_at_or_before(const TimeGrid& tg, double t0) {
    const int j = static_cast<int>(std::floor((t0 - tg.t0) / tg.dt + 1e-9));
    return std::clamp(j, 0, tg.n_steps);
}

// true if some node with u > eps (resp. <= eps) lies within `reach` of x0 at
// the slices nearest t0
bool has_nearby(const ScalarField& u, const SpacePoint& x0, double t0, double eps,
                double reach, bool above) {
    const Grid& g = u.grid();
    const int j = nearest_slice_at_or_before(u.time_grid(), t0);
    auto axis_range = [&](int a) {
        const int lo =
            static_cast<int>(std::ceil((x0[a] - reach - g.origin(a)) / g.h(a)));
        const int hi =
            static_cast<int>(std::floor((x0[a] + reach - g.origin(a)) / g.h(a)));
        return std::pair<int, int>(std::max(lo, 0), std::min(hi, g.n_cells(a)));
    };
    const auto [ix_lo, ix_hi] = axis_range(0);
    const auto [iy_lo, iy_hi] =
        g.dim() == 2 ? axis_range(1) : std::pair<int, int>(0, 0);
    for (int dj = 0; dj <= 1; ++dj) {
        const int js = j - dj;
        if (js < 0) continue;
        for (int jy = iy_lo; jy <= iy_hi; ++jy)
            for (int ix = ix_lo; ix <= ix_hi; ++ix) {
                double d2 = 0.0;
                const double dx = g.coord(0, ix) - x0[0];
                d2 += dx * dx;
                if (g.dim() == 2) {
                    const double dy = g.coord(1, jy) - x0[1];
                    d2 += dy * dy;
                }
                if (d2 > reach * reach) continue;
                const bool over = u.at_ij(ix, jy, js) > eps;
                if (over == above) return true;
            }
    }
    return false;
}

void require_in_closure(const ScalarField& u, const SpacePoint& x0, double t0,
                        double eps) {
    const double reach = 2.0 * u.grid().h_max() * std::sqrt(2.0);
    if (!has_nearby(u, x0, t0, eps, reach, true))
        throw std::invalid_argument(
            "analysis: point is not in the closure of {u > eps}");
}

void require_on_free_boundary(const ScalarField& u, const SpacePoint& x0, double t0,
                              double eps) {
    const double reach = 2.0 * u.grid().h_max() * std::sqrt(2.0);
    if (!has_nearby(u, x0, t0, eps, reach, true) ||
        !has_nearby(u, x0, t0, eps, reach, false))
        throw std::invalid_argument("analysis: point is not on the free boundary");
}

void validate_rho_values(const std::vector<double>& rho) {
    if (rho.size() < 2)
        throw std::invalid_argument("analysis: need at least two radii");
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0))
            throw std::invalid_argument("analysis: radii must be positive");
        if (i > 0 && !(rho[i] < rho[i - 1]))
            throw std::invalid_argument("analysis: radii must be strictly decreasing");
    }
}

// least-squares slope of ln(y) against ln(x); NaN when any y <= 0
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(y[i] > 0.0)) return std::nan("");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) return std::nan("");
    return (n * sxy - sx * sy) / denom;
}

RegularityReport sweep(const ScalarField& u, const SpacePoint& x0, double t0,
                       const std::vector<double>& rho_values) {
    RegularityReport rep;
    rep.x0 = x0;
    rep.t0 = t0;
    rep.rho_values = rho_values;
    rep.sup_values.reserve(rho_values.size());
    std::vector<double> quotients;
    for (double rho : rho_values) {
        ParabolicCylinder cyl{x0, t0, rho};
        const double s = sup_on_cylinder(u, cyl);
        rep.sup_values.push_back(s);
        quotients.push_back(s / (rho * rho));
    }
    rep.fitted_c_lower = *std::min_element(quotients.begin(), quotients.end());
    rep.fitted_C_upper = *std::max_element(quotients.begin(), quotients.end());
    rep.fitted_exponent = loglog_slope(rho_values, rep.sup_values);
    return rep;
}

}  // namespace

RegularityReport nondegeneracy_sweep(const ScalarField& u, const SpacePoint& x0,
                                     double t0, const std::vector<double>& rho_values,
                                     double eps) {
    validate_rho_values(rho_values);
    require_in_closure(u, x0, t0, eps);
    return sweep(u, x0, t0, rho_values);
}

RegularityReport quadratic_growth_sweep(const ScalarField& u, const SpacePoint& x0,
                                        double t0,
                                        const std::vector<double>& rho_values,
                                        double eps) {
    validate_rho_values(rho_values);
    require_on_free_boundary(u, x0, t0, eps);
    return sweep(u, x0, t0, rho_values);
}

double derivative_bounds(const ScalarField& u, const SpacePoint& x0, double t0,
                         double rho, double eps) {
    const Grid& g = u.grid();
    const TimeGrid& tg = u.time_grid();
    const auto nodes = cylinder_nodes(u, ParabolicCylinder{x0, t0, rho});

    auto positive = [&](int i, int jj, int jt) {
        return u.at_ij(i, jj, jt) > eps;
    };

    double best = -1.0;
    for (const auto& [n, jt] : nodes) {
        const int nx = g.n_nodes(0);
        const int i = static_cast<int>(g.dim() == 1 ? n : n % nx);
        const int jj = static_cast<int>(g.dim() == 1 ? 0 : n / nx);
        if (!positive(i, jj, jt)) continue;
        if (i < 1 || i > g.n_cells(0) - 1) continue;
        if (g.dim() == 2 && (jj < 1 || jj > g.n_cells(1) - 1)) continue;

        // spatial stencil must stay inside {u > eps}
        bool ok = positive(i - 1, jj, jt) && positive(i + 1, jj, jt);
        if (g.dim() == 2)
            ok = ok && positive(i, jj - 1, jt) && positive(i, jj + 1, jt) &&
                 positive(i - 1, jj - 1, jt) && positive(i + 1, jj - 1, jt) &&
                 positive(i - 1, jj + 1, jt) && positive(i + 1, jj + 1, jt);
        if (!ok) continue;

        const double hx2 = g.h(0) * g.h(0);
        double sum = std::abs((u.at_ij(i - 1, jj, jt) - 2 * u.at_ij(i, jj, jt) +
                               u.at_ij(i + 1, jj, jt)) /
                              hx2);
        if (g.dim() == 2) {
            const double hy2 = g.h(1) * g.h(1);
            sum += std::abs((u.at_ij(i, jj - 1, jt) - 2 * u.at_ij(i, jj, jt) +
                             u.at_ij(i, jj + 1, jt)) /
                            hy2);
            sum += std::abs((u.at_ij(i + 1, jj + 1, jt) - u.at_ij(i + 1, jj - 1, jt) -
                             u.at_ij(i - 1, jj + 1, jt) + u.at_ij(i - 1, jj - 1, jt)) /
                            (4.0 * g.h(0) * g.h(1)));
        }

        // time derivative: central where both neighbours exist and are positive
        double dudt;
        if (jt > 0 && jt < tg.n_steps && positive(i, jj, jt - 1) &&
            positive(i, jj, jt + 1))
            dudt = (u.at_ij(i, jj, jt + 1) - u.at_ij(i, jj, jt - 1)) / (2.0 * tg.dt);
        else if (jt > 0 && positive(i, jj, jt - 1))
            dudt = (u.at_ij(i, jj, jt) - u.at_ij(i, jj, jt - 1)) / tg.dt;
        else if (jt < tg.n_steps && positive(i, jj, jt + 1))
            dudt = (u.at_ij(i, jj, jt + 1) - u.at_ij(i, jj, jt)) / tg.dt;
        else
            continue;

        best = std::max(best, sum + std::abs(dudt));
    }
    if (best < 0.0)
        throw std::invalid_argument(
            "derivative_bounds: no stencil fits inside Q_rho cut to {u > eps}");
    return best;
}

ScalarField rescale_blowup(const ScalarField& u, const SpacePoint& x_star,
                           double t_star, double lambda, double f_at_zstar,
                           int ref_cells, int ref_steps) {
    if (!(f_at_zstar > 0.0))
        throw std::invalid_argument(
            "rescale_blowup: needs f(z*) > 0 for the parabolic zoom");
    if (!(lambda > 0.0))
        throw std::invalid_argument("rescale_blowup: lambda must be positive");
    const Grid& g = u.grid();
    const TimeGrid& tg = u.time_grid();
    const double sqf = std::sqrt(f_at_zstar);

    // admissibility of the zoom window
    double lambda_max = 1e300;
    for (int a = 0; a < g.dim(); ++a) {
        const double lo = x_star[a] - g.origin(a);
        const double hi = g.origin(a) + g.extent(a) - x_star[a];
        lambda_max = std::min(lambda_max, sqf * std::min(lo, hi));
    }
    lambda_max = std::min(lambda_max,
                          std::sqrt(std::max(0.0, (t_star - tg.t0) * f_at_zstar)));
    if (lambda > lambda_max)
        throw std::invalid_argument(
            "rescale_blowup: window exceeds the domain; max admissible lambda = " +
            std::to_string(lambda_max));

    Grid ref =
        g.dim() == 1
            ? Grid::make1d(-1.0, 2.0, ref_cells)
            : Grid::make(2, {-1.0, -1.0}, {2.0, 2.0}, {ref_cells, ref_cells});
    TimeGrid ref_t = TimeGrid::make(-1.0, 1.0 / ref_steps, ref_steps);

    ScalarField out(ref, ref_t, "u_lambda");
    const double sx = lambda / sqf;
    const double st = lambda * lambda / f_at_zstar;
    for (int j = 0; j < ref_t.n_times(); ++j) {
        const double s = ref_t.time(j);
        for (std::size_t n = 0; n < ref.node_count(); ++n) {
            const SpacePoint xi = ref.node_coords(n);
            const SpacePoint xp{x_star[0] + xi[0] * sx,
                                g.dim() == 2 ? x_star[1] + xi[1] * sx : 0.0};
            out.at(n, j) = u.interpolate(xp, t_star + s * st) / (lambda * lambda);
        }
    }
    return out;
}

namespace {

double relative_l2(const std::vector<double>& diff, const std::vector<double>& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        num += diff[i] * diff[i];
        den += ref[i] * ref[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

BlowupFit fit_blowup(const ScalarField& u_lambda, double residual_threshold) {
    const Grid& g = u_lambda.grid();
    const TimeGrid& tg = u_lambda.time_grid();
    const int dim = g.dim();
    const std::size_t n_nodes = g.node_count();
    const std::size_t n_samples = n_nodes * static_cast<std::size_t>(tg.n_times());

    std::vector<double> uv(u_lambda.values());

    // --- half-space family: u0 = ((x.e)+)^2 / 2 --------------------------
    auto half_space_residual = [&](double ex, double ey) {
        std::vector<double> diff(n_samples);
        std::size_t s = 0;
        for (int j = 0; j < tg.n_times(); ++j)
            for (std::size_t n = 0; n < n_nodes; ++n, ++s) {
                const SpacePoint x = g.node_coords(n);
                const double p = x[0] * ex + (dim == 2 ? x[1] * ey : 0.0);
                const double model = p > 0.0 ? 0.5 * p * p : 0.0;
                diff[s] = uv[s] - model;
            }
        return relative_l2(diff, uv);
    };

    double best_res = 1e300, best_ex = 1.0, best_ey = 0.0;
    if (dim == 1) {
        for (double ex : {1.0, -1.0}) {
            const double r = half_space_residual(ex, 0.0);
            if (r < best_res) {
                best_res = r;
                best_ex = ex;
            }
        }
    } else {
        const int n_angles = 256;
        double best_phi = 0.0;
        for (int k = 0; k < n_angles; ++k) {
            const double phi = 2.0 * M_PI * k / n_angles;
            const double r = half_space_residual(std::cos(phi), std::sin(phi));
            if (r < best_res) {
                best_res = r;
                best_phi = phi;
            }
        }
        // golden-section polish around the best angle
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = best_phi - 2.0 * M_PI / n_angles;
        double b = best_phi + 2.0 * M_PI / n_angles;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = half_space_residual(std::cos(c), std::sin(c));
        double fd = half_space_residual(std::cos(d), std::sin(d));
        for (int it = 0; it < 40; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = half_space_residual(std::cos(c), std::sin(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = half_space_residual(std::cos(d), std::sin(d));
            }
        }
        best_phi = 0.5 * (a + b);
        best_ex = std::cos(best_phi);
        best_ey = std::sin(best_phi);
        best_res = half_space_residual(best_ex, best_ey);
    }

    // --- polynomial family with 2 Tr(M) - m = 1 --------------------------
    // eliminate m: u + t = Mxx (x^2 + 2t) + Myy (y^2 + 2t) + Mxy (2xy)
    const int n_coef = dim == 1 ? 1 : 3;
    std::vector<std::vector<double>> ata(n_coef, std::vector<double>(n_coef, 0.0));
    std::vector<double> atb(n_coef, 0.0);
    {
        std::size_t s = 0;
        for (int j = 0; j < tg.n_times(); ++j) {
            const double t = tg.time(j);
            for (std::size_t n = 0; n < n_nodes; ++n, ++s) {
                const SpacePoint x = g.node_coords(n);
                double basis[3] = {x[0] * x[0] + 2.0 * t, 0.0, 0.0};
                if (dim == 2) {
                    basis[1] = x[1] * x[1] + 2.0 * t;
                    basis[2] = 2.0 * x[0] * x[1];
                }
                const double target = uv[s] + t;
                for (int r = 0; r < n_coef; ++r) {
                    atb[r] += basis[r] * target;
                    for (int c = 0; c < n_coef; ++c)
                        ata[r][c] += basis[r] * basis[c];
                }
            }
        }
    }
    std::array<double, 3> Mfit{0.0, 0.0, 0.0};
    {
        // tiny SPD solve by Gaussian elimination
        std::vector<std::vector<double>> A = ata;
        std::vector<double> b = atb;
        for (int col = 0; col < n_coef; ++col) {
            int piv = col;
            for (int r = col + 1; r < n_coef; ++r)
                if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
            std::swap(A[piv], A[col]);
            std::swap(b[piv], b[col]);
            for (int r = col + 1; r < n_coef; ++r) {
                const double f = A[r][col] / A[col][col];
                for (int c = col; c < n_coef; ++c) A[r][c] -= f * A[col][c];
                b[r] -= f * b[col];
            }
        }
        for (int r = n_coef - 1; r >= 0; --r) {
            double sv = b[r];
            for (int c = r + 1; c < n_coef; ++c) sv -= A[r][c] * Mfit[c];
            Mfit[r] = sv / A[r][r];
        }
    }
    const double trace = dim == 1 ? Mfit[0] : Mfit[0] + Mfit[1];
    const double m_fit = 2.0 * trace - 1.0;

    double poly_res;
    {
        std::vector<double> diff(n_samples);
        std::size_t s = 0;
        for (int j = 0; j < tg.n_times(); ++j) {
            const double t = tg.time(j);
            for (std::size_t n = 0; n < n_nodes; ++n, ++s) {
                const SpacePoint x = g.node_coords(n);
                double q = Mfit[0] * x[0] * x[0];
                if (dim == 2)
                    q += Mfit[1] * x[1] * x[1] + 2.0 * Mfit[2] * x[0] * x[1];
                diff[s] = uv[s] - (m_fit * t + q);
            }
        }
        poly_res = relative_l2(diff, uv);
    }

    BlowupFit fit;
    fit.residual_half_space = best_res;
    fit.residual_polynomial = poly_res;
    fit.e = {best_ex, best_ey};
    fit.m = m_fit;
    fit.M = Mfit;
    fit.trace_gap = trace - (m_fit + 1.0);
    double min_eig = Mfit[0];
    if (dim == 2) {
        const double tr = Mfit[0] + Mfit[1];
        const double det = Mfit[0] * Mfit[1] - Mfit[2] * Mfit[2];
        min_eig = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
    }
    fit.m_psd_ok = min_eig > -1e-6 * std::max(1.0, std::abs(trace));

    if (best_res <= poly_res) {
        fit.kind = best_res <= residual_threshold ? BlowupFit::Kind::half_space
                                                  : BlowupFit::Kind::unresolved;
        fit.fit_residual = best_res;
    } else {
        fit.kind = poly_res <= residual_threshold ? BlowupFit::Kind::polynomial
                                                  : BlowupFit::Kind::unresolved;
        fit.fit_residual = poly_res;
    }
    return fit;
}

namespace {

// node-wise central-difference gradient of one slice, one-sided at the edges
struct GradientField {
    std::vector<double> gx, gy;  // slice-major like ScalarField
};

GradientField build_gradient(const ScalarField& u) {
    const Grid& g = u.grid();
    const TimeGrid& tg = u.time_grid();
    const std::size_t n_nodes = g.node_count();
    GradientField gr;
    gr.gx.assign(n_nodes * tg.n_times(), 0.0);
    if (g.dim() == 2) gr.gy.assign(n_nodes * tg.n_times(), 0.0);

    const int nx = g.n_nodes(0);
    const int ny = g.dim() == 2 ? g.n_nodes(1) : 1;
    for (int j = 0; j < tg.n_times(); ++j) {
        for (int jj = 0; jj < ny; ++jj)
            for (int i = 0; i < nx; ++i) {
                const std::size_t idx =
                    static_cast<std::size_t>(j) * n_nodes + g.node_index(i, jj);
                double d;
                if (i == 0)
                    d = (u.at_ij(1, jj, j) - u.at_ij(0, jj, j)) / g.h(0);
                else if (i == nx - 1)
                    d = (u.at_ij(i, jj, j) - u.at_ij(i - 1, jj, j)) / g.h(0);
                else
                    d = (u.at_ij(i + 1, jj, j) - u.at_ij(i - 1, jj, j)) /
                        (2.0 * g.h(0));
                gr.gx[idx] = d;
                if (g.dim() == 2) {
                    if (jj == 0)
                        d = (u.at_ij(i, 1, j) - u.at_ij(i, 0, j)) / g.h(1);
                    else if (jj == ny - 1)
                        d = (u.at_ij(i, jj, j) - u.at_ij(i, jj - 1, j)) / g.h(1);
                    else
                        d = (u.at_ij(i, jj + 1, j) - u.at_ij(i, jj - 1, j)) /
                            (2.0 * g.h(1));
                    gr.gy[idx] = d;
                }
            }
    }
    return gr;
}

double interp_component(const std::vector<double>& comp, const ScalarField& shape,
                        const SpacePoint& x, double t) {
    const Grid& g = shape.grid();
    const TimeGrid& tg = shape.time_grid();
    auto locate = [](double v, double o, double h, int n) {
        double s = (v - o) / h;
        s = std::clamp(s, 0.0, static_cast<double>(n));
        int i0 = std::min(static_cast<int>(s), n - 1);
        return std::pair<int, double>(i0, s - i0);
    };
    const auto [it, wt] = locate(t, tg.t0, tg.dt, tg.n_steps);
    const auto [i0, wx] = locate(x[0], g.origin(0), g.h(0), g.n_cells(0));
    const std::size_t n_nodes = g.node_count();
    auto val = [&](int i, int jj, int jt) {
        return comp[static_cast<std::size_t>(jt) * n_nodes + g.node_index(i, jj)];
    };
    auto space = [&](int jt) {
        if (g.dim() == 1) return (1 - wx) * val(i0, 0, jt) + wx * val(i0 + 1, 0, jt);
        const auto [j0, wy] = locate(x[1], g.origin(1), g.h(1), g.n_cells(1));
        return (1 - wx) * (1 - wy) * val(i0, j0, jt) +
               wx * (1 - wy) * val(i0 + 1, j0, jt) +
               (1 - wx) * wy * val(i0, j0 + 1, jt) +
               wx * wy * val(i0 + 1, j0 + 1, jt);
    };
    const double a = space(it);
    if (wt == 0.0) return a;
    return (1 - wt) * a + wt * space(it + 1);
}

}  // namespace

double weiss_energy(const ScalarField& u, const ScalarField& f,
                    const SpacePoint& x_star, double t_star, double tau,
                    const WeissSettings& settings) {
    const Grid& g = u.grid();
    const TimeGrid& tg = u.time_grid();
    const int n = g.dim();
    if (!(tau > 0.0)) throw std::invalid_argument("weiss_energy: tau must be > 0");

    // containment of {|x - x*| < tau} x (t* - 4 tau^2, t* - tau^2)
    for (int a = 0; a < n; ++a)
        if (x_star[a] - tau < g.origin(a) - 1e-12 ||
            x_star[a] + tau > g.origin(a) + g.extent(a) + 1e-12)
            throw std::invalid_argument(
                "weiss_energy: spatial region outside the domain");
    if (t_star - 4.0 * tau * tau < tg.t0 - 1e-12)
        throw std::invalid_argument("weiss_energy: time window outside the domain");

    const GradientField grad = build_gradient(u);

    // quadrature in rescaled coordinates x = x* + tau xi, t = t* - tau^2 sigma
    auto integrand = [&](const SpacePoint& xi, double sigma) {
        const SpacePoint xp{x_star[0] + tau * xi[0],
                            n == 2 ? x_star[1] + tau * xi[1] : 0.0};
        const double tp = t_star - tau * tau * sigma;
        const double uval = u.interpolate(xp, tp);
        const double fval = f.interpolate(xp, tp);
        double grad2 = 0.0;
        const double gx = interp_component(grad.gx, u, xp, tp);
        grad2 += gx * gx;
        if (n == 2) {
            const double gy = interp_component(grad.gy, u, xp, tp);
            grad2 += gy * gy;
        }
        const double xi2 = xi[0] * xi[0] + (n == 2 ? xi[1] * xi[1] : 0.0);
        const double kernel =
            std::pow(4.0 * M_PI * sigma, -0.5 * n) * std::exp(-xi2 / (4.0 * sigma));
        const double body =
            grad2 + 2.0 * fval * uval + uval * uval / (tp - t_star);
        return body * kernel;
    };

    const int nsig = settings.n_sigma;
    const int nxi = settings.n_xi;
    double total = 0.0;
    for (int ks = 0; ks <= nsig; ++ks) {
        const double sigma = 1.0 + 3.0 * ks / nsig;
        const double wsig = (ks == 0 || ks == nsig) ? 0.5 : 1.0;
        double slice = 0.0;
        if (n == 1) {
            for (int ki = 0; ki <= nxi; ++ki) {
                const double xi = -1.0 + 2.0 * ki / nxi;
                const double w = (ki == 0 || ki == nxi) ? 0.5 : 1.0;
                slice += w * integrand({xi, 0.0}, sigma);
            }
            slice *= 2.0 / nxi;
        } else {
            // polar rule: trapezoid in radius, periodic rectangle in angle
            const int nr = nxi, nth = nxi;
            for (int kr = 1; kr <= nr; ++kr) {
                const double r = static_cast<double>(kr) / nr;
                const double wr = (kr == nr) ? 0.5 : 1.0;
                double ring = 0.0;
                for (int kt = 0; kt < nth; ++kt) {
                    const double th = 2.0 * M_PI * kt / nth;
                    ring += integrand({r * std::cos(th), r * std::sin(th)}, sigma);
                }
                slice += wr * r * ring * (2.0 * M_PI / nth) * (1.0 / nr);
            }
        }
        total += wsig * slice * (3.0 / nsig);
    }
    // dx dt = tau^(n+2) dxi dsigma and the kernel contributes tau^-n;
    // together with the tau^-4 prefactor this leaves tau^-2
    return total / (tau * tau);
}

namespace {

// limit of a geometrically sampled sequence; Aitken delta-squared with a
// plain-tail fallback. The residual reports the remaining uncertainty: the
// acceleration step size when it fires, the raw tail drift when it does not.
std::pair<double, double> extrapolate_geometric(const std::vector<double>& w) {
    const std::size_t n = w.size();
    if (n < 3) {
        const double spread = n == 2 ? std::abs(w[1] - w[0]) : 0.0;
        return {w.back(), spread};
    }
    const double d1 = w[n - 2] - w[n - 3];
    const double d2 = w[n - 1] - w[n - 2];
    const double dd = d2 - d1;
    double limit = w[n - 1];
    double residual = std::abs(d2);
    if (std::abs(dd) > 1e-14 * std::max(1.0, std::abs(w[n - 1])) &&
        std::abs(d2) < std::abs(d1)) {
        // the sequence behaves geometrically: accelerate
        limit = w[n - 1] - d2 * d2 / dd;
        residual = std::abs(limit - w[n - 1]) * std::abs(d2 / (d1 - d2));
    }
    return {limit, residual};
}

std::vector<double> default_tau_sweep() {
    return {0.32, 0.2262741699796952, 0.16, 0.1131370849898476, 0.08};
}

// reference half-space field sampled fine enough for the A_n quadrature
void reference_half_space_field(int n, ScalarField& u, ScalarField& f) {
    const double half = 1.25;
    const int cells = n == 1 ? 2000 : 320;
    Grid g = n == 1 ? Grid::make1d(-half, 2 * half, cells)
                    : Grid::make(2, {-half, -half}, {2 * half, 2 * half},
                                 {cells, cells});
    TimeGrid tg = TimeGrid::make(-0.48, 0.06, 8);
    u = ScalarField::sample(
        g, tg,
        [](const SpacePoint& x, double) {
            return x[0] > 0.0 ? 0.5 * x[0] * x[0] : 0.0;
        },
        "u0");
    f = ScalarField::sample(g, tg, [](const SpacePoint&, double) { return 1.0; },
                            "f");
}

}  // namespace

double compute_A_n(int n, const WeissSettings& settings, WeissValue* detail) {
    if (n != 1 && n != 2)
        throw std::invalid_argument("compute_A_n: n must be 1 or 2");
    ScalarField u, f;
    reference_half_space_field(n, u, f);

    WeissValue wv;
    wv.x_star = {0.0, 0.0};
    wv.t_star = 0.0;
    wv.tau_values = default_tau_sweep();
    for (double tau : wv.tau_values)
        wv.W_values.push_back(weiss_energy(u, f, {0.0, 0.0}, 0.0, tau, settings));
    auto [limit, residual] = extrapolate_geometric(wv.W_values);
    wv.extrapolated_limit = limit;
    wv.extrapolation_residual = residual;
    wv.A_n = limit;
    wv.ratio = 1.0;

    if (!(limit > 0.0) || residual > 0.05 * std::abs(limit)) {
        std::string seq;
        for (double v : wv.W_values) seq += std::to_string(v) + " ";
        throw std::runtime_error(
            "compute_A_n: tau extrapolation did not settle; W sequence: " + seq);
    }
    if (detail) *detail = wv;
    return limit;
}

ClassifyResult classify_point(const ScalarField& u, const ScalarField& f,
                              const SpacePoint& x_star, double t_star,
                              const ClassifySettings& settings) {
    ClassifyResult res;
    WeissValue& wv = res.weiss;
    wv.x_star = x_star;
    wv.t_star = t_star;
    wv.tau_values =
        settings.tau_values.empty() ? default_tau_sweep() : settings.tau_values;
    validate_rho_values(wv.tau_values);

    for (double tau : wv.tau_values)
        wv.W_values.push_back(
            weiss_energy(u, f, x_star, t_star, tau, settings.quad));
    auto [limit, residual] = extrapolate_geometric(wv.W_values);
    wv.extrapolated_limit = limit;
    wv.extrapolation_residual = residual;
    wv.A_n = settings.A_n > 0.0 ? settings.A_n
                                : compute_A_n(u.grid().dim(), settings.quad);
    wv.ratio = limit / wv.A_n;

    if (std::abs(wv.ratio - 1.0) < settings.theta)
        res.label = FbLabel::regular;
    else if (std::abs(wv.ratio - 2.0) < settings.theta)
        res.label = FbLabel::singular;
    else
        res.label = FbLabel::unresolved;
    return res;
}

SingularStructureReport singular_structure(const FreeBoundarySet& fb,
                                           const std::vector<BlowupFit>& fits,
                                           double h) {
    const auto pts = fb.all();
    if (pts.size() != fits.size())
        throw std::invalid_argument(
            "singular_structure: one fit per free boundary point required");

    SingularStructureReport rep;
    rep.total_points = pts.size();
    rep.per_slice_counts.assign(fb.per_slice.size(), 0);

    std::vector<std::size_t> singular_idx;
    std::vector<int> kern_dims;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const bool singular = pts[i].label == FbLabel::singular ||
                              (pts[i].label == FbLabel::unresolved &&
                               fits[i].kind == BlowupFit::Kind::polynomial);
        if (!singular) continue;
        singular_idx.push_back(i);
        if (pts[i].t_idx < static_cast<int>(rep.per_slice_counts.size()))
            rep.per_slice_counts[pts[i].t_idx]++;

        // kernel dimension of the fitted quadratic form
        const auto& M = fits[i].M;
        double e1 = M[0], e2 = 0.0;
        int dim = 1;
        if (M[1] != 0.0 || M[2] != 0.0) {
            dim = 2;
            const double tr = M[0] + M[1];
            const double det = M[0] * M[1] - M[2] * M[2];
            const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
            e1 = 0.5 * (tr + disc);
            e2 = 0.5 * (tr - disc);
        }
        const double emax = std::max(std::abs(e1), std::abs(e2));
        const double thresh = 1e-3 * std::max(emax, 1e-300);
        int kern = 0;
        if (std::abs(e1) < thresh) ++kern;
        if (dim == 2 && std::abs(e2) < thresh) ++kern;
        kern_dims.push_back(kern);
    }
    rep.singular_points = singular_idx.size();

    // group by kernel dimension and check isolation (3h in space, (3h)^2 in t)
    for (int k = 0; k <= 2; ++k) {
        SingularGroup grp;
        grp.kern_dim = k;
        for (std::size_t a = 0; a < singular_idx.size(); ++a) {
            if (kern_dims[a] != k) continue;
            const FbPoint& p = pts[singular_idx[a]];
            bool isolated = true;
            for (std::size_t b = 0; b < singular_idx.size(); ++b) {
                if (a == b) continue;
                const FbPoint& q = pts[singular_idx[b]];
                const double dx = std::hypot(p.x[0] - q.x[0], p.x[1] - q.x[1]);
                if (dx < 3.0 * h && std::abs(p.t - q.t) < 9.0 * h * h) {
                    isolated = false;
                    break;
                }
            }
            grp.points.push_back(p);
            grp.isolated.push_back(isolated);
        }
        if (!grp.points.empty()) rep.groups.push_back(std::move(grp));
    }
    return rep;
}

double fb_measure_estimate(const ScalarField& u, double eps) {
    const Grid& g = u.grid();
    const TimeGrid& tg = u.time_grid();
    std::size_t count = 0;
    for (int j = 0; j < tg.n_times(); ++j) {
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            const int nx = g.n_nodes(0);
            const int i = static_cast<int>(g.dim() == 1 ? n : n % nx);
            const int jj = static_cast<int>(g.dim() == 1 ? 0 : n / nx);
            const bool over = u.at(n, j) > eps;
            bool boundary_adjacent = false;
            auto check = [&](int a, int b) {
                if (a < 0 || a >= g.n_nodes(0)) return;
                if (g.dim() == 2 && (b < 0 || b >= g.n_nodes(1))) return;
                if (g.dim() == 1 && b != 0) return;
                if ((u.at_ij(a, b, j) > eps) != over) boundary_adjacent = true;
            };
            check(i - 1, jj);
            check(i + 1, jj);
            if (g.dim() == 2) {
                check(i, jj - 1);
                check(i, jj + 1);
            }
            if (boundary_adjacent) ++count;
        }
    }
    return static_cast<double>(count) * std::pow(g.h_max(), g.dim() + 1);
}

}  // namespace porosim
