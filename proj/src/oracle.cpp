#include "porosim/oracle.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

namespace porosim {

ExactSolution exact_half_space(const std::array<double, 2>& e, int dim) {
    const double norm = std::sqrt(e[0] * e[0] + e[1] * e[1]);
    if (std::abs(norm - 1.0) > 1e-9)
        throw std::invalid_argument("exact_half_space: e must be a unit vector");
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("exact_half_space: dim must be 1 or 2");

    ExactSolution s;
    s.kind = ExactSolution::Kind::half_space;
    s.description = "u = ((x.e)+)^2/2, f = 1";
    s.u = [e](const SpacePoint& x, double) {
        const double p = x[0] * e[0] + x[1] * e[1];
        return p > 0.0 ? 0.5 * p * p : 0.0;
    };
    s.f = [](const SpacePoint&, double) { return 1.0; };
    return s;
}

ExactSolution exact_polynomial(double m, const std::array<double, 3>& M, int dim) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("exact_polynomial: dim must be 1 or 2");
    const double mxx = M[0], myy = M[1], mxy = M[2];
    const double trace = dim == 1 ? mxx : mxx + myy;
    if (std::abs(2.0 * trace - m - 1.0) > 1e-12)
        throw std::invalid_argument(
            "exact_polynomial: profile must satisfy 2 Tr(M) - m = 1, got 2*" +
            std::to_string(trace) + " - " + std::to_string(m));
    // eigenvalues of the symmetric form must be nonnegative for u >= 0
    double min_eig = mxx;
    if (dim == 2) {
        const double tr = mxx + myy;
        const double det = mxx * myy - mxy * mxy;
        min_eig = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
    }
    if (min_eig < -1e-14)
        throw std::invalid_argument(
            "exact_polynomial: M has a negative eigenvalue; u >= 0 fails");
    if (m > 1e-14)
        throw std::invalid_argument(
            "exact_polynomial: m > 0 makes u negative for t < 0");

    ExactSolution s;
    s.kind = ExactSolution::Kind::polynomial;
    s.description = "u = m t + x.M.x, f = 1";
    s.u = [m, mxx, myy, mxy, dim](const SpacePoint& x, double t) {
        double q = mxx * x[0] * x[0];
        if (dim == 2) q += myy * x[1] * x[1] + 2.0 * mxy * x[0] * x[1];
        return m * t + q;
    };
    s.f = [](const SpacePoint&, double) { return 1.0; };
    return s;
}

ExactSolution exact_radial_stationary(double r0, double f_const, int radial_cells,
                                      double r_max) {
    if (!(r0 > 0.0) || !(r_max > r0))
        throw std::invalid_argument("exact_radial_stationary: need 0 < r0 < r_max");
    // integrate u'' + u'/r = f outward from u(r0) = u'(r0) = 0 (RK4)
    auto table = std::make_shared<std::vector<double>>(radial_cells + 1, 0.0);
    const double hr = (r_max - r0) / radial_cells;
    double u = 0.0, v = 0.0;  // v = u'
    (*table)[0] = 0.0;
    auto acc = [f_const](double r, double vv) { return f_const - vv / r; };
    for (int i = 0; i < radial_cells; ++i) {
        const double r = r0 + i * hr;
        const double k1u = v, k1v = acc(r, v);
        const double k2u = v + 0.5 * hr * k1v, k2v = acc(r + 0.5 * hr, v + 0.5 * hr * k1v);
        const double k3u = v + 0.5 * hr * k2v, k3v = acc(r + 0.5 * hr, v + 0.5 * hr * k2v);
        const double k4u = v + hr * k3v, k4v = acc(r + hr, v + hr * k3v);
        u += hr / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        v += hr / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        (*table)[i + 1] = u;
    }

    ExactSolution s;
    s.kind = ExactSolution::Kind::radial_2d_stationary;
    s.description = "stationary radial profile, contact disk of radius r0";
    s.u = [table, r0, hr, radial_cells](const SpacePoint& x, double) {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
        if (r <= r0) return 0.0;
        const double sidx = (r - r0) / hr;
        if (sidx >= radial_cells)
            throw std::out_of_range("exact_radial_stationary: r beyond table");
        const int i = static_cast<int>(sidx);
        const double w = sidx - i;
        return (1.0 - w) * (*table)[i] + w * (*table)[i + 1];
    };
    s.f = [f_const](const SpacePoint&, double) { return f_const; };
    return s;
}

namespace {

// dense Gaussian elimination with partial pivoting, for tiny subsystems
bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return true;
}

}  // namespace

std::vector<double> brute_force_lcp(const LcpSystem& system, int max_dim) {
    const int n = static_cast<int>(system.size());
    if (n > max_dim)
        throw std::invalid_argument("brute_force_lcp: dimension " +
                                    std::to_string(n) + " exceeds the cap of " +
                                    std::to_string(max_dim));
    system.validate();

    // dense copy of A
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        A[i][i] = system.diag[i];
        for (const auto& [j, a] : system.off[i]) A[i][j] += a;
    }

    double scale = 1.0;
    for (int i = 0; i < n; ++i)
        scale = std::max(scale, std::abs(system.rhs[i]) / system.diag[i]);
    const double tol = 1e-9 * scale;

    std::vector<double> best;
    double best_defect = 1e300;
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
        // mask bit set: node is free (u > 0 candidate); clear: pinned to 0
        std::vector<int> free_idx;
        for (int i = 0; i < n; ++i)
            if (mask & (1ul << i)) free_idx.push_back(i);

        std::vector<double> u(n, 0.0);
        if (!free_idx.empty()) {
            const int k = static_cast<int>(free_idx.size());
            std::vector<std::vector<double>> As(k, std::vector<double>(k));
            std::vector<double> bs(k);
            for (int r = 0; r < k; ++r) {
                bs[r] = system.rhs[free_idx[r]];
                for (int c = 0; c < k; ++c) As[r][c] = A[free_idx[r]][free_idx[c]];
            }
            std::vector<double> us;
            if (!solve_dense(As, bs, us)) continue;
            for (int r = 0; r < k; ++r) u[free_idx[r]] = us[r];
        }

        bool feasible = true;
        double defect = 0.0;
        for (int i = 0; i < n && feasible; ++i) {
            double w = -system.rhs[i];
            for (int j = 0; j < n; ++j) w += A[i][j] * u[j];
            if (u[i] < -tol || w < -tol) feasible = false;
            defect = std::max(defect, std::abs(std::min(u[i], w)));
        }
        if (feasible && defect < best_defect) {
            best_defect = defect;
            best = u;
        }
    }
    if (best.empty())
        throw std::runtime_error(
            "brute_force_lcp: no feasible active set; assembly is inconsistent");
    return best;
}

LcpSystem random_spd_lcp(unsigned long long seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_real_distribution<double> margin(0.1, 1.1);
    std::uniform_real_distribution<double> pick(0.0, 1.0);

    LcpSystem sys;
    sys.diag.assign(n, 0.0);
    sys.off.resize(n);
    sys.rhs.resize(n);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (pick(rng) < 0.5) {
                const double a = coeff(rng);
                dense[i][j] = dense[j][i] = a;
            }
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i && dense[i][j] != 0.0) {
                sys.off[i].emplace_back(j, dense[i][j]);
                row_sum += std::abs(dense[i][j]);
            }
        sys.diag[i] = row_sum + margin(rng);
        sys.rhs[i] = coeff(rng);
    }
    return sys;
}

namespace {

double composite(const std::function<double(double)>& fn, double a, double b,
                 int n_panels, QuadratureRule rule) {
    if (n_panels < 1) throw std::invalid_argument("quadrature: need >= 1 panel");
    if (rule == QuadratureRule::simpson && n_panels % 2 != 0) ++n_panels;
    const double h = (b - a) / n_panels;
    double s = 0.0;
    if (rule == QuadratureRule::trapezoid) {
        s = 0.5 * (fn(a) + fn(b));
        for (int i = 1; i < n_panels; ++i) s += fn(a + i * h);
        return s * h;
    }
    s = fn(a) + fn(b);
    for (int i = 1; i < n_panels; ++i)
        s += fn(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

double reference_quadrature(const std::function<double(double)>& fn, double a,
                            double b, int n_panels, QuadratureRule rule) {
    return composite(fn, a, b, n_panels, rule);
}

double reference_quadrature_2d(const std::function<double(double, double)>& fn,
                               double a0, double b0, double a1, double b1,
                               int n_panels, QuadratureRule rule) {
    return composite(
        [&](double x) {
            return composite([&](double y) { return fn(x, y); }, a1, b1, n_panels,
                             rule);
        },
        a0, b0, n_panels, rule);
}

}  // namespace porosim
