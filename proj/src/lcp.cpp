#include "porosim/lcp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace porosim {

double LcpSystem::row_apply(const std::vector<double>& u, std::size_t i) const {
    double s = diag[i] * u[i];
    for (const auto& [j, a] : off[i]) s += a * u[j];
    return s;
}

double LcpSystem::complementarity_residual(const std::vector<double>& u) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        const double w = row_apply(u, i) - rhs[i];
        worst = std::max(worst, std::abs(std::min(u[i], w)));
    }
    return worst;
}

void LcpSystem::validate() const {
    if (off.size() != diag.size() || rhs.size() != diag.size())
        throw std::invalid_argument("LcpSystem: inconsistent sizes");
    for (std::size_t i = 0; i < size(); ++i) {
        if (!(diag[i] > 0.0))
            throw std::invalid_argument("LcpSystem: diagonal must be positive");
        double s = 0.0;
        for (const auto& [j, a] : off[i]) {
            if (j < 0 || static_cast<std::size_t>(j) >= size())
                throw std::invalid_argument("LcpSystem: column out of range");
            s += std::abs(a);
        }
        if (s >= diag[i])
            throw std::invalid_argument("LcpSystem: row not strictly diagonally dominant");
    }
}

namespace {

PsorResult relax(const LcpSystem& sys, const std::vector<double>& u0,
                 const PsorSettings& st, bool project) {
    const std::size_t n = sys.size();
    PsorResult res;
    res.u = u0;
    res.u.resize(n, 0.0);
    if (project)
        for (double& v : res.u) v = std::max(v, 0.0);

    // tolerance scaled by the problem's magnitude
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        scale = std::max(scale, std::abs(sys.rhs[i]) / sys.diag[i]);
    const double tol = st.tol * scale;

    for (int it = 1; it <= st.max_iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = sys.rhs[i];
            for (const auto& [j, a] : sys.off[i]) s -= a * res.u[j];
            const double gs = s / sys.diag[i];
            double v = res.u[i] + st.omega * (gs - res.u[i]);
            if (project) v = std::max(v, 0.0);
            res.u[i] = v;
        }
        double r = 0.0;
        if (project) {
            r = sys.complementarity_residual(res.u);
        } else {
            for (std::size_t i = 0; i < n; ++i)
                r = std::max(r, std::abs(sys.row_apply(res.u, i) - sys.rhs[i]));
        }
        res.iterations = it;
        res.residual = r;
        if (r <= tol) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

}  // namespace

PsorResult psor_solve(const LcpSystem& sys, const std::vector<double>& u0,
                      const PsorSettings& settings) {
    return relax(sys, u0, settings, true);
}

PsorResult sor_solve(const LcpSystem& sys, const std::vector<double>& u0,
                     const PsorSettings& settings) {
    return relax(sys, u0, settings, false);
}

}  // namespace porosim
