#include "porosim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace porosim {

Grid Grid::make(int dim, SpacePoint origin, SpacePoint extent,
                std::array<int, 2> n_cells, UnitSystem units) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("Grid: dim must be 1 or 2, got " +
                                    std::to_string(dim));
    Grid g;
    g.dim_ = dim;
    g.units_ = units;
    for (int a = 0; a < dim; ++a) {
        if (!(extent[a] > 0.0))
            throw std::invalid_argument("Grid: extent must be positive on axis " +
                                        std::to_string(a));
        if (n_cells[a] < 2)
            throw std::invalid_argument("Grid: need at least 2 cells on axis " +
                                        std::to_string(a));
        g.origin_[a] = origin[a];
        g.n_cells_[a] = n_cells[a];
        g.h_[a] = extent[a] / n_cells[a];
        // keep extent = n_cells * h bit-exact
        g.extent_[a] = g.h_[a] * n_cells[a];
    }
    if (dim == 1) {
        g.origin_[1] = 0.0;
        g.extent_[1] = 0.0;
        g.n_cells_[1] = 0;
        g.h_[1] = 0.0;
    }
    return g;
}

Grid Grid::make1d(double origin, double extent, int n_cells, UnitSystem units) {
    return make(1, {origin, 0.0}, {extent, 0.0}, {n_cells, 0}, units);
}

double Grid::h_max() const {
    return dim_ == 1 ? h_[0] : std::max(h_[0], h_[1]);
}

std::size_t Grid::node_count() const {
    std::size_t n = static_cast<std::size_t>(n_nodes(0));
    if (dim_ == 2) n *= static_cast<std::size_t>(n_nodes(1));
    return n;
}

std::size_t Grid::node_index(int i, int j) const {
    if (dim_ == 1) return static_cast<std::size_t>(i);
    return static_cast<std::size_t>(j) * n_nodes(0) + i;
}

SpacePoint Grid::node_coords(std::size_t node) const {
    if (dim_ == 1) return {coord(0, static_cast<int>(node)), 0.0};
    const int nx = n_nodes(0);
    const int i = static_cast<int>(node % nx);
    const int j = static_cast<int>(node / nx);
    return {coord(0, i), coord(1, j)};
}

bool Grid::contains(const SpacePoint& x, double slack) const {
    for (int a = 0; a < dim_; ++a) {
        if (x[a] < origin_[a] - slack || x[a] > origin_[a] + extent_[a] + slack)
            return false;
    }
    return true;
}

bool Grid::operator==(const Grid& other) const {
    return dim_ == other.dim_ && origin_ == other.origin_ &&
           extent_ == other.extent_ && n_cells_ == other.n_cells_ &&
           units_ == other.units_;
}

TimeGrid TimeGrid::make(double t0, double dt, int n_steps) {
    if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
    if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
    return TimeGrid{t0, dt, n_steps};
}

ScalarField::ScalarField(Grid grid, TimeGrid time_grid, std::string name)
    : grid_(grid),
      time_grid_(time_grid),
      values_(grid.node_count() * static_cast<std::size_t>(time_grid.n_times()),
              0.0),
      name_(std::move(name)) {}

double& ScalarField::at(std::size_t node, int t_idx) {
    return values_[static_cast<std::size_t>(t_idx) * grid_.node_count() + node];
}

double ScalarField::at(std::size_t node, int t_idx) const {
    return values_[static_cast<std::size_t>(t_idx) * grid_.node_count() + node];
}

double& ScalarField::at_ij(int i, int j, int t_idx) {
    return at(grid_.node_index(i, j), t_idx);
}

double ScalarField::at_ij(int i, int j, int t_idx) const {
    return at(grid_.node_index(i, j), t_idx);
}

double* ScalarField::slice(int t_idx) {
    return values_.data() + static_cast<std::size_t>(t_idx) * grid_.node_count();
}

const double* ScalarField::slice(int t_idx) const {
    return values_.data() + static_cast<std::size_t>(t_idx) * grid_.node_count();
}

std::vector<double> ScalarField::slice_copy(int t_idx) const {
    const double* p = slice(t_idx);
    return std::vector<double>(p, p + grid_.node_count());
}

void ScalarField::set_slice(int t_idx, const std::vector<double>& v) {
    if (v.size() != grid_.node_count())
        throw std::invalid_argument("set_slice: size mismatch");
    std::copy(v.begin(), v.end(), slice(t_idx));
}

namespace {

// Locate x on axis: cell index and barycentric weight, clamped to the grid.
void locate(double x, double origin, double h, int n_cells, int& i0, double& w) {
    const double s = (x - origin) / h;
    const double eps = 1e-9;
    if (s < -eps || s > n_cells + eps)
        throw std::out_of_range("interpolate: point outside grid");
    double sc = std::clamp(s, 0.0, static_cast<double>(n_cells));
    i0 = std::min(static_cast<int>(sc), n_cells - 1);
    w = sc - i0;
}

}  // namespace

double ScalarField::interpolate(const SpacePoint& x, double t) const {
    int it;
    double wt;
    locate(t, time_grid_.t0, time_grid_.dt, time_grid_.n_steps, it, wt);

    int i0;
    double wx;
    locate(x[0], grid_.origin(0), grid_.h(0), grid_.n_cells(0), i0, wx);

    auto space_interp = [&](int tj) -> double {
        if (grid_.dim() == 1)
            return (1 - wx) * at_ij(i0, 0, tj) + wx * at_ij(i0 + 1, 0, tj);
        int j0;
        double wy;
        locate(x[1], grid_.origin(1), grid_.h(1), grid_.n_cells(1), j0, wy);
        const double v00 = at_ij(i0, j0, tj), v10 = at_ij(i0 + 1, j0, tj);
        const double v01 = at_ij(i0, j0 + 1, tj), v11 = at_ij(i0 + 1, j0 + 1, tj);
        return (1 - wx) * (1 - wy) * v00 + wx * (1 - wy) * v10 +
               (1 - wx) * wy * v01 + wx * wy * v11;
    };

    const double a = space_interp(it);
    if (wt == 0.0) return a;
    return (1 - wt) * a + wt * space_interp(it + 1);
}

double ScalarField::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

double ScalarField::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
}

std::vector<std::pair<std::size_t, int>>
cylinder_nodes(const ScalarField& field, const ParabolicCylinder& cyl) {
    const Grid& g = field.grid();
    const TimeGrid& tg = field.time_grid();
    const double rho = cyl.radius;
    if (!(rho > 0.0))
        throw std::invalid_argument("cylinder_nodes: radius must be positive");

    const double t_lo = cyl.center_t - rho * rho;
    const double slack = 1e-12 * (1.0 + std::abs(rho));
    for (int a = 0; a < g.dim(); ++a) {
        if (cyl.center_x[a] - rho < g.origin(a) - slack ||
            cyl.center_x[a] + rho > g.origin(a) + g.extent(a) + slack)
            throw std::invalid_argument(
                "cylinder_nodes: cylinder spills outside the space domain");
    }
    if (t_lo < tg.t0 - slack || cyl.center_t > tg.t_end() + slack)
        throw std::invalid_argument(
            "cylinder_nodes: cylinder spills outside the time domain");

    // index windows keep the scan local to the cylinder
    const double rho2 = rho * rho;
    auto axis_range = [&](int a) {
        const int lo = static_cast<int>(
            std::ceil((cyl.center_x[a] - rho - g.origin(a)) / g.h(a) - 1e-12));
        const int hi = static_cast<int>(
            std::floor((cyl.center_x[a] + rho - g.origin(a)) / g.h(a) + 1e-12));
        return std::pair<int, int>(std::max(lo, 0), std::min(hi, g.n_cells(a)));
    };
    const auto [ix_lo, ix_hi] = axis_range(0);
    const auto [iy_lo, iy_hi] =
        g.dim() == 2 ? axis_range(1) : std::pair<int, int>(0, 0);

    std::vector<std::pair<std::size_t, int>> out;
    for (int j = 0; j < tg.n_times(); ++j) {
        const double t = tg.time(j);
        if (!(t > t_lo && t < cyl.center_t)) continue;  // open interval
        for (int jy = iy_lo; jy <= iy_hi; ++jy)
            for (int ix = ix_lo; ix <= ix_hi; ++ix) {
                double d2 = 0.0;
                const double dx = g.coord(0, ix) - cyl.center_x[0];
                d2 += dx * dx;
                if (g.dim() == 2) {
                    const double dy = g.coord(1, jy) - cyl.center_x[1];
                    d2 += dy * dy;
                }
                if (d2 < rho2) out.emplace_back(g.node_index(ix, jy), j);
            }
    }
    if (out.empty())
        throw std::invalid_argument(
            "cylinder_nodes: no time sample fits in (t0 - rho^2, t0); "
            "rho^2 is below the time resolution");
    return out;
}

double sup_on_cylinder(const ScalarField& u, const ParabolicCylinder& cyl) {
    const auto nodes = cylinder_nodes(u, cyl);
    double m = u.at(nodes[0].first, nodes[0].second);
    for (const auto& [n, j] : nodes) m = std::max(m, u.at(n, j));
    return m;
}

}  // namespace porosim
