#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace porosim {

enum class UnitSystem { physical, normalized };

/// Point in space; y is unused (zero) for 1D grids.
using SpacePoint = std::array<double, 2>;

/**
 * Uniform Cartesian node grid in 1 or 2 space dimensions.
 *
 * Nodes per axis = n_cells + 1, spacing h = extent / n_cells.
 * The stored extent is n_cells * h exactly.
 */
class Grid {
public:
    static Grid make(int dim, SpacePoint origin, SpacePoint extent,
                     std::array<int, 2> n_cells,
                     UnitSystem units = UnitSystem::normalized);

    /// 1D convenience.
    static Grid make1d(double origin, double extent, int n_cells,
                       UnitSystem units = UnitSystem::normalized);

    int dim() const { return dim_; }
    UnitSystem unit_system() const { return units_; }
    double origin(int axis) const { return origin_[axis]; }
    double extent(int axis) const { return extent_[axis]; }
    int n_cells(int axis) const { return n_cells_[axis]; }
    double h(int axis) const { return h_[axis]; }
    double h_max() const;

    int n_nodes(int axis) const { return n_cells_[axis] + 1; }
    std::size_t node_count() const;

    double coord(int axis, int i) const { return origin_[axis] + i * h_[axis]; }

    /// Flat node index; j ignored in 1D.
    std::size_t node_index(int i, int j = 0) const;
    SpacePoint node_coords(std::size_t node) const;

    bool contains(const SpacePoint& x, double slack = 0.0) const;

    bool operator==(const Grid& other) const;

private:
    int dim_ = 1;
    SpacePoint origin_{0.0, 0.0};
    SpacePoint extent_{1.0, 0.0};
    std::array<int, 2> n_cells_{2, 0};
    SpacePoint h_{0.5, 0.0};
    UnitSystem units_ = UnitSystem::normalized;
};

/// Uniform time axis: times are t0 + j*dt, j = 0..n_steps.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    int n_steps = 1;

    static TimeGrid make(double t0, double dt, int n_steps);

    int n_times() const { return n_steps + 1; }
    double time(int j) const { return t0 + j * dt; }
    double t_end() const { return t0 + n_steps * dt; }

    bool operator==(const TimeGrid& other) const {
        return t0 == other.t0 && dt == other.dt && n_steps == other.n_steps;
    }
};

/**
 * Scalar quantity sampled on every (node, time) pair of a space-time grid.
 * Storage is slice-major: values[t * node_count + node].
 */
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(Grid grid, TimeGrid time_grid, std::string name = "u");

    template <class Fn>  // Fn(SpacePoint, double t) -> double
    static ScalarField sample(const Grid& g, const TimeGrid& tg, Fn&& fn,
                              std::string name = "u") {
        ScalarField f(g, tg, std::move(name));
        for (int j = 0; j < tg.n_times(); ++j) {
            const double t = tg.time(j);
            for (std::size_t n = 0; n < g.node_count(); ++n)
                f.at(n, j) = fn(g.node_coords(n), t);
        }
        return f;
    }

    const Grid& grid() const { return grid_; }
    const TimeGrid& time_grid() const { return time_grid_; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    double& at(std::size_t node, int t_idx);
    double at(std::size_t node, int t_idx) const;
    double& at_ij(int i, int j, int t_idx);
    double at_ij(int i, int j, int t_idx) const;

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    /// Pointer to the first value of time slice t_idx (node_count() doubles).
    double* slice(int t_idx);
    const double* slice(int t_idx) const;
    std::vector<double> slice_copy(int t_idx) const;
    void set_slice(int t_idx, const std::vector<double>& v);

    /// Space-time multilinear interpolation. Throws outside the domain.
    double interpolate(const SpacePoint& x, double t) const;

    double max_value() const;
    double min_value() const;
    bool all_finite() const;

private:
    Grid grid_;
    TimeGrid time_grid_;
    std::vector<double> values_;
    std::string name_ = "u";
};

/// Q_rho(z0) = {|x - x0| < rho} x (t0 - rho^2, t0). Time interval open.
struct ParabolicCylinder {
    SpacePoint center_x{0.0, 0.0};
    double center_t = 0.0;
    double radius = 0.0;
};

/// All (node, time-index) samples inside Q_rho(z0).
/// Rejects cylinders not contained in the field's space-time domain and
/// time windows too short to hold a single sample.
std::vector<std::pair<std::size_t, int>>
cylinder_nodes(const ScalarField& field, const ParabolicCylinder& cyl);

double sup_on_cylinder(const ScalarField& u, const ParabolicCylinder& cyl);

}  // namespace porosim
