#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "porosim/grid.hpp"

namespace porosim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/**
 * Parameters of the traveling electromagnetic field wave and the charge
 * carriers it acts on. SI units throughout.
 *
 * The flux density is B(x,t) = b_hat * cos(k_vec.x - |k_vec| v t) + b_dc;
 * the amplitude direction is fixed, the cosine scales its magnitude.
 */
struct WaveForcingParams {
    Vec3 b_hat;           // flux density amplitude [T]
    Vec3 k_vec;           // wave vector [1/m]
    double v = 0.0;       // propagation speed along k_vec/|k_vec| [m/s]
    Vec3 b_dc;            // background flux density [T]
    Vec3 e0;              // background electric field [V/m], zero by default
    double q = 0.0;       // total charge acted upon [C]; negative for lipid heads
    double gamma = 0.0;   // friction coefficient [kg/s]
    double f_osc = 0.0;   // oscillation frequency [Hz]

    double omega() const { return 2.0 * M_PI * f_osc; }
    Vec3 wave_dir() const;
    Vec3 velocity() const { return wave_dir() * v; }
    void validate() const;
};

/// Inputs of the order-of-magnitude force/energy table.
struct ChargeScaleParams {
    double charges_per_area = 1e7;       // surplus charges per nm^2
    double dimple_area = 100.0;          // nm^2
    double energy_per_molecule = 1e-19;  // J
    double characteristic_length = 1e-8; // m
    double dimple_mass = 1e-21;          // kg
    double g = 9.8;                      // m/s^2

    void validate() const;
};

struct ScaleReport {
    double carriers = 0.0;
    double per_molecule_force = 0.0;  // N
    double total_force = 0.0;         // N
    double gravity_force = 0.0;       // N
};

enum class ForcingMode { analytic_wave, tabulated };

/**
 * Recipe for the scalar source term of the membrane equations.
 *
 * analytic_wave: the normal projection of the Lorentz force divided by
 * reference_area. Positive values push the membrane toward the vesicle
 * (grow u). tabulated: a stored field resampled onto the target grid.
 *
 * The scale fields are populated by solver::normalize so the same spec can
 * be evaluated in normalized coordinates.
 */
struct ForcingSpec {
    ForcingMode mode = ForcingMode::tabulated;
    WaveForcingParams wave;
    Vec3 normal_dir{0.0, 0.0, 1.0};
    double reference_area = 1e-16;  // m^2; dimple-top area by default
    std::shared_ptr<const ScalarField> table;

    double space_scale = 1.0;
    double time_scale = 1.0;
    double value_scale = 1.0;

    void validate() const;
    /// Point evaluation (coordinates in the spec's own unit system).
    double operator()(const SpacePoint& x, double t) const;
};

ForcingSpec wave_forcing(const WaveForcingParams& p, Vec3 normal_dir,
                         double reference_area);
ForcingSpec tabulated_forcing(ScalarField table);
/// Constant source over a generous bounding box; resamples onto any grid
/// contained in [-box, box]^dim x [t_lo, t_hi].
ForcingSpec constant_forcing(double value, double box = 64.0,
                             double t_lo = -64.0, double t_hi = 64.0);

Vec3 b_field(const Vec3& x, double t, const WaveForcingParams& p);
Vec3 e_field(const Vec3& x, double t, const WaveForcingParams& p);
Vec3 lorentz_force(const WaveForcingParams& p, const Vec3& x, double t);

/// Sample the forcing spec on a grid.
ScalarField forcing_density(const ForcingSpec& spec, const Grid& grid,
                            const TimeGrid& time_grid);

struct AdmissibilityReport {
    double delta0 = 0.0;       // min of f over all samples
    double holder_const = 0.0; // max sampled pair quotient
    bool ok = false;
};

/**
 * Numerical spot-check of the obstacle-problem conditions on the datum f:
 * non-degeneracy f > delta0 > 0 and Hoelder continuity with exponent alpha.
 * Pairs are enumerated exhaustively up to max_pairs samples, then by a
 * seeded stratified draw.
 */
AdmissibilityReport check_admissible(const ScalarField& f, double alpha,
                                     std::size_t max_pairs = 10000,
                                     unsigned long long seed = 0x9E3779B9ull);

/// X_C = 1/(omega C). Rejects non-positive inputs.
double capacitive_reactance(double omega, double capacitance);

/// Cell cross-section regions as seen by electron microscopy.
enum class MembraneRegion {
    D0,  // amorphous outside-cell neighborhood
    D1,  // plasma membrane (the dimple forms here)
    D2,  // cytosol
    D3,  // vesicle membrane
    D4,  // vesicle lumen
};

/// Reactance model per region: D0 and D2 carry the zero constant, D1 the
/// variable 1/(omega C). The vesicle regions are not modeled (the vesicle is
/// treated as rigid) and are rejected.
double region_reactance(MembraneRegion region, double omega, double capacitance);

ScaleReport scale_report(const ChargeScaleParams& p);

}  // namespace porosim
