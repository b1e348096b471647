#include "porosim/forcing.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace porosim {

Vec3 WaveForcingParams::wave_dir() const {
    const double k = k_vec.norm();
    return {k_vec.x / k, k_vec.y / k, k_vec.z / k};
}

void WaveForcingParams::validate() const {
    if (!(k_vec.norm() > 0.0))
        throw std::invalid_argument("WaveForcingParams: |k_vec| must be > 0");
    if (v < 0.0)
        throw std::invalid_argument("WaveForcingParams: v must be >= 0");
}

void ChargeScaleParams::validate() const {
    if (charges_per_area < 0.0 || !(dimple_area > 0.0) ||
        !(energy_per_molecule > 0.0) || !(characteristic_length > 0.0) ||
        !(dimple_mass > 0.0) || !(g > 0.0))
        throw std::invalid_argument(
            "ChargeScaleParams: lengths, masses and energies must be positive");
}

void ForcingSpec::validate() const {
    if (mode == ForcingMode::analytic_wave) {
        if (table)
            throw std::invalid_argument("ForcingSpec: wave mode carries no table");
        wave.validate();
        if (!(reference_area > 0.0))
            throw std::invalid_argument("ForcingSpec: reference_area must be > 0");
        const double n = normal_dir.norm();
        if (std::abs(n - 1.0) > 1e-9)
            throw std::invalid_argument("ForcingSpec: normal_dir must be a unit vector");
    } else {
        if (!table)
            throw std::invalid_argument("ForcingSpec: tabulated mode needs a table");
    }
}

double ForcingSpec::operator()(const SpacePoint& x, double t) const {
    const SpacePoint xp{x[0] * space_scale, x[1] * space_scale};
    const double tp = t * time_scale;
    if (mode == ForcingMode::analytic_wave) {
        const Vec3 pos{xp[0], xp[1], 0.0};
        const Vec3 fl = lorentz_force(wave, pos, tp);
        return fl.dot(normal_dir) / reference_area / value_scale;
    }
    try {
        return table->interpolate(xp, tp) / value_scale;
    } catch (const std::out_of_range&) {
        throw std::invalid_argument(
            "ForcingSpec: tabulated forcing would need extrapolation at (" +
            std::to_string(xp[0]) + ", " + std::to_string(tp) + ")");
    }
}

ForcingSpec wave_forcing(const WaveForcingParams& p, Vec3 normal_dir,
                         double reference_area) {
    ForcingSpec s;
    s.mode = ForcingMode::analytic_wave;
    s.wave = p;
    s.normal_dir = normal_dir;
    s.reference_area = reference_area;
    s.validate();
    return s;
}

ForcingSpec tabulated_forcing(ScalarField table) {
    ForcingSpec s;
    s.mode = ForcingMode::tabulated;
    s.table = std::make_shared<ScalarField>(std::move(table));
    s.validate();
    return s;
}

ForcingSpec constant_forcing(double value, double box, double t_lo, double t_hi) {
    Grid g = Grid::make(2, {-box, -box}, {2 * box, 2 * box}, {2, 2});
    TimeGrid tg = TimeGrid::make(t_lo, (t_hi - t_lo) / 2.0, 2);
    ScalarField f(g, tg, "f");
    std::fill(f.values().begin(), f.values().end(), value);
    ForcingSpec s = tabulated_forcing(std::move(f));
    return s;
}

Vec3 b_field(const Vec3& x, double t, const WaveForcingParams& p) {
    const double k = p.k_vec.norm();
    const double phase = p.k_vec.dot(x) - k * p.v * t;
    return p.b_hat * std::cos(phase) + p.b_dc;
}

Vec3 e_field(const Vec3& x, double t, const WaveForcingParams& p) {
    return p.velocity().cross(b_field(x, t, p));
}

Vec3 lorentz_force(const WaveForcingParams& p, const Vec3& x, double t) {
    const Vec3 vel = p.velocity();
    return p.q * p.e0 + p.q * vel.cross(b_field(x, t, p)) - p.gamma * vel;
}

ScalarField forcing_density(const ForcingSpec& spec, const Grid& grid,
                            const TimeGrid& time_grid) {
    spec.validate();
    if (spec.mode == ForcingMode::tabulated && spec.table->grid().dim() != 2 &&
        spec.table->grid().dim() != grid.dim())
        throw std::invalid_argument("forcing_density: table dimension mismatch");
    return ScalarField::sample(
        grid, time_grid, [&](const SpacePoint& x, double t) { return spec(x, t); },
        "f");
}

AdmissibilityReport check_admissible(const ScalarField& f, double alpha,
                                     std::size_t max_pairs,
                                     unsigned long long seed) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("check_admissible: alpha must lie in (0,1)");
    const Grid& g = f.grid();
    const TimeGrid& tg = f.time_grid();
    const std::size_t n_nodes = g.node_count();
    const std::size_t n_samples = n_nodes * static_cast<std::size_t>(tg.n_times());

    AdmissibilityReport rep;
    rep.delta0 = f.min_value();

    auto sample_coords = [&](std::size_t s, SpacePoint& x, double& t) {
        const std::size_t node = s % n_nodes;
        const int j = static_cast<int>(s / n_nodes);
        x = g.node_coords(node);
        t = tg.time(j);
    };
    auto quotient = [&](std::size_t a, std::size_t b) -> double {
        SpacePoint xa, xb;
        double ta, tb;
        sample_coords(a, xa, ta);
        sample_coords(b, xb, tb);
        double d2 = (ta - tb) * (ta - tb);
        for (int ax = 0; ax < g.dim(); ++ax)
            d2 += (xa[ax] - xb[ax]) * (xa[ax] - xb[ax]);
        if (d2 == 0.0) return 0.0;
        const double df = std::abs(f.values()[a] - f.values()[b]);
        return df / std::pow(d2, alpha / 2.0);
    };

    double hmax = 0.0;
    const std::size_t total_pairs = n_samples * (n_samples - 1) / 2;
    if (total_pairs <= max_pairs) {
        for (std::size_t a = 0; a < n_samples; ++a)
            for (std::size_t b = a + 1; b < n_samples; ++b)
                hmax = std::max(hmax, quotient(a, b));
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n_samples - 1);
        // stratified: every sample appears as the first element of some pairs
        const std::size_t per_anchor = std::max<std::size_t>(1, max_pairs / n_samples);
        for (std::size_t a = 0; a < n_samples; ++a)
            for (std::size_t r = 0; r < per_anchor; ++r) {
                std::size_t b = pick(rng);
                if (b != a) hmax = std::max(hmax, quotient(a, b));
            }
    }
    rep.holder_const = hmax;
    rep.ok = rep.delta0 > 0.0 && std::isfinite(hmax);
    return rep;
}

double capacitive_reactance(double omega, double capacitance) {
    if (!(omega > 0.0) || !(capacitance > 0.0))
        throw std::invalid_argument(
            "capacitive_reactance: omega and C must be positive");
    return 1.0 / (omega * capacitance);
}

double region_reactance(MembraneRegion region, double omega, double capacitance) {
    switch (region) {
        case MembraneRegion::D0:
        case MembraneRegion::D2:
            return 0.0;
        case MembraneRegion::D1:
            return capacitive_reactance(omega, capacitance);
        default:
            throw std::invalid_argument(
                "region_reactance: vesicle regions D3/D4 carry no reactance model");
    }
}

ScaleReport scale_report(const ChargeScaleParams& p) {
    p.validate();
    ScaleReport r;
    r.carriers = p.charges_per_area * p.dimple_area;
    r.per_molecule_force = p.energy_per_molecule / p.characteristic_length;
    r.total_force = r.carriers * r.per_molecule_force;
    r.gravity_force = p.dimple_mass * p.g;
    return r;
}

}  // namespace porosim
