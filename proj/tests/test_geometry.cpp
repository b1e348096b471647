#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "porosim/grid.hpp"

using namespace porosim;

TEST_CASE("grid construction and spacing") {
    const Grid g = Grid::make1d(0.0, 1.0, 10);
    CHECK(g.h(0) == doctest::Approx(0.1));
    CHECK(g.extent(0) == doctest::Approx(1.0));
    CHECK(g.n_nodes(0) == 11);

    const Grid g2 = Grid::make(2, {0.0, 0.0}, {1.0, 2.0}, {10, 20});
    CHECK(g2.h(0) == doctest::Approx(0.1));
    CHECK(g2.h(1) == doctest::Approx(0.1));
    CHECK(g2.node_count() == 11 * 21);

    CHECK_THROWS_AS(Grid::make(3, {0, 0}, {1, 1}, {4, 4}), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make1d(0.0, -1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make1d(0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("extent equals n_cells times h exactly") {
    // awkward spacings too
    for (double extent : {1.0, 0.3, 2.0 / 3.0, 1.7e-3}) {
        for (int nc : {2, 7, 50}) {
            const Grid g = Grid::make1d(-0.25, extent, nc);
            CHECK(g.extent(0) == nc * g.h(0));
        }
    }
}

TEST_CASE("index to coordinate round trip is exact") {
    const Grid g = Grid::make(2, {-1.0, 0.5}, {2.0, 1.0}, {7, 9});
    for (int j = 0; j < g.n_nodes(1); ++j)
        for (int i = 0; i < g.n_nodes(0); ++i) {
            const std::size_t n = g.node_index(i, j);
            const SpacePoint p = g.node_coords(n);
            CHECK(p[0] == g.coord(0, i));
            CHECK(p[1] == g.coord(1, j));
        }
}

TEST_CASE("time grid") {
    const TimeGrid tg = TimeGrid::make(0.0, 0.25, 4);
    CHECK(tg.n_times() == 5);
    CHECK(tg.time(4) == doctest::Approx(1.0));
    CHECK_THROWS_AS(TimeGrid::make(0.0, 0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::make(0.0, 0.1, 0), std::invalid_argument);
}

TEST_CASE("field sampling and interpolation") {
    const Grid g = Grid::make1d(0.0, 1.0, 20);
    const TimeGrid tg = TimeGrid::make(0.0, 0.1, 10);
    auto lin = [](const SpacePoint& x, double t) { return 2.0 * x[0] + 3.0 * t; };
    const ScalarField f = ScalarField::sample(g, tg, lin);

    // multilinear interpolation reproduces affine data exactly
    CHECK(f.interpolate({0.333, 0.0}, 0.47) ==
          doctest::Approx(lin({0.333, 0.0}, 0.47)).epsilon(1e-13));
    CHECK_THROWS_AS(f.interpolate({1.5, 0.0}, 0.5), std::out_of_range);
    CHECK(f.all_finite());
}

TEST_CASE("cylinder nodes: basic windows") {
    const Grid g = Grid::make1d(0.0, 1.0, 10);  // h = 0.1
    const TimeGrid tg = TimeGrid::make(0.0, 0.005, 20);  // up to t = 0.1
    const ScalarField u = ScalarField::sample(
        g, tg, [](const SpacePoint& x, double) { return x[0]; });

    const auto nodes = cylinder_nodes(u, {{0.5, 0.0}, 0.1, 0.2});
    for (const auto& [n, j] : nodes) {
        const double x = g.node_coords(n)[0];
        const double t = tg.time(j);
        CHECK(std::abs(x - 0.5) < 0.2);
        CHECK(t > 0.1 - 0.04);
        CHECK(t < 0.1);  // open at the top
    }
    CHECK(!nodes.empty());

    // rho^2 below dt: no time sample fits
    CHECK_THROWS_AS(cylinder_nodes(u, {{0.5, 0.0}, 0.1, 0.06}),
                    std::invalid_argument);
    // spilling outside the domain
    CHECK_THROWS_AS(cylinder_nodes(u, {{0.05, 0.0}, 0.1, 0.2}),
                    std::invalid_argument);
}

TEST_CASE("cylinder nodes monotone in rho") {
    const Grid g = Grid::make1d(-1.0, 2.0, 40);
    const TimeGrid tg = TimeGrid::make(0.0, 0.01, 50);
    const ScalarField u(g, tg);
    auto set_of = [&](double rho) {
        const auto v = cylinder_nodes(u, {{0.0, 0.0}, 0.5, rho});
        return std::set<std::pair<std::size_t, int>>(v.begin(), v.end());
    };
    const auto small = set_of(0.2), big = set_of(0.4);
    for (const auto& p : small) CHECK(big.count(p) == 1);
    CHECK(big.size() > small.size());
}

TEST_CASE("sup on cylinder") {
    const Grid g = Grid::make1d(-1.0, 2.0, 200);
    const TimeGrid tg = TimeGrid::make(0.0, 0.002, 100);
    const ScalarField zero(g, tg);
    CHECK(sup_on_cylinder(zero, {{0.0, 0.0}, 0.2, 0.15}) == 0.0);

    ScalarField c(g, tg);
    std::fill(c.values().begin(), c.values().end(), 3.5);
    CHECK(sup_on_cylinder(c, {{0.0, 0.0}, 0.2, 0.15}) == 3.5);

    // half-space profile: sup over Q_rho(0, T) is (rho - delta)^2/2 with
    // delta < h from node placement
    const ScalarField hs = ScalarField::sample(
        g, tg, [](const SpacePoint& x, double) {
            return x[0] > 0 ? 0.5 * x[0] * x[0] : 0.0;
        });
    const double rho = 0.2;
    const double sup = sup_on_cylinder(hs, {{0.0, 0.0}, tg.t_end(), rho});
    CHECK(sup == doctest::Approx(0.5 * rho * rho).epsilon(0.1));
    CHECK(sup <= 0.5 * rho * rho + 1e-12);

    // monotone nondecreasing in rho
    double prev = 0.0;
    for (double r : {0.1, 0.15, 0.2, 0.3}) {
        const double s = sup_on_cylinder(hs, {{0.0, 0.0}, tg.t_end(), r});
        CHECK(s >= prev);
        prev = s;
    }
}

TEST_CASE("field slice round trip") {
    const Grid g = Grid::make(2, {0, 0}, {1, 1}, {5, 5});
    const TimeGrid tg = TimeGrid::make(0.0, 0.5, 2);
    ScalarField f(g, tg);
    std::vector<double> s(g.node_count());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i);
    f.set_slice(1, s);
    CHECK(f.slice_copy(1) == s);
    CHECK(f.at_ij(2, 3, 1) == static_cast<double>(g.node_index(2, 3)));
}
