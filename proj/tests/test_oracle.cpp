#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "porosim/lcp.hpp"
#include "porosim/oracle.hpp"
#include "porosim/scenarios.hpp"

using namespace porosim;

TEST_CASE("half-space profile values and identity") {
    const auto hs = exact_half_space({1.0, 0.0}, 2);
    CHECK(hs.u({0.3, 42.0}, 0.0) == doctest::Approx(0.045));
    CHECK(hs.u({-0.2, 1.0}, 0.0) == 0.0);
    CHECK_THROWS_AS(exact_half_space({2.0, 0.0}, 2), std::invalid_argument);

    // Lap u - du/dt = 1 on the positive side, checked at random points: the
    // centered stencil is exact for the quadratic piece, so a power-of-two
    // step leaves only rounding at the 1e-12 (scaled) level
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    const double fd = 0.0625;
    for (int k = 0; k < 100; ++k) {
        const double x = uni(rng), y = 2.0 * uni(rng) - 1.0;
        const double lap =
            (hs.u({x - fd, y}, 0) - 2 * hs.u({x, y}, 0) + hs.u({x + fd, y}, 0)) /
                (fd * fd) +
            (hs.u({x, y - fd}, 0) - 2 * hs.u({x, y}, 0) + hs.u({x, y + fd}, 0)) /
                (fd * fd);
        CHECK(lap - 0.0 == doctest::Approx(hs.f({x, y}, 0)).epsilon(1e-12));
    }
}

TEST_CASE("polynomial profile admissibility") {
    // u = x^2/2: 2 Tr(M) - m = 1 with m = 0
    const auto p = exact_polynomial(0.0, {0.5, 0.0, 0.0}, 1);
    CHECK(p.u({2.0, 0.0}, -1.0) == doctest::Approx(2.0));
    CHECK(p.u({2.0, 0.0}, -5.0) == doctest::Approx(2.0));

    // m and M must balance the defining relation
    CHECK_THROWS_AS(exact_polynomial(0.0, {0.3, 0.0, 0.0}, 1),
                    std::invalid_argument);
    // compensating pair: m = -0.5, Mxx = 0.25
    CHECK_NOTHROW(exact_polynomial(-0.5, {0.25, 0.0, 0.0}, 1));
    // negative eigenvalue breaks u >= 0
    CHECK_THROWS_AS(exact_polynomial(-3.0, {-1.0, 0.0, 0.0}, 1),
                    std::invalid_argument);
    // m > 0 dips below zero for t < 0
    CHECK_THROWS_AS(exact_polynomial(1.0, {1.0, 0.0, 0.0}, 1),
                    std::invalid_argument);

    // 2D pure-time profile u = -t (Stefan-type singular datum)
    const auto st = exact_polynomial(-1.0, {0.0, 0.0, 0.0}, 2);
    CHECK(st.u({0.7, -0.3}, -2.0) == doctest::Approx(2.0));

    // identity at random points for the compensating profile; the stencil is
    // exact for the polynomial, tolerance is rounding only
    const auto q = exact_polynomial(-0.5, {0.25, 0.0, 0.0}, 1);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double fd = 0.0625;
    for (int k = 0; k < 100; ++k) {
        const double x = uni(rng), t = -std::abs(uni(rng)) - 0.1;
        const double lap =
            (q.u({x - fd, 0}, t) - 2 * q.u({x, 0}, t) + q.u({x + fd, 0}, t)) /
            (fd * fd);
        const double dudt =
            (q.u({x, 0}, t + fd) - q.u({x, 0}, t - fd)) / (2 * fd);
        CHECK(lap - dudt == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("radial oracle agrees with the closed form") {
    const double r0 = 0.4;
    const auto radial = exact_radial_stationary(r0);
    CHECK(radial.u({0.2, 0.1}, 0.0) == 0.0);  // inside the contact disk
    for (double r : {0.45, 0.6, 0.9, 1.3}) {
        // table lookup is piecewise linear: O(hr^2) away from the closed form
        CHECK(radial.u({r, 0.0}, 0.0) ==
              doctest::Approx(radial_stationary_profile(r, r0)).epsilon(1e-5));
        // rotation invariance
        CHECK(radial.u({0.0, r}, 0.0) ==
              doctest::Approx(radial.u({r, 0.0}, 0.0)).epsilon(1e-12));
    }
}

TEST_CASE("brute force LCP: hand cases") {
    LcpSystem sys;
    sys.diag = {2.0};
    sys.off = {{}};
    sys.rhs = {1.0};
    auto u = brute_force_lcp(sys);
    CHECK(u[0] == doctest::Approx(0.5));  // interior solution

    sys.rhs = {-1.0};
    u = brute_force_lcp(sys);
    CHECK(u[0] == 0.0);  // constraint active

    LcpSystem big = random_spd_lcp(1, 21);
    CHECK_THROWS_AS(brute_force_lcp(big), std::invalid_argument);
}

TEST_CASE("brute force LCP equals PSOR on random SPD systems") {
    for (int k = 0; k < 25; ++k) {
        const int n = 1 + k % 8;
        const LcpSystem sys = random_spd_lcp(500 + k, n);
        const auto exact = brute_force_lcp(sys);
        const auto psor =
            psor_solve(sys, std::vector<double>(n, 0.0), PsorSettings{1.5, 20000, 1e-13});
        REQUIRE(psor.converged);
        for (int i = 0; i < n; ++i)
            CHECK(psor.u[i] ==
                  doctest::Approx(exact[i]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("brute force LCP is independent of node ordering") {
    const LcpSystem sys = random_spd_lcp(77, 7);
    const auto base = brute_force_lcp(sys);

    // permute the unknowns and compare after mapping back
    std::vector<int> perm = {3, 0, 6, 1, 5, 2, 4};
    LcpSystem p;
    p.diag.resize(7);
    p.off.resize(7);
    p.rhs.resize(7);
    std::vector<int> inv(7);
    for (int i = 0; i < 7; ++i) inv[perm[i]] = i;
    for (int i = 0; i < 7; ++i) {
        p.diag[inv[i]] = sys.diag[i];
        p.rhs[inv[i]] = sys.rhs[i];
        for (const auto& [j, a] : sys.off[i]) p.off[inv[i]].emplace_back(inv[j], a);
    }
    const auto permuted = brute_force_lcp(p);
    for (int i = 0; i < 7; ++i)
        CHECK(permuted[inv[i]] ==
              doctest::Approx(base[i]).epsilon(1e-11).scale(1.0));
}

TEST_CASE("reference quadrature") {
    // constant over a cylinder-like box: volume times constant
    const double v = reference_quadrature_2d(
        [](double, double) { return 2.5; }, 0.0, 2.0, -1.0, 1.0, 64);
    CHECK(v == doctest::Approx(2.5 * 4.0).epsilon(1e-12));

    // truncated Gaussian mass: 1 to 1e-6 at six sigma
    const double mass = reference_quadrature(
        [](double x) { return std::exp(-x * x / 2.0) / std::sqrt(2.0 * M_PI); },
        -6.0, 6.0, 2048);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

    // halving the resolution behaves like the rule order (Simpson: ~16x)
    auto fn = [](double x) { return std::sin(3.0 * x) + x * x; };
    const double exact = (std::cos(0.0) - std::cos(3.0)) / 3.0 + 1.0 / 3.0;
    const double coarse = reference_quadrature(fn, 0.0, 1.0, 16);
    const double fine = reference_quadrature(fn, 0.0, 1.0, 32);
    const double ratio =
        std::abs(coarse - exact) / std::max(std::abs(fine - exact), 1e-300);
    CHECK(ratio > 8.0);  // fourth-order collapse, allow slack
}
