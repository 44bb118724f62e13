#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nodal/quadrature.hpp"
#include "nodal/rng.hpp"
#include "nodal/trig_field.hpp"

using namespace nodal;

TEST_CASE("random streams are reproducible and child streams are distinct") {
    RandomStream a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal();
        REQUIRE(x == b.normal());
        REQUIRE(x != c.normal());
    }
    REQUIRE(derive_seed(1, 0) != derive_seed(1, 1));
    REQUIRE(derive_seed(1, 0) != derive_seed(2, 0));
    REQUIRE(derive_seed(1, 5, 0) != derive_seed(1, 5, 1));
    REQUIRE(derive_seed(1, 5) == derive_seed(1, 5));
}

TEST_CASE("gaussian stream moments") {
    RandomStream rng(7);
    const int n = 200000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    CHECK(std::abs(s1 / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
    CHECK(std::abs(s4 / n - 3.0) < 0.1);
}

TEST_CASE("pairwise sum matches naive accumulation") {
    RandomStream rng(3);
    std::vector<double> v(12345);
    long double ref = 0;
    for (auto& x : v) {
        x = rng.normal();
        ref += x;
    }
    CHECK(std::abs(quad::pairwise_sum(v) - double(ref)) < 1e-10);
}

TEST_CASE("periodic integrals: analytic cases") {
    auto one = [](std::array<double, 2>) { return 1.0; };
    const auto r1 = quad::integrate_periodic<2>(one, {.m_start = 8, .m_max = 8});
    CHECK(r1.value == Catch::Approx(quad::kTwoPi * quad::kTwoPi).epsilon(1e-14));

    auto cos2 = [](std::array<double, 1> x) { return std::cos(x[0]) * std::cos(x[0]); };
    const auto r2 = quad::integrate_periodic<1>(cos2, {.m_start = 8, .m_max = 8});
    CHECK(std::abs(r2.value - M_PI) < 1e-12);

    auto abssin = [](std::array<double, 1> x) { return std::abs(std::sin(x[0])); };
    const auto r3 = quad::integrate_periodic<1>(abssin, {.m_start = 64, .m_max = 4096, .tol = 1e-9});
    CHECK(std::abs(r3.value - 4.0) < 1e-4);
}

TEST_CASE("tolerance not reached is reported, value still returned") {
    auto abssin = [](std::array<double, 1> x) { return std::abs(std::sin(x[0])); };
    const auto r = quad::integrate_periodic<1>(abssin, {.m_start = 16, .m_max = 64, .tol = 1e-14});
    CHECK_FALSE(r.tol_reached);
    CHECK(r.m == 64);
    CHECK(std::abs(r.value - 4.0) < 1e-2);
}

TEST_CASE("box integrals: analytic cases") {
    auto lin = [](std::array<double, 1> x) { return x[0]; };
    const auto r1 = quad::integrate_box<1>(lin, {0.0}, {1.0}, {.m_start = 8, .m_max = 64});
    CHECK(std::abs(r1.value - 0.5) < 1e-12);

    auto xy = [](std::array<double, 2> x) { return x[0] * x[1]; };
    const auto r2 = quad::integrate_box<2>(xy, {0.0, 0.0}, {1.0, 1.0}, {.m_start = 8, .m_max = 64});
    CHECK(std::abs(r2.value - 0.25) < 1e-10);

    auto runge = [](std::array<double, 1> x) { return 1.0 / (1.0 + x[0] * x[0]); };
    const auto r3 =
        quad::integrate_box<1>(runge, {-1.0}, {2.0}, {.m_start = 64, .m_max = 1 << 14, .tol = 1e-10});
    CHECK(std::abs(r3.value - (std::atan(2.0) + std::atan(1.0))) < 1e-8);
}

TEST_CASE("linearity at fixed grid") {
    auto u = [](std::array<double, 1> x) { return std::exp(std::cos(x[0])); };
    auto v = [](std::array<double, 1> x) { return std::abs(std::sin(3 * x[0])); };
    const double alpha = 2.5, beta = -1.25;
    auto comb = [&](std::array<double, 1> x) { return alpha * u(x) + beta * v(x); };
    quad::Options fixed{.m_start = 256, .m_max = 256};
    const double lhs = quad::integrate_periodic<1>(comb, fixed).value;
    const double rhs = alpha * quad::integrate_periodic<1>(u, fixed).value +
                       beta * quad::integrate_periodic<1>(v, fixed).value;
    CHECK(std::abs(lhs - rhs) < 1e-12 * (std::abs(lhs) + 1));
}

TEST_CASE("torus translation invariance") {
    RandomStream rng(11);
    auto f = TrigField<1>::sample(4, 0.0, rng);
    auto g = [&](std::array<double, 1> x) { return std::exp(f.value({x[0]})); };
    quad::Options fixed{.m_start = 128, .m_max = 128};
    const double base = quad::integrate_periodic<1>(g, fixed).value;

    const double h = quad::kTwoPi / 128;
    auto g_shift_grid = [&](std::array<double, 1> x) { return g({x[0] + 17 * h}); };
    const double shifted = quad::integrate_periodic<1>(g_shift_grid, fixed).value;
    CHECK(std::abs(shifted - base) < 1e-12 * (std::abs(base) + 1));

    quad::Options refine{.m_start = 16, .m_max = 256, .tol = 1e-9};
    const auto a = quad::integrate_periodic<1>(g, refine);
    auto g_shift_any = [&](std::array<double, 1> x) { return g({x[0] + 0.1234}); };
    const auto b = quad::integrate_periodic<1>(g_shift_any, refine);
    CHECK(std::abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-12);
}

TEST_CASE("refinement differences shrink for smooth integrands") {
    RandomStream rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto f = TrigField<1>::sample(3, 0.0, rng);
        auto g = [&](std::array<double, 1> x) { return std::exp(f.value({x[0]})); };
        std::vector<double> vals;
        for (int m = 8; m <= 512; m *= 2) {
            quad::Options fixed{.m_start = m, .m_max = m};
            vals.push_back(quad::integrate_periodic<1>(g, fixed).value);
        }
        std::vector<double> diffs;
        for (size_t i = 1; i < vals.size(); ++i) diffs.push_back(std::abs(vals[i] - vals[i - 1]));
        // once above roundoff, each doubling improves
        const size_t n = diffs.size();
        if (diffs[n - 2] > 1e-13)
            CHECK(diffs[n - 1] <= diffs[n - 2]);
    }
}

TEST_CASE("argument validation") {
    auto g = [](std::array<double, 1>) { return 1.0; };
    CHECK_THROWS_AS(quad::integrate_periodic<1>(g, {.m_start = 24, .m_max = 64}),
                    std::invalid_argument);
    CHECK_THROWS_AS(quad::integrate_periodic<1>(g, {.m_start = 64, .m_max = 64, .tol = -1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(quad::integrate_box<1>(g, {1.0}, {0.0}, {}), std::invalid_argument);
}
