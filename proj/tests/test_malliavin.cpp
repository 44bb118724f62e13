#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nodal/malliavin.hpp"
#include "nodal/quadrature.hpp"

using namespace nodal;

namespace {

double pair_scale(const SharpEstimate& an, double fd) {
    return std::max({std::abs(an.sharp), std::abs(fd), std::abs(an.volume)});
}

}  // namespace

TEST_CASE("tangent arithmetic obeys the product, quotient and Borel-|.| rules") {
    RandomStream rng(2718);
    for (int t = 0; t < 10000; ++t) {
        const Dual a{rng.normal(), rng.normal()};
        const Dual b{rng.normal(), rng.normal()};
        const Dual c{rng.normal(), rng.normal()};

        const Dual ab = a * b;
        REQUIRE(ab.t == a.t * b.v + a.v * b.t);  // Leibniz, exact by construction

        const Dual q = a / b;
        REQUIRE(std::abs(q.t - (a.t * b.v - a.v * b.t) / (b.v * b.v)) <=
                1e-12 * (std::abs(q.t) + 1e-6));

        REQUIRE(abs(a).t == sign0(a.v) * a.t);

        // associativity of the tangent up to roundoff
        const Dual l = (a * b) * c, r = a * (b * c);
        REQUIRE(std::abs(l.t - r.t) <= 1e-13 * (std::abs(l.t) + 1.0));

        // (u^e)' = e u^(e-1) u'
        const Dual u{0.1 + rng.uniform01() * 3.0, rng.normal()};
        const Dual p = rpow(u, -1.5);
        REQUIRE(std::abs(p.t - (-1.5) * std::pow(u.v, -2.5) * u.t) <=
                1e-12 * (std::abs(p.t) + 1e-8));
    }
    REQUIRE(abs(Dual{0.0, 3.0}).t == 0.0);  // sign(0) = 0 convention
    REQUIRE(Dual{5.0}.t == 0.0);            // constants carry no tangent
}

TEST_CASE("paired fields require identical structure") {
    RandomStream r1(1), r2(2), r3(3);
    auto base = TrigField<3>::sample(3, 0.0, r1);
    auto pair = make_paired_field<3>(base, 0.0, r2);
    CHECK(pair.base.same_structure(pair.hat));
    CHECK(pair.hat.coefficient({1, 1, 1}) != pair.base.coefficient({1, 1, 1}));

    auto self = make_paired_field<3>(base, base);  // explicit hat = base is fine
    CHECK(self.hat.same_structure(base));

    auto smaller = TrigField<3>::sample(2, 0.0, r3);
    CHECK_THROWS_AS(make_paired_field<3>(base, smaller), std::invalid_argument);
}

TEST_CASE("self-direction tangent vanishes by homogeneity") {
    for (int i = 0; i < 5; ++i) {
        RandomStream rng(derive_seed(42, i));
        auto base = TrigField<3>::sample(3, 0.0, rng);
        const auto r = sharp_nodal_volume(make_paired_field<3>(base, base), {});
        REQUIRE(r.volume > 0.0);
        CHECK(std::abs(r.sharp) / r.volume < 1e-8);
    }
    RandomStream rng(derive_seed(42, 99));
    auto base2 = TrigField<2>::sample(4, 0.0, rng);
    const auto r2 = sharp_nodal_volume(make_paired_field<2>(base2, base2), {});
    CHECK(std::abs(r2.sharp) / r2.volume < 1e-8);
}

TEST_CASE("phase direction on the lattice-aligned cosine is flat") {
    // cos x + eps sin x is a phase-shifted cosine: the volume is constant
    auto cosx = TrigField<3>::mode(3, {1, 0, 0});
    auto sinx = TrigField<3>::mode(3, {1, 0, 0}, {true, false, false});
    const auto r = sharp_nodal_volume(make_paired_field<3>(cosx, sinx), {});
    CHECK(std::abs(r.sharp) < 1e-6);
    CHECK(r.volume == Catch::Approx(8 * M_PI * M_PI).epsilon(0.01));
}

TEST_CASE("tangent matches the central finite difference") {
    int tested = 0, resampled = 0;
    for (int i = 0; i < 10; ++i) {
        for (int attempt = 0;; ++attempt) {
            REQUIRE(attempt < 20);
            RandomStream rb(derive_seed(70, i, 2 * attempt)), rh(derive_seed(70, i, 2 * attempt + 1));
            auto base = TrigField<3>::sample(3, 0.0, rb);
            auto pair = make_paired_field<3>(base, 0.0, rh);
            try {
                const auto an = sharp_nodal_volume(pair, {});
                const double fd = sharp_nodal_volume_fd(pair, {});
                ++tested;
                CHECK(std::abs(an.sharp - fd) / pair_scale(an, fd) < 1e-3);
                break;
            } catch (const DegenerateRealization&) {
                ++resampled;
            }
        }
    }
    CHECK(tested == 10);
    CHECK(resampled <= 5);
}

TEST_CASE("finite-difference error is second order on kink-free cases") {
    // on the midpoint grid |cos| stays bounded away from zero at every node,
    // so no |.|-kink is crossed for eps below sin(h/2) and the central
    // difference error is pure O(eps^2)
    auto cosx = TrigField<3>::mode(3, {1, 0, 0});
    RandomStream rng(31415);
    auto hat = TrigField<3>::sample(3, 0.0, rng);
    auto pair = make_paired_field<3>(cosx, hat);
    const auto an = sharp_nodal_volume(pair, {});
    SharpOptions o1, o2;
    o1.eps_fd = 1e-4;
    o2.eps_fd = 2e-4;
    const double e1 = std::abs(sharp_nodal_volume_fd(pair, o1) - an.sharp);
    const double e2 = std::abs(sharp_nodal_volume_fd(pair, o2) - an.sharp);
    REQUIRE(e1 > 0.0);
    const double ratio = e2 / e1;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("tangent is linear in the direction") {
    RandomStream rb(9), r1(10), r2(11);
    auto base = TrigField<3>::sample(3, 0.0, rb);
    auto h1 = TrigField<3>::sample(3, 0.0, r1);
    auto h2 = TrigField<3>::sample(3, 0.0, r2);
    const double alpha = 1.7, beta = -0.6;
    auto comb = h1;
    comb.scale(alpha);
    comb = comb.combined(beta, h2);
    const double s1 = sharp_nodal_volume(make_paired_field<3>(base, h1), {}).sharp;
    const double s2 = sharp_nodal_volume(make_paired_field<3>(base, h2), {}).sharp;
    const double sc = sharp_nodal_volume(make_paired_field<3>(base, comb), {}).sharp;
    const double scale = std::abs(s1) + std::abs(s2) + std::abs(sc) + 1.0;
    CHECK(std::abs(sc - (alpha * s1 + beta * s2)) / scale < 1e-10);
}

TEST_CASE("nondegeneracy statistic is strictly positive for the centered model") {
    SharpOptions o;
    const auto rep = nondegeneracy_statistic<3>(3, 0.0, 6, 4, o, 777);
    REQUIRE(rep.inner_mean_sq.size() == 6);
    for (double v : rep.inner_mean_sq) CHECK(v > 0.0);
    CHECK(rep.overall_mean > 0.0);
}

TEST_CASE("nondegeneracy statistic vanishes on the cosine with in-span directions") {
    auto cosx = TrigField<3>::mode(3, {1, 0, 0});
    auto sinx = TrigField<3>::mode(3, {1, 0, 0}, {true, false, false});
    RandomStream rng(5);
    double max_sq = 0.0;
    for (int j = 0; j < 8; ++j) {
        auto hat = cosx;
        hat.scale(rng.normal());
        hat = hat.combined(rng.normal(), sinx);
        const double s = sharp_nodal_volume(make_paired_field<3>(cosx, hat), {}).sharp;
        max_sq = std::max(max_sq, s * s);
    }
    CHECK(max_sq < 1e-10);
}

TEST_CASE("doubling the inner sample moves the statistic by less than 20 percent") {
    SharpOptions o;
    const auto a = nondegeneracy_statistic<3>(2, 0.0, 12, 8, o, 2024);
    const auto b = nondegeneracy_statistic<3>(2, 0.0, 12, 16, o, 2024);
    CHECK(std::abs(a.overall_mean - b.overall_mean) < 0.2 * std::max(a.overall_mean, b.overall_mean));
}

TEST_CASE("inverse eta moments against the quadrature oracle") {
    // E ||Z||^{-s} for Z in R^{d+1} via the radial density r^d exp(-r^2/2)
    auto chi_negative_moment = [](int d, double s) {
        auto num = [&](std::array<double, 1> r) {
            return std::pow(r[0], double(d) - s) * std::exp(-0.5 * r[0] * r[0]);
        };
        auto den = [&](std::array<double, 1> r) {
            return std::pow(r[0], double(d)) * std::exp(-0.5 * r[0] * r[0]);
        };
        quad::Options q{.m_start = 1 << 12, .m_max = 1 << 16, .tol = 1e-12};
        const double lo = 1e-12;
        return quad::integrate_box<1>(num, {lo}, {40.0}, q).value /
               quad::integrate_box<1>(den, {lo}, {40.0}, q).value;
    };
    const double oracle = chi_negative_moment(3, 3.0);
    CHECK(oracle == Catch::Approx(std::sqrt(M_PI / 8.0)).epsilon(1e-8));

    const auto est = inverse_eta_moment(3, 3.0, 1000000, 99);
    CHECK(std::abs(est.mean - oracle) < 3.0 * est.sample_se);

    const auto one = inverse_eta_moment(3, 0.0, 1000, 1);
    CHECK(one.mean == 1.0);
}

TEST_CASE("the divergent moment never settles, the convergent one does") {
    const auto div = inverse_eta_moment_doubling(3, 4.0, 1 << 17, 31);
    int consecutive_quiet = 0;
    for (size_t i = 1; i < div.size(); ++i) {
        const double change = std::abs(div[i].mean - div[i - 1].mean) / div[i].mean;
        consecutive_quiet = change < 0.05 ? consecutive_quiet + 1 : 0;
        CHECK(consecutive_quiet < 2);  // no two consecutive doublings within 5%
    }
    CHECK(div.back().mean > div.front().mean);  // grows without stabilizing

    const auto conv = inverse_eta_moment_doubling(3, 3.0, 1 << 17, 31);
    const double last_change =
        std::abs(conv.back().mean - conv.end()[-2].mean) / conv.back().mean;
    CHECK(last_change < 0.05);
}
