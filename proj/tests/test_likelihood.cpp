#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "heston/experiments.hpp"
#include "heston/likelihood.hpp"
#include "heston/sde.hpp"

using namespace heston;

namespace {
const FixedCoeffs kFixed{0.9, 1.1, -0.35, 1.2, 0.4};
const DriftParams kTheta{1.1, -0.2, 0.8, 0.5};
}  // namespace

TEST_CASE("identical measures give zero log likelihood ratio") {
    const SamplePath p = simulate_heston_euler(kTheta, kFixed, 1.5, 600, SeedSpec{41, 0});
    CHECK(log_rn(p, kTheta, kTheta) == 0.0);
}

TEST_CASE("exact quadratic identity on random configurations") {
    const QuadSweep sweep = run_quad_sweep(60, 2.0, 1500, SeedSpec{42, 0});
    CHECK(sweep.max_rel_residual <= 1e-10);
}

TEST_CASE("score vector: Brownian and observable modes agree at the generating drift") {
    for (std::uint64_t k = 0; k < 25; ++k) {
        const PathStats s = simulate_heston_stats(kTheta, kFixed, 2.0, 900, SeedSpec{43, k});
        REQUIRE(s.clamp_hits == 0);
        const Vec4 r = scaling_matrix(Regime::Subcritical, kTheta, 2.0);
        const Vec4 d_obs = delta_from_observables(s, kFixed, kTheta, r);
        const Vec4 d_brw = delta_from_brownian(s, kFixed, r);
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(d_obs[i] - d_brw[i]) <= 1e-12 * (1.0 + std::abs(d_brw[i])));
    }
}

TEST_CASE("observable score is affine in the base drift") {
    const PathStats s = simulate_heston_stats(kTheta, kFixed, 2.0, 900, SeedSpec{44, 1});
    const Vec4 r{0.5, 0.5, 0.25, 0.25};
    const double da = 0.37;
    DriftParams shifted = kTheta;
    shifted.a += da;
    const Vec4 base = delta_from_observables(s, kFixed, kTheta, r);
    const Vec4 moved = delta_from_observables(s, kFixed, shifted, r);
    const Mat2 s_inv = diffusion_matrices(kFixed).S_inv;
    // d Delta = [-r1 da Sinv e1 sum_inv_y ; +r3 da Sinv e1 T] blockwise
    const Vec2 top = mul(s_inv, Vec2{-da * s.sum_inv_y, 0.0});
    const Vec2 bot = mul(s_inv, Vec2{-da * s.horizon, 0.0});
    CHECK(moved[0] - base[0] == Catch::Approx(r[0] * top[0]).epsilon(1e-9));
    CHECK(moved[1] - base[1] == Catch::Approx(r[1] * top[1]).epsilon(1e-9));
    CHECK(moved[2] - base[2] == Catch::Approx(+r[2] * bot[0]).epsilon(1e-9));
    CHECK(moved[3] - base[3] == Catch::Approx(+r[3] * bot[1]).epsilon(1e-9));
}

TEST_CASE("exact-scheme paths support the observable mode only") {
    const auto y = simulate_cir_exact(1.1, 0.8, 0.9, 1.2, 1.0, 400, SeedSpec{45, 0});
    SamplePath p;
    p.dt = 1.0 / 400.0;
    p.theta_gen = kTheta;
    p.fixed = kFixed;
    p.scheme = Scheme::ExactCir;
    p.y = y;
    p.x.assign(y.size(), kFixed.x0);
    const PathStats s = path_stats(p);
    const Vec4 r{1.0, 1.0, 1.0, 1.0};
    const Vec4 d = delta_from_observables(s, kFixed, kTheta, r);
    for (double v : d) CHECK(std::isfinite(v));
    CHECK_THROWS_AS(delta_from_brownian(s, kFixed, r), std::invalid_argument);
    CHECK(std::isfinite(log_rn(s, kFixed, kTheta, DriftParams{1.0, 0.0, 1.0, 0.0})));
}

TEST_CASE("information matrix blocks and invariants") {
    const PathStats s = simulate_heston_stats(kTheta, kFixed, 2.0, 900, SeedSpec{46, 2});
    const Vec4 r{0.4, 0.4, 0.2, 0.2};
    const Mat4 j = info_matrix(s, kFixed, r);
    const Mat2 s_inv = diffusion_matrices(kFixed).S_inv;
    // top-left block is r1^2 (int ds/Y) Sinv
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            CHECK(j.m[i][k] == Catch::Approx(r[0] * r[0] * s.sum_inv_y * s_inv.m[i][k]));
    CHECK(max_sym_gap(j) <= 1e-12 * max_abs(j));
    CHECK(sym_min_eigenvalue(j) >= -1e-10 * max_abs(j));
}

TEST_CASE("quadratic decomposition spot checks") {
    const SamplePath p = simulate_heston_euler(kTheta, kFixed, 2.0, 800, SeedSpec{47, 3});
    const Vec4 r = scaling_matrix(Regime::Subcritical, kTheta, 2.0);

    SECTION("h = 0 gives zero log ratio") {
        const QuadDecomposition qd = quad_decomposition(p, kTheta, r, Vec4{0, 0, 0, 0});
        CHECK(qd.log_lr == 0.0);
    }
    SECTION("identity against the direct evaluation") {
        const Vec4 h{0.7, -0.4, 0.9, 0.3};
        const QuadDecomposition qd = quad_decomposition(p, kTheta, r, h);
        const DriftParams shifted =
            kTheta.shifted({r[0] * h[0], r[1] * h[1], r[2] * h[2], r[3] * h[3]});
        const double direct = log_rn(p, kTheta, shifted);
        CHECK(std::abs(direct - qd.log_lr) <= 1e-10 * (1.0 + std::abs(direct)));
    }
    SECTION("domain guards") {
        const Vec4 h{-20.0, 0.0, 0.0, 0.0};
        CHECK_THROWS_AS(quad_decomposition(p, kTheta, r, h), std::invalid_argument);
        const Vec4 bad_r{0.0, 1.0, 1.0, 1.0};
        CHECK_THROWS_AS(quad_decomposition(p, kTheta, bad_r, Vec4{0, 0, 0, 0}),
                        std::invalid_argument);
        const DriftParams low_a{0.3, 0.0, 1.0, 0.0};
        CHECK_THROWS_AS(log_rn(p, low_a, kTheta), std::invalid_argument);
        // boundary a = sigma1^2/2 is accepted for likelihood work
        const DriftParams boundary{0.5 * kFixed.sigma1 * kFixed.sigma1, 0.0, 1.0, 0.0};
        CHECK_NOTHROW(log_rn(p, kTheta, boundary));
    }
}

TEST_CASE("unit mean of the likelihood ratio at small scale") {
    const DriftParams theta{1.0, 0.0, 1.0, 0.0};
    const FixedCoeffs fixed{1.0, 1.0, 0.3, 1.0, 0.0};
    const DriftParams tilted{1.1, 0.1, 1.1, 0.1};
    const UnitMeanResult res = run_unit_mean(theta, tilted, fixed, 1.0, 500, 20000, SeedSpec{48, 0});
    CHECK(std::abs(res.stat.mean - 1.0) <= 4.0 * res.stat.se);
    CHECK(res.flagged == 0);
}
