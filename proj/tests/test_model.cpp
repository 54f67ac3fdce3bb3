#include <catch2/catch_amalgamated.hpp>

#include "heston/model.hpp"
#include "heston/rng.hpp"

using namespace heston;

TEST_CASE("regime classification is the sign of b") {
    CHECK(classify_regime(1.0) == Regime::Subcritical);
    CHECK(classify_regime(0.0) == Regime::Critical);
    CHECK(classify_regime(-0.5) == Regime::Supercritical);
    CHECK(classify_regime(1e-300) == Regime::Subcritical);
    CHECK(classify_regime(-1e-300) == Regime::Supercritical);
}

TEST_CASE("diffusion matrices") {
    SECTION("uncorrelated unit case") {
        const auto d = diffusion_matrices(FixedCoeffs{1.0, 1.0, 0.0, 1.0, 0.0});
        CHECK(d.S.m[0][0] == 1.0);
        CHECK(d.S.m[0][1] == 0.0);
        CHECK(d.S.m[1][1] == 1.0);
        CHECK(d.L.m[0][0] == 1.0);
        CHECK(d.L.m[1][0] == 0.0);
        CHECK(d.L.m[1][1] == 1.0);
    }
    SECTION("direct evaluation") {
        const auto d = diffusion_matrices(FixedCoeffs{2.0, 3.0, 0.5, 1.0, 0.0});
        CHECK(d.S.m[0][0] == Catch::Approx(4.0));
        CHECK(d.S.m[0][1] == Catch::Approx(3.0));
        CHECK(d.S.m[1][0] == Catch::Approx(3.0));
        CHECK(d.S.m[1][1] == Catch::Approx(9.0));
    }
    SECTION("random coefficients: factorization, determinant, cached inverse") {
        Rng rng(SeedSpec{21, 0});
        for (int k = 0; k < 200; ++k) {
            FixedCoeffs f;
            f.sigma1 = 0.2 + 2.0 * rng.uniform01();
            f.sigma2 = 0.2 + 2.0 * rng.uniform01();
            f.rho = -0.95 + 1.9 * rng.uniform01();
            const auto d = diffusion_matrices(f);
            const Mat2 ll = mul(d.L, d.L.transpose());
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    CHECK(std::abs(ll.m[i][j] - d.S.m[i][j]) <= 1e-14 * (1.0 + std::abs(d.S.m[i][j])));
            const double det_expected =
                f.sigma1 * f.sigma1 * f.sigma2 * f.sigma2 * (1.0 - f.rho * f.rho);
            CHECK(d.S.det() == Catch::Approx(det_expected).epsilon(1e-12));
            CHECK(d.S.det() > 0.0);
            const Mat2 fresh = d.S.inverse();
            const Mat2 prod = mul(d.S_inv, d.S);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    CHECK(std::abs(d.S_inv.m[i][j] - fresh.m[i][j]) <=
                          1e-12 * (1.0 + std::abs(fresh.m[i][j])));
                    CHECK(std::abs(prod.m[i][j] - (i == j ? 1.0 : 0.0)) < 1e-12);
                }
            const Mat2 lt = mul(d.Lt_inv, d.L.transpose());
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    CHECK(std::abs(lt.m[i][j] - (i == j ? 1.0 : 0.0)) < 1e-12);
        }
    }
}

TEST_CASE("parameter domain thresholds") {
    CHECK(parameter_domain_check(1.0, 1.0) == DomainStatus::Interior);
    CHECK(parameter_domain_check(0.5, 1.0) == DomainStatus::Boundary);
    CHECK(parameter_domain_check(0.3, 1.0) == DomainStatus::Invalid);
    CHECK_THROWS_AS(parameter_domain_check(1.0, 0.0), std::invalid_argument);
    CHECK_NOTHROW(require_domain(0.5, 1.0, true, "test"));
    CHECK_THROWS_AS(require_domain(0.5, 1.0, false, "test"), std::invalid_argument);
    CHECK_THROWS_AS(require_domain(0.49, 1.0, true, "test"), std::invalid_argument);
}

TEST_CASE("parameter validation rejects bad inputs") {
    CHECK_THROWS_AS((FixedCoeffs{0.0, 1.0, 0.0, 1.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((FixedCoeffs{1.0, 1.0, 1.0, 1.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((FixedCoeffs{1.0, 1.0, 0.0, 0.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DriftParams{0.0, 0.0, 1.0, 0.0}.validate()), std::invalid_argument);
    const double nan = std::nan("");
    CHECK_THROWS_AS((DriftParams{1.0, nan, 1.0, 0.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW((DriftParams{1.0, -2.0, -3.0, 4.0}.validate()));
}
