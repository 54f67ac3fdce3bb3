#include <catch2/catch_amalgamated.hpp>

#include "heston/linalg.hpp"
#include "heston/rng.hpp"

using namespace heston;

namespace {
Mat2 random_mat2(Rng& rng) {
    return Mat2{{{rng.normal(), rng.normal()}, {rng.normal(), rng.normal()}}};
}

Mat2 random_spd2(Rng& rng) {
    const Mat2 a = random_mat2(rng);
    Mat2 s = mul(a, a.transpose());
    s.m[0][0] += 0.2;
    s.m[1][1] += 0.2;
    return s;
}
}  // namespace

TEST_CASE("analytic 2x2 inverse") {
    Rng rng(SeedSpec{7, 0});
    for (int k = 0; k < 200; ++k) {
        Mat2 a = random_mat2(rng);
        if (std::abs(a.det()) < 1e-3) continue;
        const Mat2 prod = mul(a, a.inverse());
        CHECK(std::abs(prod.m[0][0] - 1.0) < 1e-12);
        CHECK(std::abs(prod.m[1][1] - 1.0) < 1e-12);
        CHECK(std::abs(prod.m[0][1]) < 1e-12);
        CHECK(std::abs(prod.m[1][0]) < 1e-12);
    }
    CHECK_THROWS_AS((Mat2{{{1.0, 2.0}, {2.0, 4.0}}}.inverse()), std::domain_error);
}

TEST_CASE("2x2 cholesky reconstructs the matrix") {
    Rng rng(SeedSpec{8, 0});
    for (int k = 0; k < 100; ++k) {
        const Mat2 s = random_spd2(rng);
        const Mat2 l = chol_lower(s);
        const Mat2 back = mul(l, l.transpose());
        CHECK(std::abs(back.m[0][0] - s.m[0][0]) < 1e-12 * (1.0 + std::abs(s.m[0][0])));
        CHECK(std::abs(back.m[1][0] - s.m[1][0]) < 1e-12 * (1.0 + std::abs(s.m[1][0])));
        CHECK(std::abs(back.m[1][1] - s.m[1][1]) < 1e-12 * (1.0 + std::abs(s.m[1][1])));
        CHECK(l.m[0][1] == 0.0);
    }
    CHECK_THROWS_AS(chol_lower(Mat2{{{-1.0, 0.0}, {0.0, 1.0}}}), std::domain_error);
}

TEST_CASE("kronecker product mixed-product identity") {
    Rng rng(SeedSpec{9, 0});
    const Mat2 a = random_mat2(rng), b = random_mat2(rng);
    const Mat2 c = random_mat2(rng), d = random_mat2(rng);
    const Mat4 lhs = mul(kron(a, b), kron(c, d));
    const Mat4 rhs = kron(mul(a, c), mul(b, d));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(std::abs(lhs.m[i][j] - rhs.m[i][j]) < 1e-12);
}

TEST_CASE("4x4 solve against multiplication") {
    Rng rng(SeedSpec{10, 0});
    for (int k = 0; k < 50; ++k) {
        const Mat4 a = kron(random_spd2(rng), random_spd2(rng));
        const Vec4 x{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        const Vec4 b = mul(a, x);
        const Vec4 xr = solve(a, b);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(xr[i] - x[i]) < 1e-8 * (1.0 + std::abs(x[i])));
    }
}

TEST_CASE("symmetric eigenvalue helpers") {
    const Mat2 diag{{{3.0, 0.0}, {0.0, -1.0}}};
    const Vec2 ev = sym_eigenvalues(diag);
    CHECK(ev[0] == Catch::Approx(-1.0));
    CHECK(ev[1] == Catch::Approx(3.0));

    Rng rng(SeedSpec{11, 0});
    for (int k = 0; k < 50; ++k) {
        const Mat2 g = random_spd2(rng);
        const Mat2 s = random_spd2(rng);
        const Mat4 j = kron(g, s);
        const double expected = std::min(sym_eigenvalues(g)[0], sym_eigenvalues(g)[1]) > 0.0
                                    ? sym_eigenvalues(g)[0] * sym_eigenvalues(s)[0]
                                    : 0.0;
        if (expected > 0.0) {
            const double got = sym_min_eigenvalue(j);
            CHECK(got == Catch::Approx(expected).epsilon(1e-8));
        }
    }
}
