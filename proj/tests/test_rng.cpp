#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "heston/rng.hpp"

using namespace heston;

namespace {
struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
};

template <class Gen>
MeanVar sample_moments(Gen&& gen, int n) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = gen();
        s += x;
        s2 += x * x;
    }
    const double m = s / n;
    return {m, s2 / n - m * m};
}
}  // namespace

TEST_CASE("seeding is stateless and stream-separated") {
    Rng a(SeedSpec{42, 3});
    Rng b(SeedSpec{42, 3});
    Rng c(SeedSpec{42, 4});
    bool all_eq = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto xa = a.next_u64();
        all_eq = all_eq && xa == b.next_u64();
        any_diff = any_diff || xa != c.next_u64();
    }
    CHECK(all_eq);
    CHECK(any_diff);

    const SeedSpec base{42, 3};
    CHECK(base.sub(1).master_seed != base.master_seed);
    CHECK(base.sub(1).master_seed != base.sub(2).master_seed);
    CHECK(base.with_stream(9).stream_index == 9);
}

TEST_CASE("uniform01 stays inside the open interval") {
    Rng rng(SeedSpec{1, 0});
    double mn = 1.0, mx = 0.0;
    const auto mv = sample_moments(
        [&] {
            const double u = rng.uniform01();
            mn = std::min(mn, u);
            mx = std::max(mx, u);
            return u;
        },
        200000);
    CHECK(mn > 0.0);
    CHECK(mx < 1.0);
    CHECK(std::abs(mv.mean - 0.5) < 0.005);
    CHECK(std::abs(mv.var - 1.0 / 12.0) < 0.005);
}

TEST_CASE("normal moments") {
    Rng rng(SeedSpec{2, 0});
    const auto mv = sample_moments([&] { return rng.normal(); }, 200000);
    CHECK(std::abs(mv.mean) < 0.01);
    CHECK(std::abs(mv.var - 1.0) < 0.02);
}

TEST_CASE("gamma moments, both shape branches") {
    Rng rng(SeedSpec{3, 0});
    for (const double shape : {0.6, 1.0, 2.5, 40.0}) {
        const auto mv = sample_moments([&] { return rng.gamma(shape); }, 120000);
        CHECK(std::abs(mv.mean - shape) < 0.05 * shape + 0.02);
        CHECK(std::abs(mv.var - shape) < 0.08 * shape + 0.05);
    }
    CHECK_THROWS_AS(rng.gamma(0.0), std::domain_error);
}

TEST_CASE("poisson moments across the algorithm switch") {
    Rng rng(SeedSpec{4, 0});
    for (const double mean : {0.3, 4.0, 9.9, 10.1, 80.0, 14000.0}) {
        const int n = mean > 1000.0 ? 40000 : 120000;
        const auto mv = sample_moments([&] { return static_cast<double>(rng.poisson(mean)); }, n);
        const double se = std::sqrt(mean / n);
        CHECK(std::abs(mv.mean - mean) < 5.0 * se + 1e-3);
        CHECK(std::abs(mv.var - mean) < 0.05 * mean + 0.05);
    }
    CHECK(Rng(SeedSpec{5, 0}).poisson(0.0) == 0);
}
