#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "heston/linalg.hpp"
#include "heston/model.hpp"
#include "heston/parallel.hpp"
#include "heston/path_stats.hpp"
#include "heston/regimes.hpp"
#include "heston/sde.hpp"

// Closed-form drift MLE and the local asymptotic minimax experiment.
//
// The log-likelihood ratio is an exact quadratic in the drift vector, so
// the maximizer solves the 2x2 Gram system
//   [int 1/Y  -T; -T  int Y] (a^, b^)' = (int dY/Y, -(Y_T - y0))'
// and the same system with X increments for (alpha^, beta^). No iteration,
// no dependence on the base point.

namespace heston {

struct MleResult {
    Vec4 theta_hat{};
    Mat2 gram{};
    double conditioning = 0.0;  // det(gram), >= 0 by discrete Cauchy-Schwarz
    bool degenerate = false;
    bool domain_flag = false;  // a^ fell outside (sigma1^2/2, inf); reported raw
};

inline constexpr double kGramDetTol = 1e-12;

inline MleResult mle_drift(const PathStats& stats, const FixedCoeffs& fixed) {
    MleResult out;
    out.gram = stats.gram();
    out.conditioning = out.gram.det();
    const double scale = stats.sum_inv_y * stats.sum_y;
    if (!(out.conditioning > kGramDetTol * scale)) {
        out.degenerate = true;
        return out;
    }
    const Mat2 ginv = out.gram.inverse();
    const Vec2 y_rhs{stats.u[0], -(stats.y_end - stats.y_start)};
    const Vec2 x_rhs{stats.u[1], -(stats.x_end - stats.x_start)};
    const Vec2 ab = mul(ginv, y_rhs);
    const Vec2 alpha_beta = mul(ginv, x_rhs);
    out.theta_hat = {ab[0], alpha_beta[0], ab[1], alpha_beta[1]};
    out.domain_flag = !(ab[0] > 0.5 * fixed.sigma1 * fixed.sigma1);
    return out;
}

inline MleResult mle_drift(const SamplePath& path, double floor_eps = kDefaultFloorEps) {
    return mle_drift(path_stats(path, floor_eps), path.fixed);
}

struct ScaledErrors {
    std::vector<Vec4> rows;       // r^{-1} (theta^ - theta) per kept replicate
    std::int64_t dropped = 0;     // replicates with a degenerate Gram matrix
    std::int64_t floor_flagged = 0;
};

inline ScaledErrors scaled_error_distribution(Regime regime, const DriftParams& theta,
                                              const FixedCoeffs& fixed, double T,
                                              std::int64_t n_steps, std::int64_t M,
                                              const SeedSpec& seed) {
    theta.validate();
    fixed.validate();
    if (classify_regime(theta.b) != regime)
        throw std::invalid_argument("scaled_error_distribution: theta does not match regime");
    const Vec4 r = scaling_matrix(regime, theta, T);
    std::vector<Vec4> rows(static_cast<std::size_t>(M));
    std::vector<char> keep(static_cast<std::size_t>(M), 0);
    std::vector<char> floored(static_cast<std::size_t>(M), 0);
    parallel_for(M, [&](std::int64_t i) {
        const PathStats stats = simulate_heston_stats(theta, fixed, T, n_steps, seed.with_stream(i));
        const MleResult res = mle_drift(stats, fixed);
        floored[static_cast<std::size_t>(i)] = stats.floor_hits > 0 ? 1 : 0;
        if (res.degenerate) return;
        const Vec4 tv = theta.as_vec();
        Vec4 row;
        for (int k = 0; k < 4; ++k) row[k] = (res.theta_hat[k] - tv[k]) / r[k];
        rows[static_cast<std::size_t>(i)] = row;
        keep[static_cast<std::size_t>(i)] = 1;
    });
    ScaledErrors out;
    out.rows.reserve(static_cast<std::size_t>(M));
    for (std::int64_t i = 0; i < M; ++i) {
        if (keep[static_cast<std::size_t>(i)])
            out.rows.push_back(rows[static_cast<std::size_t>(i)]);
        else
            ++out.dropped;
        out.floor_flagged += floored[static_cast<std::size_t>(i)];
    }
    return out;
}

// bowl-shaped losses for the minimax experiment
struct Loss {
    enum class Kind { BoundedQuadratic, Indicator } kind = Kind::BoundedQuadratic;
    double c = 4.0;

    static Loss bounded_quadratic(double cap) { return {Kind::BoundedQuadratic, cap}; }
    static Loss indicator(double radius) { return {Kind::Indicator, radius}; }

    double operator()(const Vec2& x) const {
        const double n2 = x[0] * x[0] + x[1] * x[1];
        if (kind == Kind::BoundedQuadratic) return n2 < c ? n2 : c;
        return n2 > c * c ? 1.0 : 0.0;
    }
};

struct MinimaxResult {
    double mle_risk = 0.0;
    double mle_se = 0.0;
    double bound = 0.0;
    double bound_se = 0.0;
    std::int64_t dropped = 0;
};

inline constexpr std::int64_t kLimitDrawSteps = 4000;

// Monte Carlo comparison of the MLE risk on the supercritical (b, beta)
// submodel against the local asymptotic minimax bound E w((eta')^{-1} Z):
// the limit information is (-Y~(-1/b)/b) Sinv, so (eta')^{-1} Z given the
// mixing draw is a centered Gaussian pair with covariance S / mix.
inline MinimaxResult minimax_experiment(const DriftParams& theta, const FixedCoeffs& fixed,
                                        const Loss& loss, double T, std::int64_t M,
                                        const SeedSpec& seed,
                                        std::int64_t n_steps = 0,
                                        std::int64_t limit_steps = kLimitDrawSteps) {
    theta.validate();
    fixed.validate();
    if (!(theta.b < 0.0)) throw std::invalid_argument("minimax_experiment: b must be < 0");
    require_domain(theta.a, fixed.sigma1, /*allow_boundary=*/false, "minimax_experiment");
    if (n_steps <= 0) n_steps = default_n_steps(T);
    const double r_bb = std::exp(0.5 * theta.b * T);
    const Mat2 l_factor = diffusion_matrices(fixed).L;

    std::vector<double> risk_vals(static_cast<std::size_t>(M), 0.0);
    std::vector<char> keep(static_cast<std::size_t>(M), 0);
    std::vector<double> bound_vals(static_cast<std::size_t>(M), 0.0);
    const SeedSpec mle_seed = seed.sub(0x21);
    const SeedSpec bound_seed = seed.sub(0x22);
    parallel_for(M, [&](std::int64_t i) {
        const std::size_t k = static_cast<std::size_t>(i);
        const PathStats stats =
            simulate_heston_stats(theta, fixed, T, n_steps, mle_seed.with_stream(i));
        const MleResult res = mle_drift(stats, fixed);
        if (!res.degenerate) {
            risk_vals[k] = loss(Vec2{(res.theta_hat[2] - theta.b) / r_bb,
                                     (res.theta_hat[3] - theta.beta) / r_bb});
            keep[k] = 1;
        }
        const SupercriticalPair pair = simulate_supercritical_limit_pair(
            theta.a, fixed.sigma1, theta.b, fixed.y0, limit_steps,
            bound_seed.sub(0x23).with_stream(i));
        Rng rng(bound_seed.with_stream(i));
        const double inv_root_mix = 1.0 / std::sqrt(-pair.y_end / theta.b);
        const Vec2 z{rng.normal(), rng.normal()};
        const Vec2 x = mul(l_factor, z);
        bound_vals[k] = loss(Vec2{inv_root_mix * x[0], inv_root_mix * x[1]});
    });

    MinimaxResult out;
    double rs = 0.0, rs2 = 0.0, bs = 0.0, bs2 = 0.0;
    std::int64_t kept = 0;
    for (std::int64_t i = 0; i < M; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        if (keep[k]) {
            rs += risk_vals[k];
            rs2 += risk_vals[k] * risk_vals[k];
            ++kept;
        }
        bs += bound_vals[k];
        bs2 += bound_vals[k] * bound_vals[k];
    }
    out.dropped = M - kept;
    if (kept == 0) throw std::runtime_error("minimax_experiment: all replicates degenerate");
    const double nk = static_cast<double>(kept), nm = static_cast<double>(M);
    out.mle_risk = rs / nk;
    out.mle_se = std::sqrt(std::max(0.0, rs2 / nk - out.mle_risk * out.mle_risk) / nk);
    out.bound = bs / nm;
    out.bound_se = std::sqrt(std::max(0.0, bs2 / nm - out.bound * out.bound) / nm);
    return out;
}

}  // namespace heston
