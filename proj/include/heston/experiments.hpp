#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "heston/likelihood.hpp"
#include "heston/mc.hpp"
#include "heston/mle.hpp"
#include "heston/regimes.hpp"
#include "heston/score_tests.hpp"

// Reusable experiment drivers shared by the CLI and the acceptance suite.

namespace heston {

// uniform draw from the centered closed ball of the given radius
inline Vec4 random_h_ball(Rng& rng, double radius) {
    Vec4 z{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    const double n = std::sqrt(dot(z, z));
    const double r = radius * std::pow(rng.uniform01(), 0.25) / n;
    return {r * z[0], r * z[1], r * z[2], r * z[3]};
}

// ---------------------------------------------------------------------------
// exact quadratic identity sweep over random admissible configurations

struct QuadSweepRow {
    double log_lr = 0.0;
    double rel_residual = 0.0;
    Regime regime = Regime::Subcritical;
};

struct QuadSweep {
    std::vector<QuadSweepRow> rows;
    double max_rel_residual = 0.0;
    std::int64_t redraws = 0;  // configurations rejected for floor or clamp hits
};

inline QuadSweep run_quad_sweep(std::int64_t n_configs, double T, std::int64_t n_steps,
                                const SeedSpec& seed, double h_radius = 2.0) {
    QuadSweep sweep;
    sweep.rows.resize(static_cast<std::size_t>(n_configs));
    std::vector<std::int64_t> redraws(static_cast<std::size_t>(n_configs), 0);
    parallel_for(n_configs, [&](std::int64_t k) {
        const Regime regime = k % 3 == 0   ? Regime::Subcritical
                              : k % 3 == 1 ? Regime::Critical
                                           : Regime::Supercritical;
        for (std::int64_t attempt = 0;; ++attempt) {
            Rng rng(seed.sub(0x60).with_stream(
                static_cast<std::uint64_t>(k) * 1024 + static_cast<std::uint64_t>(attempt)));
            FixedCoeffs fixed;
            fixed.sigma1 = 0.4 + 0.8 * rng.uniform01();
            fixed.sigma2 = 0.4 + 1.1 * rng.uniform01();
            fixed.rho = -0.8 + 1.6 * rng.uniform01();
            fixed.y0 = 0.5 + 1.5 * rng.uniform01();
            fixed.x0 = -1.0 + 2.0 * rng.uniform01();
            DriftParams theta;
            theta.a = 0.5 * fixed.sigma1 * fixed.sigma1 + 0.3 + 1.2 * rng.uniform01();
            theta.alpha = -1.0 + 2.0 * rng.uniform01();
            theta.beta = -1.0 + 2.0 * rng.uniform01();
            theta.b = regime == Regime::Subcritical    ? 0.2 + 1.3 * rng.uniform01()
                      : regime == Regime::Supercritical ? -(0.2 + 1.3 * rng.uniform01())
                                                        : 0.0;
            const Vec4 r = scaling_matrix(regime, theta, T);
            Vec4 h = random_h_ball(rng, h_radius);
            for (int tries = 0; theta.a + r[0] * h[0] < 0.5 * fixed.sigma1 * fixed.sigma1; ++tries) {
                if (tries > 64) h[0] = std::abs(h[0]);
                else h = random_h_ball(rng, h_radius);
            }

            const PathStats stats = simulate_heston_stats(
                theta, fixed, T, n_steps, seed.sub(0x61).with_stream(
                    static_cast<std::uint64_t>(k) * 1024 + static_cast<std::uint64_t>(attempt)));
            if (stats.floor_hits > 0 || stats.clamp_hits > 0) {
                ++redraws[static_cast<std::size_t>(k)];
                continue;
            }
            const double direct = log_rn(stats, fixed, theta,
                                         theta.shifted({r[0] * h[0], r[1] * h[1], r[2] * h[2],
                                                        r[3] * h[3]}));
            const QuadDecomposition qd = quad_decomposition(stats, fixed, theta, r, h);
            QuadSweepRow row;
            row.regime = regime;
            row.log_lr = direct;
            row.rel_residual = std::abs(direct - qd.log_lr) / (1.0 + std::abs(direct));
            sweep.rows[static_cast<std::size_t>(k)] = row;
            break;
        }
    });
    for (auto r : redraws) sweep.redraws += r;
    for (const auto& row : sweep.rows)
        sweep.max_rel_residual = std::max(sweep.max_rel_residual, row.rel_residual);
    return sweep;
}

// ---------------------------------------------------------------------------
// martingale unit-mean check: MC mean of exp(log LR) under the base measure

struct UnitMeanResult {
    MeanSe stat;
    std::int64_t flagged = 0;
};

inline UnitMeanResult run_unit_mean(const DriftParams& theta, const DriftParams& theta_tilde,
                                    const FixedCoeffs& fixed, double T, std::int64_t n_steps,
                                    std::int64_t M, const SeedSpec& seed) {
    std::vector<double> vals(static_cast<std::size_t>(M));
    std::vector<char> flagged(static_cast<std::size_t>(M), 0);
    parallel_for(M, [&](std::int64_t i) {
        const PathStats stats = simulate_heston_stats(theta, fixed, T, n_steps, seed.with_stream(i));
        vals[static_cast<std::size_t>(i)] = std::exp(log_rn(stats, fixed, theta, theta_tilde));
        flagged[static_cast<std::size_t>(i)] = stats.floor_hits > 0 || stats.clamp_hits > 0;
    });
    UnitMeanResult out;
    out.stat = mean_se(vals);
    for (char f : flagged) out.flagged += f;
    return out;
}

// ---------------------------------------------------------------------------
// Laplace-transform oracle: exact-scheme MC of E exp(-2 mu^2 int_0^t Y) for
// the drift-only square-root process against the closed form

struct OracleResult {
    double mc_mean = 0.0;
    double mc_se = 0.0;
    double closed_form = 0.0;
};

inline OracleResult run_laplace_oracle(double a, double sigma1, double y0, double t, double mu,
                                       std::int64_t M, std::int64_t n_steps, const SeedSpec& seed) {
    if (n_steps <= 0) n_steps = kLimitDrawSteps;
    std::vector<double> vals(static_cast<std::size_t>(M));
    const double factor = -2.0 * mu * mu;
    parallel_for(M, [&](std::int64_t i) {
        const SupercriticalPair pair = simulate_supercritical_limit_pair(
            a, sigma1, -1.0 / t, y0, n_steps, seed.with_stream(i));
        vals[static_cast<std::size_t>(i)] = std::exp(factor * pair.int_y);
    });
    OracleResult out;
    const MeanSe ms = mean_se(vals);
    out.mc_mean = ms.mean;
    out.mc_se = ms.se;
    out.closed_form = cir_integral_laplace(a, sigma1, y0, t, mu);
    return out;
}

// ---------------------------------------------------------------------------
// size and power of one score test against the asymptotic envelope

struct PowerExperiment {
    PowerEstimate size;
    PowerEstimate power;
    double asymptotic = 0.0;
};

inline Mat4 test_information(const TestSpec& spec) {
    if (spec.regime == Regime::Subcritical) return subcritical_info(spec.theta0, spec.fixed);
    // critical (a, alpha) submodel information (a - sigma1^2/2)^{-1} Sinv,
    // extended block-diagonally; psi touches the first block only, so the
    // envelope formula is unaffected by the identity filler
    const double inv_info = 1.0 / (spec.theta0.a - 0.5 * spec.fixed.sigma1 * spec.fixed.sigma1);
    const Mat2 s_inv = diffusion_matrices(spec.fixed).S_inv;
    Mat4 out = Mat4::identity();
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) out.m[i][k] = inv_info * s_inv.m[i][k];
    return out;
}

inline PowerExperiment run_power_experiment(const TestSpec& spec, const Vec4& h, double T,
                                            std::int64_t n_steps, std::int64_t M,
                                            const SeedSpec& seed) {
    spec.validate();
    if (n_steps <= 0) n_steps = default_n_steps(T);
    PowerExperiment out;
    out.size = empirical_power(spec, Vec4{0, 0, 0, 0}, T, n_steps, M, seed.sub(0x71));
    out.power = empirical_power(spec, h, T, n_steps, M, seed.sub(0x72));
    Vec4 psi{0, 0, 0, 0};
    psi[spec.coordinate - 1] = 1.0;
    out.asymptotic = asymptotic_power(psi, h, test_information(spec), spec.level);
    return out;
}

// ---------------------------------------------------------------------------
// subcritical MLE: sample covariance of scaled errors against inv(J)

struct MleCovariance {
    Mat4 sample_cov{};
    Mat4 target{};  // inv(J_theta) = inv(K) o S
    Vec4 mean{};
    double max_rel_gap = 0.0;  // |cov - target| relative to the entry scale
    std::int64_t dropped = 0;
    std::int64_t floor_flagged = 0;
};

inline MleCovariance run_mle_covariance(const DriftParams& theta, const FixedCoeffs& fixed,
                                        double T, std::int64_t n_steps, std::int64_t M,
                                        const SeedSpec& seed) {
    const ScaledErrors errs =
        scaled_error_distribution(Regime::Subcritical, theta, fixed, T, n_steps, M, seed);
    if (errs.rows.size() < 2) throw std::runtime_error("run_mle_covariance: too few replicates");
    MleCovariance out;
    out.dropped = errs.dropped;
    out.floor_flagged = errs.floor_flagged;
    const double n = static_cast<double>(errs.rows.size());
    for (const auto& r : errs.rows)
        for (int k = 0; k < 4; ++k) out.mean[k] += r[k] / n;
    for (const auto& r : errs.rows)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                out.sample_cov.m[i][j] += (r[i] - out.mean[i]) * (r[j] - out.mean[j]) / (n - 1.0);

    const Mat2 k_inv = subcritical_info_left(theta, fixed).inverse();
    out.target = kron(k_inv, diffusion_matrices(fixed).S);
    const double tiny = 1e-12 * max_abs(out.target);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double t = out.target.m[i][j];
            const double scale = std::abs(t) > tiny
                                     ? std::abs(t)
                                     : std::sqrt(out.target.m[i][i] * out.target.m[j][j]);
            out.max_rel_gap =
                std::max(out.max_rel_gap, std::abs(out.sample_cov.m[i][j] - t) / scale);
        }
    return out;
}

}  // namespace heston
