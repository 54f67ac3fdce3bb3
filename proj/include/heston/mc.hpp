#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "heston/likelihood.hpp"
#include "heston/mle.hpp"
#include "heston/parallel.hpp"
#include "heston/regimes.hpp"
#include "heston/score_tests.hpp"
#include "heston/sde.hpp"

// Replicate orchestration, two-sample distribution distances and the
// empirical checkers for the local-asymptotic conditions. Replicate i of a
// job always runs on stream i of the job seed, so reports are identical
// across runs and across worker counts.

namespace heston {

// sup-distance of empirical CDFs by sort-merge; ties advance both samples
inline double two_sample_ks(std::vector<double> x, std::vector<double> y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("two_sample_ks: empty sample");
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double m = static_cast<double>(x.size());
    const double n = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n));
    }
    return d;
}

// energy distance 2 E|x - y| - E|x - x'| - E|y - y'| over all pairs
inline double energy_distance(const std::vector<std::vector<double>>& x,
                              const std::vector<std::vector<double>>& y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("energy_distance: empty sample");
    const std::size_t d = x.front().size();
    for (const auto& r : x)
        if (r.size() != d) throw std::invalid_argument("energy_distance: ragged rows");
    for (const auto& r : y)
        if (r.size() != d) throw std::invalid_argument("energy_distance: dimension mismatch");
    auto norm = [d](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double t = a[k] - b[k];
            s += t * t;
        }
        return std::sqrt(s);
    };
    double exy = 0.0, exx = 0.0, eyy = 0.0;
    for (const auto& a : x)
        for (const auto& b : y) exy += norm(a, b);
    for (const auto& a : x)
        for (const auto& b : x) exx += norm(a, b);
    for (const auto& a : y)
        for (const auto& b : y) eyy += norm(a, b);
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    return 2.0 * exy / (nx * ny) - exx / (nx * nx) - eyy / (ny * ny);
}

// row layout shared by finite-horizon statistics and limit draws:
// the scaled score vector and the 2x2 left factor of the information
inline const std::array<const char*, 7>& decomp_columns() {
    static const std::array<const char*, 7> cols{"delta_a", "delta_alpha", "delta_b",
                                                 "delta_beta", "g11", "g22", "g12"};
    return cols;
}

using DecompRow = std::array<double, 7>;

inline DecompRow decomp_row_finite(const PathStats& stats, const FixedCoeffs& fixed,
                                   const DriftParams& theta, const Vec4& r) {
    const Vec4 delta = delta_from_observables(stats, fixed, theta, r);
    return {delta[0], delta[1], delta[2], delta[3],
            r[0] * r[0] * stats.sum_inv_y, r[2] * r[2] * stats.sum_y,
            -r[0] * r[2] * stats.horizon};
}

inline DecompRow decomp_row_limit(const LimitDraw& draw) {
    return {draw.delta[0], draw.delta[1], draw.delta[2], draw.delta[3],
            draw.left.m[0][0], draw.left.m[1][1], draw.left.m[0][1]};
}

struct DecompSample {
    std::vector<DecompRow> rows;
    std::vector<std::int64_t> flags;  // floor hits per replicate
    std::int64_t flagged = 0;
};

inline LimitDraw sample_regime_limit(Regime regime, const DriftParams& theta,
                                     const FixedCoeffs& fixed, std::int64_t limit_steps,
                                     const SeedSpec& seed) {
    switch (regime) {
        case Regime::Subcritical: return sample_subcritical_limit(theta, fixed, seed);
        case Regime::Critical: return sample_critical_limit(theta, fixed, limit_steps, seed);
        case Regime::Supercritical:
            return sample_supercritical_limit(theta, fixed, limit_steps, seed);
    }
    throw std::logic_error("sample_regime_limit: unreachable");
}

inline DecompSample finite_decomposition_sample(Regime regime, const DriftParams& theta,
                                                const FixedCoeffs& fixed, double T,
                                                std::int64_t n_steps, std::int64_t M,
                                                const SeedSpec& seed) {
    if (classify_regime(theta.b) != regime)
        throw std::invalid_argument("finite_decomposition_sample: theta does not match regime");
    if (n_steps <= 0) n_steps = default_n_steps(T);
    const Vec4 r = scaling_matrix(regime, theta, T);
    DecompSample out;
    out.rows.resize(static_cast<std::size_t>(M));
    out.flags.resize(static_cast<std::size_t>(M));
    parallel_for(M, [&](std::int64_t i) {
        const PathStats stats = simulate_heston_stats(theta, fixed, T, n_steps, seed.with_stream(i));
        out.rows[static_cast<std::size_t>(i)] = decomp_row_finite(stats, fixed, theta, r);
        out.flags[static_cast<std::size_t>(i)] = stats.floor_hits;
    });
    for (auto f : out.flags)
        if (f > 0) ++out.flagged;
    if (2 * out.flagged > M)
        throw std::runtime_error("finite_decomposition_sample: more than half the replicates hit the floor");
    return out;
}

inline DecompSample limit_decomposition_sample(Regime regime, const DriftParams& theta,
                                               const FixedCoeffs& fixed, std::int64_t limit_steps,
                                               std::int64_t M, const SeedSpec& seed) {
    if (limit_steps <= 0) limit_steps = kLimitDrawSteps;
    DecompSample out;
    out.rows.resize(static_cast<std::size_t>(M));
    out.flags.assign(static_cast<std::size_t>(M), 0);
    parallel_for(M, [&](std::int64_t i) {
        const LimitDraw draw =
            sample_regime_limit(regime, theta, fixed, limit_steps, seed.with_stream(i));
        out.rows[static_cast<std::size_t>(i)] = decomp_row_limit(draw);
    });
    return out;
}

// h' Delta - h' J h / 2 reconstructed from a row (J = scaledG o Sinv)
inline double row_quadratic_exponent(const DecompRow& row, const Mat2& s_inv, const Vec4& h) {
    const Vec2 h1{h[0], h[1]}, h2{h[2], h[3]};
    const double lin = h[0] * row[0] + h[1] * row[1] + h[2] * row[2] + h[3] * row[3];
    const double quad_form = row[4] * quad(h1, s_inv, h1) + 2.0 * row[6] * quad(h1, s_inv, h2) +
                             row[5] * quad(h2, s_inv, h2);
    return lin - 0.5 * quad_form;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += x;
    const double m = s / n;
    double q = 0.0;
    for (double x : v) q += (x - m) * (x - m);
    return {m, std::sqrt(q / (n * (n - 1.0)))};
}

// ---------------------------------------------------------------------------
// empirical checks of the local-asymptotic conditions

struct LaqdjStat {
    Vec4 h{};
    MeanSe finite{};   // E exp{h'Delta_T - h'J_T h/2} under the generating measure
    MeanSe limit{};    // the same functional on limit-law draws
};

struct LaqFiniteBlock {
    double T = 0.0;
    double delta_q50 = 0.0, delta_q90 = 0.0, delta_q99 = 0.0;
    double info_q50 = 0.0, info_q90 = 0.0, info_q99 = 0.0;
    double pd_frequency = 0.0;  // fraction of replicates with J strictly PD
    std::int64_t flagged = 0;
};

struct LaqReport {
    Regime regime = Regime::Subcritical;
    std::vector<LaqFiniteBlock> finite;
    std::vector<LaqdjStat> laqdj;  // one entry per h, finite part at the largest T
    bool has_violation = false;    // supercritical h = (0,1,0,0) block below
    MeanSe violation_mc{};
    double violation_closed_form = 1.0;
};

namespace detail {
inline double quantile_sorted(std::vector<double>& v, double p) {
    std::sort(v.begin(), v.end());
    const double idx = p * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double w = idx - static_cast<double>(lo);
    return (1.0 - w) * v[lo] + w * v[hi];
}
}  // namespace detail

inline LaqReport check_laq_conditions(Regime regime, const DriftParams& theta,
                                      const FixedCoeffs& fixed, const std::vector<Vec4>& h_list,
                                      const std::vector<double>& T_list, std::int64_t M,
                                      const SeedSpec& seed, std::int64_t n_steps = 0,
                                      std::int64_t limit_steps = 0) {
    const Mat2 s_inv = diffusion_matrices(fixed).S_inv;
    LaqReport report;
    report.regime = regime;

    const DecompSample limit =
        limit_decomposition_sample(regime, theta, fixed, limit_steps, M, seed.sub(0x31));

    const DecompSample* last_finite = nullptr;
    std::vector<DecompSample> finite_samples;
    finite_samples.reserve(T_list.size());
    for (std::size_t t_idx = 0; t_idx < T_list.size(); ++t_idx) {
        const double T = T_list[t_idx];
        finite_samples.push_back(finite_decomposition_sample(
            regime, theta, fixed, T, n_steps > 0 ? n_steps : default_n_steps(T), M,
            seed.sub(0x32 + t_idx)));
        const DecompSample& fs = finite_samples.back();
        LaqFiniteBlock blk;
        blk.T = T;
        blk.flagged = fs.flagged;
        std::vector<double> dnorm, jnorm;
        dnorm.reserve(fs.rows.size());
        jnorm.reserve(fs.rows.size());
        std::int64_t pd = 0;
        for (const auto& row : fs.rows) {
            dnorm.push_back(std::sqrt(row[0] * row[0] + row[1] * row[1] + row[2] * row[2] +
                                      row[3] * row[3]));
            const Mat2 g{{{row[4], row[6]}, {row[6], row[5]}}};
            const Mat4 j = kron(g, s_inv);
            double fro = 0.0;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) fro += j.m[r][c] * j.m[r][c];
            jnorm.push_back(std::sqrt(fro));
            if (g.det() > 0.0 && g.m[0][0] > 0.0) ++pd;
        }
        blk.delta_q50 = detail::quantile_sorted(dnorm, 0.50);
        blk.delta_q90 = detail::quantile_sorted(dnorm, 0.90);
        blk.delta_q99 = detail::quantile_sorted(dnorm, 0.99);
        blk.info_q50 = detail::quantile_sorted(jnorm, 0.50);
        blk.info_q90 = detail::quantile_sorted(jnorm, 0.90);
        blk.info_q99 = detail::quantile_sorted(jnorm, 0.99);
        blk.pd_frequency = static_cast<double>(pd) / static_cast<double>(fs.rows.size());
        report.finite.push_back(blk);
        last_finite = &finite_samples.back();
    }

    for (const Vec4& h : h_list) {
        LaqdjStat stat;
        stat.h = h;
        std::vector<double> vals;
        vals.reserve(limit.rows.size());
        for (const auto& row : limit.rows) vals.push_back(std::exp(row_quadratic_exponent(row, s_inv, h)));
        stat.limit = mean_se(vals);
        if (last_finite != nullptr) {
            vals.clear();
            for (const auto& row : last_finite->rows)
                vals.push_back(std::exp(row_quadratic_exponent(row, s_inv, h)));
            stat.finite = mean_se(vals);
        }
        report.laqdj.push_back(stat);
    }

    if (regime == Regime::Supercritical) {
        report.has_violation = true;
        const Vec4 h_bad{0.0, 1.0, 0.0, 0.0};
        std::vector<double> vals;
        vals.reserve(limit.rows.size());
        for (const auto& row : limit.rows) vals.push_back(std::exp(row_quadratic_exponent(row, s_inv, h_bad)));
        report.violation_mc = mean_se(vals);
        report.violation_closed_form = laq_violation_value(theta, fixed);
    }
    return report;
}

// ---------------------------------------------------------------------------
// distribution distance between finite-horizon statistics and limit draws

struct DistanceReport {
    double T = 0.0;
    std::vector<std::string> coords;
    std::vector<double> ks;        // per coordinate, same order as coords
    std::vector<bool> gated;       // whether the coordinate belongs to the regime's comparison set
    double energy = 0.0;           // over the gated coordinates
    double median_info_gap = std::numeric_limits<double>::quiet_NaN();  // subcritical only
    std::int64_t flagged_finite = 0;
};

// indices of decomp_row coordinates compared against the limit, per regime
inline std::vector<std::pair<int, bool>> regime_comparison_coords(Regime regime) {
    switch (regime) {
        case Regime::Subcritical:
            return {{0, true}, {1, true}, {2, true}, {3, true}};
        case Regime::Critical:
            return {{0, true}, {1, true}, {2, true}, {3, true}, {4, true}, {5, true}};
        case Regime::Supercritical:
            // the (b, beta) block converges; g11 is reported but not gated
            return {{2, true}, {3, true}, {5, true}, {4, false}};
    }
    throw std::logic_error("regime_comparison_coords: unreachable");
}

inline std::vector<DistanceReport> check_convergence(Regime regime, const DriftParams& theta,
                                                     const FixedCoeffs& fixed,
                                                     const std::vector<double>& T_list,
                                                     std::int64_t M, const SeedSpec& seed,
                                                     std::int64_t n_steps = 0,
                                                     std::int64_t limit_steps = 0) {
    const DecompSample limit =
        limit_decomposition_sample(regime, theta, fixed, limit_steps, M, seed.sub(0x41));
    const auto coords = regime_comparison_coords(regime);

    Mat4 j_limit_closed{};
    if (regime == Regime::Subcritical) j_limit_closed = subcritical_info(theta, fixed);
    const Mat2 s_inv = diffusion_matrices(fixed).S_inv;

    std::vector<DistanceReport> reports;
    for (std::size_t t_idx = 0; t_idx < T_list.size(); ++t_idx) {
        const double T = T_list[t_idx];
        const DecompSample finite = finite_decomposition_sample(
            regime, theta, fixed, T, n_steps > 0 ? n_steps : default_n_steps(T), M,
            seed.sub(0x42 + t_idx));
        DistanceReport rep;
        rep.T = T;
        rep.flagged_finite = finite.flagged;

        std::vector<std::vector<double>> fin_gated, lim_gated;
        fin_gated.reserve(finite.rows.size());
        lim_gated.reserve(limit.rows.size());
        std::vector<int> gated_idx;
        for (const auto& [ci, gate] : coords) {
            std::vector<double> fx, lx;
            fx.reserve(finite.rows.size());
            lx.reserve(limit.rows.size());
            for (const auto& row : finite.rows) fx.push_back(row[ci]);
            for (const auto& row : limit.rows) lx.push_back(row[ci]);
            rep.coords.emplace_back(decomp_columns()[ci]);
            rep.gated.push_back(gate);
            rep.ks.push_back(two_sample_ks(fx, lx));
            if (gate) gated_idx.push_back(ci);
        }
        for (const auto& row : finite.rows) {
            std::vector<double> v;
            v.reserve(gated_idx.size());
            for (int ci : gated_idx) v.push_back(row[ci]);
            fin_gated.push_back(std::move(v));
        }
        for (const auto& row : limit.rows) {
            std::vector<double> v;
            v.reserve(gated_idx.size());
            for (int ci : gated_idx) v.push_back(row[ci]);
            lim_gated.push_back(std::move(v));
        }
        rep.energy = energy_distance(fin_gated, lim_gated);

        if (regime == Regime::Subcritical) {
            double worst = 0.0;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) {
                    std::vector<double> gaps;
                    gaps.reserve(finite.rows.size());
                    for (const auto& row : finite.rows) {
                        const Mat2 g{{{row[4], row[6]}, {row[6], row[5]}}};
                        const Mat4 j = kron(g, s_inv);
                        gaps.push_back(std::abs(j.m[r][c] - j_limit_closed.m[r][c]));
                    }
                    worst = std::max(worst, detail::quantile_sorted(gaps, 0.5));
                }
            rep.median_info_gap = worst;
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

// ---------------------------------------------------------------------------
// ergodic averages along one long path and the stationary marginal

struct ErgodicReport {
    double avg_y = 0.0;       // (1/T) int Y ds on one long path
    double avg_inv_y = 0.0;   // (1/T) int ds/Y
    double expected_y = 0.0;      // a/b
    double expected_inv_y = 0.0;  // 2b/(2a - sigma1^2)
    double gamma_ks = 0.0;    // marginal Y_T sample vs stationary Gamma draws
    std::int64_t floor_hits = 0;
};

inline ErgodicReport ergodic_check(const DriftParams& theta, const FixedCoeffs& fixed, double T,
                                   std::int64_t n_steps, const SeedSpec& seed,
                                   double marginal_T = 50.0, std::int64_t marginal_M = 10000) {
    theta.validate();
    fixed.validate();
    if (classify_regime(theta.b) != Regime::Subcritical)
        throw std::invalid_argument("ergodic_check: subcritical regime required");
    require_domain(theta.a, fixed.sigma1, /*allow_boundary=*/false, "ergodic_check");
    if (n_steps <= 0) n_steps = default_n_steps(T);

    ErgodicReport rep;
    const PathStats stats = simulate_heston_stats(theta, fixed, T, n_steps, seed.sub(0x51));
    rep.avg_y = stats.sum_y / stats.horizon;
    rep.avg_inv_y = stats.sum_inv_y / stats.horizon;
    rep.expected_y = theta.a / theta.b;
    rep.expected_inv_y = 2.0 * theta.b / (2.0 * theta.a - fixed.sigma1 * fixed.sigma1);
    rep.floor_hits = stats.floor_hits;

    // marginal at time marginal_T through exact transitions, one unit per step
    const auto n_exact = static_cast<std::int64_t>(std::max(1.0, std::ceil(marginal_T)));
    std::vector<double> marginal(static_cast<std::size_t>(marginal_M));
    const SeedSpec marg_seed = seed.sub(0x52);
    parallel_for(marginal_M, [&](std::int64_t i) {
        const auto y = simulate_cir_exact(theta.a, theta.b, fixed.sigma1, fixed.y0, marginal_T,
                                          n_exact, marg_seed.with_stream(i));
        marginal[static_cast<std::size_t>(i)] = y.back();
    });
    const GammaLaw law = stationary_law(theta.a, theta.b, fixed.sigma1);
    std::vector<double> gamma_draws(static_cast<std::size_t>(marginal_M));
    const SeedSpec gamma_seed = seed.sub(0x53);
    parallel_for(marginal_M, [&](std::int64_t i) {
        Rng rng(gamma_seed.with_stream(i));
        gamma_draws[static_cast<std::size_t>(i)] = law.sample(rng);
    });
    rep.gamma_ks = two_sample_ks(marginal, gamma_draws);
    return rep;
}

// ---------------------------------------------------------------------------
// generic replicate runner exposed to the CLI (CSV and JSON surface)

enum class JobKind {
    FiniteDecomposition,
    LimitDecomposition,
    SubcriticalScores,
    CriticalScores,
    MleScaledErrors,
};

struct McJob {
    JobKind kind = JobKind::FiniteDecomposition;
    Regime regime = Regime::Subcritical;
    DriftParams theta;
    FixedCoeffs fixed;
    double T = 100.0;
    std::int64_t n_steps = 0;      // 0 = default grid for T
    std::int64_t limit_steps = 0;  // 0 = default limit grid
    std::int64_t M = 1000;
    std::uint64_t master_seed = 0;

    void validate() const {
        theta.validate();
        fixed.validate();
        if (M < 1) throw std::invalid_argument("McJob: M must be >= 1");
    }
};

struct ReplicateMatrix {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::int64_t> flags;
    std::int64_t flagged = 0;
};

inline ReplicateMatrix run_replicates(const McJob& job) {
    job.validate();
    const SeedSpec seed{job.master_seed, 0};
    ReplicateMatrix out;
    auto from_decomp = [&out](const DecompSample& s) {
        out.columns.assign(decomp_columns().begin(), decomp_columns().end());
        out.rows.reserve(s.rows.size());
        for (const auto& r : s.rows) out.rows.emplace_back(r.begin(), r.end());
        out.flags = s.flags;
        out.flagged = s.flagged;
    };
    switch (job.kind) {
        case JobKind::FiniteDecomposition:
            from_decomp(finite_decomposition_sample(job.regime, job.theta, job.fixed, job.T,
                                                    job.n_steps, job.M, seed));
            return out;
        case JobKind::LimitDecomposition:
            from_decomp(limit_decomposition_sample(job.regime, job.theta, job.fixed,
                                                   job.limit_steps, job.M, seed));
            return out;
        case JobKind::SubcriticalScores:
        case JobKind::CriticalScores: {
            const bool sub = job.kind == JobKind::SubcriticalScores;
            out.columns = sub ? std::vector<std::string>{"s1", "s2", "s3", "s4"}
                              : std::vector<std::string>{"s1", "s2"};
            const std::int64_t n = job.n_steps > 0 ? job.n_steps : default_n_steps(job.T);
            out.rows.resize(static_cast<std::size_t>(job.M));
            out.flags.resize(static_cast<std::size_t>(job.M));
            parallel_for(job.M, [&](std::int64_t i) {
                const PathStats stats =
                    simulate_heston_stats(job.theta, job.fixed, job.T, n, seed.with_stream(i));
                std::vector<double> row;
                if (sub) {
                    const Vec4 s = subcritical_scores(stats, job.theta, job.fixed);
                    row.assign(s.begin(), s.end());
                } else {
                    const Vec2 s = critical_scores(stats, job.theta, job.fixed);
                    row.assign(s.begin(), s.end());
                }
                out.rows[static_cast<std::size_t>(i)] = std::move(row);
                out.flags[static_cast<std::size_t>(i)] = stats.floor_hits;
            });
            break;
        }
        case JobKind::MleScaledErrors: {
            out.columns = {"err_a", "err_alpha", "err_b", "err_beta"};
            const std::int64_t n = job.n_steps > 0 ? job.n_steps : default_n_steps(job.T);
            const ScaledErrors errs = scaled_error_distribution(job.regime, job.theta, job.fixed,
                                                                job.T, n, job.M, seed);
            for (const auto& r : errs.rows) out.rows.emplace_back(r.begin(), r.end());
            out.flags.assign(out.rows.size(), 0);
            out.flagged = errs.dropped;
            return out;
        }
    }
    for (auto f : out.flags)
        if (f > 0) ++out.flagged;
    if (2 * out.flagged > job.M)
        throw std::runtime_error("run_replicates: more than half the replicates flagged");
    return out;
}

}  // namespace heston
