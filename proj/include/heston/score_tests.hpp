#pragma once

#include <cmath>
#include <stdexcept>

#include "heston/linalg.hpp"
#include "heston/model.hpp"
#include "heston/parallel.hpp"
#include "heston/path_stats.hpp"
#include "heston/regimes.hpp"
#include "heston/sde.hpp"

// Asymptotically optimal one-sided score tests for the drift coordinates,
// the closed-form asymptotic power bound, and Monte Carlo power curves.

namespace heston {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// Inverse standard normal CDF, rational approximation of Wichura's
// algorithm AS 241 (PPND16), absolute error below 1e-15 on (0,1).
inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("norm_quantile: p must be in (0,1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

// upper alpha-quantile z_alpha of the standard normal law
inline double norm_upper_quantile(double alpha) { return norm_quantile(1.0 - alpha); }

struct TestSpec {
    Regime regime = Regime::Subcritical;
    int coordinate = 3;  // 1..4 picks a, alpha, b, beta
    DriftParams theta0;
    FixedCoeffs fixed;
    double level = 0.05;

    void validate() const {
        theta0.validate();
        fixed.validate();
        if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("TestSpec: level in (0,1)");
        if (coordinate < 1 || coordinate > 4) throw std::invalid_argument("TestSpec: coordinate in 1..4");
        if (regime == Regime::Critical && coordinate > 2)
            throw std::invalid_argument("TestSpec: critical tests exist only for coordinates 1, 2");
        if (regime == Regime::Supercritical)
            throw std::invalid_argument("TestSpec: no optimal test in the supercritical regime");
        if (regime == Regime::Subcritical && !(theta0.b > 0.0))
            throw std::invalid_argument("TestSpec: subcritical needs b0 > 0");
        if (regime == Regime::Critical && theta0.b != 0.0)
            throw std::invalid_argument("TestSpec: critical needs b0 = 0");
    }
};

// The four subcritical score statistics
//   S1 = sqrt(2a0 - s1^2) / (s1^2 sqrt(a0 b0 T)) int (a0 - b0 Y)/Y [dY - (a0 - b0 Y) ds]
//   S2 = the same weight against [dX - (alpha0 - beta0 Y) ds], normalized by s1 s2
//   S3 = 1 / (s1^2 sqrt(2 b0 T)) int (2a0 - s1^2 - 2 b0 Y)/Y [dY - (a0 - b0 Y) ds]
//   S4 = the same weight against dX, normalized by s1 s2
// all asymptotically standard normal under theta0.
inline Vec4 subcritical_scores(const PathStats& stats, const DriftParams& theta0,
                               const FixedCoeffs& fixed) {
    theta0.validate();
    if (!(theta0.b > 0.0)) throw std::invalid_argument("subcritical_scores: b0 must be > 0");
    require_domain(theta0.a, fixed.sigma1, /*allow_boundary=*/false, "subcritical_scores");
    const double s1 = fixed.sigma1, s2 = fixed.sigma2;
    const double s1sq = s1 * s1;
    const double T = stats.horizon;
    const Vec2 p = stats.weighted_residual(theta0);  // weight 1/Y
    const Vec2 q = stats.plain_residual(theta0);     // weight 1
    const double edge = 2.0 * theta0.a - s1sq;
    const double c12 = std::sqrt(edge) / std::sqrt(theta0.a * theta0.b * T);
    const double c34 = 1.0 / std::sqrt(2.0 * theta0.b * T);
    return {c12 / s1sq * (theta0.a * p[0] - theta0.b * q[0]),
            c12 / (s1 * s2) * (theta0.a * p[1] - theta0.b * q[1]),
            c34 / s1sq * (edge * p[0] - 2.0 * theta0.b * q[0]),
            c34 / (s1 * s2) * (edge * p[1] - 2.0 * theta0.b * q[1])};
}

inline Vec4 subcritical_scores(const SamplePath& path, const DriftParams& theta0,
                               double floor_eps = kDefaultFloorEps) {
    return subcritical_scores(path_stats(path, floor_eps), theta0, path.fixed);
}

// The two critical score statistics with 1/Y weight and sqrt(2 log T) rate
inline Vec2 critical_scores(const PathStats& stats, const DriftParams& theta0,
                            const FixedCoeffs& fixed) {
    theta0.validate();
    if (theta0.b != 0.0) throw std::invalid_argument("critical_scores: b0 must be 0");
    require_domain(theta0.a, fixed.sigma1, /*allow_boundary=*/false, "critical_scores");
    if (!(stats.horizon > 1.0)) throw std::invalid_argument("critical_scores: needs T > 1");
    const double s1 = fixed.sigma1, s2 = fixed.sigma2;
    const Vec2 p = stats.weighted_residual(theta0);
    const double c = std::sqrt(2.0 * theta0.a - s1 * s1) / std::sqrt(2.0 * std::log(stats.horizon));
    return {c / s1 * p[0], c / s2 * p[1]};
}

inline Vec2 critical_scores(const SamplePath& path, const DriftParams& theta0,
                            double floor_eps = kDefaultFloorEps) {
    return critical_scores(path_stats(path, floor_eps), theta0, path.fixed);
}

// Asymptotic power envelope of the level-alpha test of H0: <psi', theta> <= 0,
//   1 - Phi( z_alpha - <psi', h> / sqrt(<Jinv psi', psi'>) )
inline double asymptotic_power(const Vec4& psi_grad, const Vec4& h, const Mat4& info,
                               double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("asymptotic_power: alpha in (0,1)");
    if (dot(psi_grad, psi_grad) == 0.0)
        throw std::invalid_argument("asymptotic_power: psi gradient must be nonzero");
    const Vec4 jinv_psi = solve(info, psi_grad);
    const double denom = dot(jinv_psi, psi_grad);
    if (!(denom > 0.0)) throw std::domain_error("asymptotic_power: information not positive definite");
    return 1.0 - norm_cdf(norm_upper_quantile(alpha) - dot(psi_grad, h) / std::sqrt(denom));
}

struct PowerEstimate {
    double rate = 0.0;
    double se = 0.0;
    std::int64_t flagged = 0;
};

// Rejection frequency of the chosen score test under theta0 + r_{theta0,T} h
inline PowerEstimate empirical_power(const TestSpec& spec, const Vec4& h, double T,
                                     std::int64_t n_steps, std::int64_t M, const SeedSpec& seed) {
    spec.validate();
    if (M < 100) throw std::invalid_argument("empirical_power: M must be >= 100");
    const Vec4 r = scaling_matrix(spec.regime, spec.theta0, T);
    const DriftParams theta_sim =
        spec.theta0.shifted({r[0] * h[0], r[1] * h[1], r[2] * h[2], r[3] * h[3]});
    theta_sim.validate();
    require_domain(theta_sim.a, spec.fixed.sigma1, /*allow_boundary=*/true, "empirical_power");
    const double z_alpha = norm_upper_quantile(spec.level);

    std::vector<char> reject(static_cast<std::size_t>(M), 0);
    std::vector<char> flagged(static_cast<std::size_t>(M), 0);
    parallel_for(M, [&](std::int64_t i) {
        const PathStats stats =
            simulate_heston_stats(theta_sim, spec.fixed, T, n_steps, seed.with_stream(i));
        const double s = spec.regime == Regime::Subcritical
                             ? subcritical_scores(stats, spec.theta0, spec.fixed)[spec.coordinate - 1]
                             : critical_scores(stats, spec.theta0, spec.fixed)[spec.coordinate - 1];
        reject[static_cast<std::size_t>(i)] = s >= z_alpha ? 1 : 0;
        flagged[static_cast<std::size_t>(i)] = stats.floor_hits > 0 ? 1 : 0;
    });

    PowerEstimate out;
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < M; ++i) {
        hits += reject[static_cast<std::size_t>(i)];
        out.flagged += flagged[static_cast<std::size_t>(i)];
    }
    out.rate = static_cast<double>(hits) / static_cast<double>(M);
    out.se = std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(M));
    return out;
}

}  // namespace heston
