#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "heston/model.hpp"
#include "heston/path_stats.hpp"
#include "heston/rng.hpp"

namespace heston {

enum class Scheme { EulerFullTruncation, ExactCir };

// A simulated path on the uniform grid t_i = i * dt, i = 0..n. When the
// Euler scheme generated it, the driving Brownian increments are kept so
// the path can be replayed or inverted exactly.
struct SamplePath {
    double dt = 0.0;
    DriftParams theta_gen;
    FixedCoeffs fixed;
    Scheme scheme = Scheme::EulerFullTruncation;
    std::vector<double> y;
    std::vector<double> x;
    std::vector<double> dw;  // empty for the exact scheme
    std::vector<double> db;
    std::int64_t clamp_hits = 0;

    std::int64_t n_steps() const { return static_cast<std::int64_t>(y.size()) - 1; }
    double horizon() const { return dt * static_cast<double>(n_steps()); }
    bool has_increments() const { return !dw.empty(); }
};

namespace detail {

// One full-truncation Euler step. The positive part enters drift and
// diffusion, and the new value is floored at zero, so stored paths are
// always non-negative and the recursion below is exactly invertible from
// (y, dy) wherever no clamp occurred.
struct EulerStepper {
    double a, b, alpha, beta, s1, s2rho, s2root, dt;

    EulerStepper(const DriftParams& th, const FixedCoeffs& fx, double dt_)
        : a(th.a),
          b(th.b),
          alpha(th.alpha),
          beta(th.beta),
          s1(fx.sigma1),
          s2rho(fx.sigma2 * fx.rho),
          s2root(fx.sigma2 * std::sqrt(1.0 - fx.rho * fx.rho)),
          dt(dt_) {}

    // returns true when the zero floor was applied
    bool advance(double& y, double& x, double dw, double db) const {
        const double yp = y > 0.0 ? y : 0.0;
        const double root = std::sqrt(yp);
        x += (alpha - beta * yp) * dt + root * (s2rho * dw + s2root * db);
        double ynew = y + (a - b * yp) * dt + s1 * root * dw;
        const bool clamped = ynew < 0.0;
        if (clamped) ynew = 0.0;
        y = ynew;
        return clamped;
    }
};

inline void check_horizon(double T, std::int64_t n_steps) {
    if (!(std::isfinite(T) && T > 0.0)) throw std::invalid_argument("simulate: T must be > 0");
    if (n_steps < 1) throw std::invalid_argument("simulate: n_steps must be >= 1");
}

}  // namespace detail

// default grid density: dt no coarser than 1/200, at least 1000 cells
inline std::int64_t default_n_steps(double T) {
    const double by_rate = std::ceil(200.0 * T);
    return static_cast<std::int64_t>(std::max(1000.0, by_rate));
}

// replay a path from given Brownian increments
inline SamplePath simulate_with_increments(const DriftParams& theta, const FixedCoeffs& fixed,
                                           double T, std::span<const double> dw,
                                           std::span<const double> db) {
    theta.validate();
    fixed.validate();
    if (dw.size() != db.size() || dw.empty())
        throw std::invalid_argument("simulate_with_increments: dW and dB sizes must match");
    const auto n = static_cast<std::int64_t>(dw.size());
    detail::check_horizon(T, n);

    SamplePath path;
    path.dt = T / static_cast<double>(n);
    path.theta_gen = theta;
    path.fixed = fixed;
    path.scheme = Scheme::EulerFullTruncation;
    path.y.resize(n + 1);
    path.x.resize(n + 1);
    path.dw.assign(dw.begin(), dw.end());
    path.db.assign(db.begin(), db.end());

    const detail::EulerStepper stepper(theta, fixed, path.dt);
    double y = fixed.y0, x = fixed.x0;
    path.y[0] = y;
    path.x[0] = x;
    for (std::int64_t i = 0; i < n; ++i) {
        if (stepper.advance(y, x, path.dw[i], path.db[i])) ++path.clamp_hits;
        path.y[i + 1] = y;
        path.x[i + 1] = x;
    }
    return path;
}

inline SamplePath simulate_heston_euler(const DriftParams& theta, const FixedCoeffs& fixed,
                                        double T, std::int64_t n_steps, const SeedSpec& seed) {
    detail::check_horizon(T, n_steps);
    const double dt = T / static_cast<double>(n_steps);
    const double root_dt = std::sqrt(dt);
    Rng rng(seed);
    std::vector<double> dw(n_steps), db(n_steps);
    for (std::int64_t i = 0; i < n_steps; ++i) {
        dw[i] = root_dt * rng.normal();
        db[i] = root_dt * rng.normal();
    }
    return simulate_with_increments(theta, fixed, T, dw, db);
}

// Fused simulate-and-summarize pass for Monte Carlo work: no path storage,
// identical recursion and draw order to simulate_heston_euler.
inline PathStats simulate_heston_stats(const DriftParams& theta, const FixedCoeffs& fixed,
                                       double T, std::int64_t n_steps, const SeedSpec& seed,
                                       double floor_eps = kDefaultFloorEps) {
    theta.validate();
    fixed.validate();
    detail::check_horizon(T, n_steps);
    const double dt = T / static_cast<double>(n_steps);
    const double root_dt = std::sqrt(dt);
    Rng rng(seed);
    const detail::EulerStepper stepper(theta, fixed, dt);
    StatsAccumulator acc(dt, fixed.y0, fixed.x0, floor_eps);
    double y = fixed.y0, x = fixed.x0;
    for (std::int64_t i = 0; i < n_steps; ++i) {
        const double dw = root_dt * rng.normal();
        const double db = root_dt * rng.normal();
        const double y_prev = y, x_prev = x;
        if (stepper.advance(y, x, dw, db)) acc.note_clamp();
        acc.step(y_prev, y - y_prev, x - x_prev, dw, db);
    }
    return acc.finish(y, x);
}

// Exact transition of the square-root diffusion dY = (a - b Y) dt + sigma sqrt(Y) dW
// over a step of length dt: a scaled noncentral chi-square, realized as the
// Gamma-Poisson mixture so no special-function inverses are needed.
inline double cir_exact_step(double y, double a, double b, double sigma, double dt, Rng& rng) {
    const double s2 = sigma * sigma;
    double c, decay;
    if (b != 0.0) {
        decay = std::exp(-b * dt);
        c = s2 * (1.0 - decay) / (4.0 * b);
    } else {
        decay = 1.0;
        c = 0.25 * s2 * dt;
    }
    const double shape0 = 2.0 * a / s2;  // half the degrees of freedom
    const double lambda = y * decay / c; // noncentrality
    const long long mix = lambda > 0.0 ? rng.poisson(0.5 * lambda) : 0;
    return 2.0 * c * rng.gamma(shape0 + static_cast<double>(mix));
}

// Exact-transition CIR sample on a uniform grid; strictly positive for
// 2a >= sigma1^2 after the first step, and valid from y0 = 0.
inline std::vector<double> simulate_cir_exact(double a, double b, double sigma1, double y0,
                                              double T, std::int64_t n_steps,
                                              const SeedSpec& seed) {
    if (!(std::isfinite(a) && a > 0.0)) throw std::invalid_argument("simulate_cir_exact: a must be > 0");
    if (!(std::isfinite(b) && std::isfinite(y0) && y0 >= 0.0))
        throw std::invalid_argument("simulate_cir_exact: bad b or y0");
    if (!(std::isfinite(sigma1) && sigma1 > 0.0))
        throw std::invalid_argument("simulate_cir_exact: sigma1 must be > 0");
    detail::check_horizon(T, n_steps);
    const double dt = T / static_cast<double>(n_steps);
    Rng rng(seed);
    std::vector<double> y(n_steps + 1);
    y[0] = y0;
    for (std::int64_t i = 0; i < n_steps; ++i) y[i + 1] = cir_exact_step(y[i], a, b, sigma1, dt, rng);
    return y;
}

// Terminal value, integrated value and terminal log-price component of the
// zero-started limit pair
//   dY = a dt + sigma1 sqrt(Y) dW,   dX = alpha dt + sigma2 sqrt(Y) (rho dW + sqrt(1-rho^2) dB)
// on [0,1] from (0,0). Y runs on exact transitions; the integral is a
// left-point sum. Since Y_1 - a = sigma1 int sqrt(Y) dW pathwise, X_1 given
// the Y path is Gaussian with mean alpha + (sigma2 rho / sigma1)(Y_1 - a)
// and variance sigma2^2 (1 - rho^2) int Y, which is sampled directly.
struct CriticalTriplet {
    double y1 = 0.0;
    double int_y = 0.0;
    double x1 = 0.0;
};

inline CriticalTriplet simulate_critical_limit_triplet(double a, double alpha,
                                                       const FixedCoeffs& fixed,
                                                       std::int64_t n_steps,
                                                       const SeedSpec& seed) {
    fixed.validate();
    require_domain(a, fixed.sigma1, /*allow_boundary=*/false, "simulate_critical_limit_triplet");
    if (n_steps < 1) throw std::invalid_argument("simulate_critical_limit_triplet: n_steps >= 1");
    const double dt = 1.0 / static_cast<double>(n_steps);
    Rng rng(seed);
    double y = 0.0;
    double inty = 0.0;
    for (std::int64_t i = 0; i < n_steps; ++i) {
        inty += y * dt;
        y = cir_exact_step(y, a, 0.0, fixed.sigma1, dt, rng);
    }
    CriticalTriplet out;
    out.y1 = y;
    out.int_y = inty;
    const double rho = fixed.rho;
    out.x1 = alpha + fixed.sigma2 * rho / fixed.sigma1 * (y - a) +
             fixed.sigma2 * std::sqrt((1.0 - rho * rho) * inty) * rng.normal();
    return out;
}

// Terminal and integrated value of the auxiliary process dY = a dt + sigma1 sqrt(Y) dW
// started at y0 and run to the horizon -1/b of the supercritical limit.
struct SupercriticalPair {
    double y_end = 0.0;
    double int_y = 0.0;
};

inline SupercriticalPair simulate_supercritical_limit_pair(double a, double sigma1, double b,
                                                           double y0, std::int64_t n_steps,
                                                           const SeedSpec& seed) {
    if (!(b < 0.0)) throw std::invalid_argument("simulate_supercritical_limit_pair: b must be < 0");
    if (!(y0 > 0.0)) throw std::invalid_argument("simulate_supercritical_limit_pair: y0 must be > 0");
    require_domain(a, sigma1, /*allow_boundary=*/true, "simulate_supercritical_limit_pair");
    if (n_steps < 1) throw std::invalid_argument("simulate_supercritical_limit_pair: n_steps >= 1");
    const double horizon = -1.0 / b;
    const double dt = horizon / static_cast<double>(n_steps);
    Rng rng(seed);
    double y = y0;
    double inty = 0.0;
    for (std::int64_t i = 0; i < n_steps; ++i) {
        inty += y * dt;
        y = cir_exact_step(y, a, 0.0, sigma1, dt, rng);
    }
    return {y, inty};
}

// CSV dump, one row per grid point; increments sit on the row of their
// left endpoint and are blank for the exact scheme and for the last row.
inline void write_csv(const SamplePath& path, std::ostream& os) {
    os << "t,Y,X,dW,dB\n";
    const auto n = path.n_steps();
    os.precision(17);
    for (std::int64_t i = 0; i <= n; ++i) {
        os << path.dt * static_cast<double>(i) << ',' << path.y[i] << ',' << path.x[i] << ',';
        if (path.has_increments() && i < n)
            os << path.dw[i] << ',' << path.db[i];
        else
            os << ',';
        os << '\n';
    }
}

}  // namespace heston
