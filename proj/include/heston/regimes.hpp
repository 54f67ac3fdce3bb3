#pragma once

#include <cmath>
#include <stdexcept>

#include "heston/linalg.hpp"
#include "heston/model.hpp"
#include "heston/rng.hpp"
#include "heston/sde.hpp"

// Regime-specific scaling matrices, the closed-form subcritical information
// matrix, stationary facts of the subcritical volatility process, samplers
// for the limit pairs (Delta, J) of all three regimes, and closed-form
// Laplace oracles backing the Monte Carlo checks.

namespace heston {

// diagonal of the scaling matrix r_{theta,T}
//   subcritical:   (1/sqrt(T)) I4
//   critical:      diag(1/sqrt(log T), 1/sqrt(log T), 1/T, 1/T), needs T > 1
//   supercritical: diag(1, 1, e^{bT/2}, e^{bT/2}), needs b < 0
inline Vec4 scaling_matrix(Regime regime, const DriftParams& theta, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("scaling_matrix: T must be > 0");
    switch (regime) {
        case Regime::Subcritical: {
            const double r = 1.0 / std::sqrt(T);
            return {r, r, r, r};
        }
        case Regime::Critical: {
            if (!(T > 1.0)) throw std::invalid_argument("scaling_matrix: critical regime needs T > 1");
            const double r1 = 1.0 / std::sqrt(std::log(T));
            const double r2 = 1.0 / T;
            return {r1, r1, r2, r2};
        }
        case Regime::Supercritical: {
            if (!(theta.b < 0.0))
                throw std::invalid_argument("scaling_matrix: supercritical regime needs b < 0");
            const double r2 = std::exp(0.5 * theta.b * T);
            return {1.0, 1.0, r2, r2};
        }
    }
    throw std::logic_error("scaling_matrix: unreachable");
}

// limiting information matrix in the subcritical (LAN) case,
//   J = [ E(1/Yinf)  -1 ; -1  E(Yinf) ] o Sinv
// with E(Yinf) = a/b and E(1/Yinf) = 2b / (2a - sigma1^2)
inline Mat2 subcritical_info_left(const DriftParams& theta, const FixedCoeffs& fixed) {
    theta.validate();
    if (classify_regime(theta.b) != Regime::Subcritical)
        throw std::invalid_argument("subcritical_info: b must be > 0");
    require_domain(theta.a, fixed.sigma1, /*allow_boundary=*/false, "subcritical_info");
    const double s2 = fixed.sigma1 * fixed.sigma1;
    const double e_inv = 2.0 * theta.b / (2.0 * theta.a - s2);
    const double e_y = theta.a / theta.b;
    return Mat2{{{e_inv, -1.0}, {-1.0, e_y}}};
}

inline Mat4 subcritical_info(const DriftParams& theta, const FixedCoeffs& fixed) {
    return kron(subcritical_info_left(theta, fixed), diffusion_matrices(fixed).S_inv);
}

// stationary law of the subcritical volatility process: Gamma with
// shape 2a/sigma1^2 and rate 2b/sigma1^2
struct GammaLaw {
    double shape = 0.0;
    double rate = 0.0;

    // E(Yinf^kappa) for kappa > -shape, evaluated through log-Gamma
    double moment(double kappa) const {
        if (!(kappa > -shape)) throw std::invalid_argument("GammaLaw::moment: kappa <= -shape");
        return std::exp(std::lgamma(shape + kappa) - std::lgamma(shape) - kappa * std::log(rate));
    }

    double sample(Rng& rng) const { return rng.gamma(shape) / rate; }
};

inline GammaLaw stationary_law(double a, double b, double sigma1) {
    if (!(a > 0.0 && b > 0.0 && sigma1 > 0.0))
        throw std::invalid_argument("stationary_law: needs a > 0, b > 0, sigma1 > 0 (subcritical)");
    const double s2 = sigma1 * sigma1;
    return {2.0 * a / s2, 2.0 * b / s2};
}

// One draw of the regime-specific limit pair (Delta, J). J is always
// left o Sinv; aux carries the regime's random scalars (terminal and
// integrated limit volatility) for conditional-law tests.
struct LimitDraw {
    Vec4 delta{};
    Mat4 info{};
    Mat2 left{};
    Regime regime = Regime::Subcritical;
    Vec2 aux{0.0, 0.0};
};

namespace detail {
inline constexpr std::uint64_t kLimitNoiseTag = 0x11;
inline constexpr std::uint64_t kLimitPathTag = 0x12;
}  // namespace detail

// subcritical: Delta ~ N4(0, J), J the constant closed form; the factor of
// K o Sinv is chol(K) o inv(L'), exploiting the Kronecker structure
inline LimitDraw sample_subcritical_limit(const DriftParams& theta, const FixedCoeffs& fixed,
                                          const SeedSpec& seed) {
    const Mat2 left = subcritical_info_left(theta, fixed);
    const DiffusionMatrices dm = diffusion_matrices(fixed);
    const Mat4 factor = kron(chol_lower(left), dm.Lt_inv);
    Rng rng(seed.sub(detail::kLimitNoiseTag));
    const Vec4 z{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    LimitDraw draw;
    draw.regime = Regime::Subcritical;
    draw.left = left;
    draw.info = kron(left, dm.S_inv);
    draw.delta = mul(factor, z);
    return draw;
}

// critical:  Delta = [ (a - s1^2/2)^{-1/2} inv(L') Z2 ; Sinv (a - Y1, alpha - X1) ],
//            J     = [ (a - s1^2/2)^{-1}  0 ; 0  int_0^1 Y ] o Sinv
inline LimitDraw sample_critical_limit(const DriftParams& theta, const FixedCoeffs& fixed,
                                       std::int64_t n_steps, const SeedSpec& seed) {
    theta.validate();
    if (theta.b != 0.0) throw std::invalid_argument("sample_critical_limit: b must be 0");
    require_domain(theta.a, fixed.sigma1, /*allow_boundary=*/false, "sample_critical_limit");
    const DiffusionMatrices dm = diffusion_matrices(fixed);
    const CriticalTriplet trip = simulate_critical_limit_triplet(
        theta.a, theta.alpha, fixed, n_steps, seed.sub(detail::kLimitPathTag));
    Rng rng(seed.sub(detail::kLimitNoiseTag));
    const double inv_info = 1.0 / (theta.a - 0.5 * fixed.sigma1 * fixed.sigma1);
    const Vec2 top = mul(dm.Lt_inv, Vec2{rng.normal(), rng.normal()});
    const Vec2 bot = mul(dm.S_inv, Vec2{theta.a - trip.y1, theta.alpha - trip.x1});
    const double scale_top = std::sqrt(inv_info);

    LimitDraw draw;
    draw.regime = Regime::Critical;
    draw.left = Mat2{{{inv_info, 0.0}, {0.0, trip.int_y}}};
    draw.info = kron(draw.left, dm.S_inv);
    draw.delta = {scale_top * top[0], scale_top * top[1], bot[0], bot[1]};
    draw.aux = {trip.y1, trip.int_y};
    return draw;
}

// supercritical: with V~ = log Y~(-1/b) - log y0 - (a - s1^2/2) int Y~,
//   Delta = (I2 o inv(L')) [ V~/sigma1 ; Z1 ; sqrt(-Y~(-1/b)/b) Z2 ],
//   J     = [ int Y~  0 ; 0  -Y~(-1/b)/b ] o Sinv
inline LimitDraw sample_supercritical_limit(const DriftParams& theta, const FixedCoeffs& fixed,
                                            std::int64_t n_steps, const SeedSpec& seed) {
    theta.validate();
    fixed.validate();
    if (!(theta.b < 0.0)) throw std::invalid_argument("sample_supercritical_limit: b must be < 0");
    require_domain(theta.a, fixed.sigma1, /*allow_boundary=*/true, "sample_supercritical_limit");
    const DiffusionMatrices dm = diffusion_matrices(fixed);
    const SupercriticalPair pair = simulate_supercritical_limit_pair(
        theta.a, fixed.sigma1, theta.b, fixed.y0, n_steps, seed.sub(detail::kLimitPathTag));
    Rng rng(seed.sub(detail::kLimitNoiseTag));
    const double s1 = fixed.sigma1;
    const double vtilde =
        std::log(pair.y_end) - std::log(fixed.y0) - (theta.a - 0.5 * s1 * s1) * pair.int_y;
    const double mix = -pair.y_end / theta.b;
    const Vec2 top = mul(dm.Lt_inv, Vec2{vtilde / s1, rng.normal()});
    const double root_mix = std::sqrt(mix);
    const Vec2 bot = mul(dm.Lt_inv, Vec2{root_mix * rng.normal(), root_mix * rng.normal()});

    LimitDraw draw;
    draw.regime = Regime::Supercritical;
    draw.left = Mat2{{{pair.int_y, 0.0}, {0.0, mix}}};
    draw.info = kron(draw.left, dm.S_inv);
    draw.delta = {top[0], top[1], bot[0], bot[1]};
    draw.aux = {pair.y_end, pair.int_y};
    return draw;
}

// Closed form of E exp{ -2 mu^2 int_0^t Y~ du } for the drift-only
// square-root process dY~ = a dt + sigma1 sqrt(Y~) dW from y0:
//
//   cosh(sigma1 mu t)^{-2a/sigma1^2} * exp{ -(2 mu y0 / sigma1) tanh(sigma1 mu t) }.
//
// The tanh exponent must carry the minus sign: the left side is a Laplace
// transform of a non-negative variable, so it is <= 1 and decreasing in
// both mu and y0, which forces the sign. (The associated Riccati equation
// psi' = 4 mu^2 - sigma1^2 psi^2 / 2, psi(0) = 0 has the positive solution
// psi(t) = (2 mu / sigma1) tanh(sigma1 mu t), entering as exp{-y0 psi}.)
// The unit suite re-derives the sign against an exact-scheme Monte Carlo.
inline double cir_integral_laplace(double a, double sigma1, double y0, double t, double mu) {
    if (!(mu >= 0.0)) throw std::invalid_argument("cir_integral_laplace: mu must be >= 0");
    if (!(t > 0.0)) throw std::invalid_argument("cir_integral_laplace: t must be > 0");
    if (!(a > 0.0 && sigma1 > 0.0 && y0 >= 0.0))
        throw std::invalid_argument("cir_integral_laplace: bad parameters");
    if (mu == 0.0) return 1.0;
    const double z = sigma1 * mu * t;
    const double s2 = sigma1 * sigma1;
    return std::pow(std::cosh(z), -2.0 * a / s2) *
           std::exp(-(2.0 * mu * y0 / sigma1) * std::tanh(z));
}

// Value of E exp{ h' Delta - h' J h / 2 } at h = (0,1,0,0) for the
// supercritical limit pair; differs from 1, which is the failure of the
// unit-expectation condition in this regime. In closed form it equals
//   exp{ c/2 } E exp{ -(c/2) int_0^{-1/b} Y~ },   c = 1 / (sigma2^2 (1 - rho^2)).
inline double laq_violation_value(const DriftParams& theta, const FixedCoeffs& fixed) {
    theta.validate();
    fixed.validate();
    if (!(theta.b < 0.0)) throw std::invalid_argument("laq_violation_value: b must be < 0");
    require_domain(theta.a, fixed.sigma1, /*allow_boundary=*/true, "laq_violation_value");
    const double c = 1.0 / (fixed.sigma2 * fixed.sigma2 * (1.0 - fixed.rho * fixed.rho));
    const double mu = 0.5 * std::sqrt(c);  // 2 mu^2 = c / 2
    return std::exp(0.5 * c) *
           cir_integral_laplace(theta.a, fixed.sigma1, fixed.y0, -1.0 / theta.b, mu);
}

// E exp{ v' Z2 } = exp{ |v|^2 / 2 } for a standard normal pair
inline double gaussian_mgf_check(const Vec2& v) { return std::exp(0.5 * dot(v, v)); }

}  // namespace heston
