#pragma once

#include <cmath>
#include <stdexcept>

#include "heston/functionals.hpp"
#include "heston/linalg.hpp"
#include "heston/model.hpp"
#include "heston/path_stats.hpp"

// Exact log Radon-Nikodym derivatives between drift parameters and their
// quadratic decomposition (Delta, J) under a diagonal scaling matrix.
//
// With D1 = (a~ - a, alpha~ - alpha), D2 = (b~ - b, beta~ - beta) the log
// likelihood ratio of theta~ against theta on [0,T] is
//
//   int (1/Y) [D1 - D2 Y]' Sinv [dY, dX]
//     - 1/2 int (1/Y) [D1 - D2 Y]' Sinv ([D1 - D2 Y] + 2 [a - bY, alpha - beta Y]) ds,
//
// evaluated with left-point sums and raw increments, so it needs only the
// path statistics (U, V, int 1/Y, int Y, T) and no Brownian increments.
// For theta~ = theta + r h this rearranges exactly (not asymptotically)
// into h' Delta - 1/2 h' J h with
//
//   Delta = r (I2 o inv(L')) M,    J = r ([int 1/Y, -T; -T, int Y] o Sinv) r,
//
// M being the four score integrals; "o" is the Kronecker product.

namespace heston {

struct QuadDecomposition {
    double log_lr = 0.0;
    Vec4 delta{};
    Mat4 info{};
    Vec4 scaling{};  // diagonal of r
    Vec4 h{};
    std::int64_t floor_hits = 0;
};

enum class DeltaMode {
    Auto,        // Brownian when increments are stored, observable otherwise
    Brownian,    // from the recorded dW, dB
    Observable,  // increments reconstructed from (dY, dX) under theta
};

inline double log_rn(const PathStats& stats, const FixedCoeffs& fixed, const DriftParams& theta,
                     const DriftParams& theta_tilde) {
    theta.validate();
    theta_tilde.validate();
    require_domain(theta.a, fixed.sigma1, /*allow_boundary=*/true, "log_rn");
    require_domain(theta_tilde.a, fixed.sigma1, /*allow_boundary=*/true, "log_rn");
    const Mat2 sinv = diffusion_matrices(fixed).S_inv;

    const Vec2 d1{theta_tilde.a - theta.a, theta_tilde.alpha - theta.alpha};
    const Vec2 d2{theta_tilde.b - theta.b, theta_tilde.beta - theta.beta};
    const Vec2 base_lin{theta.a, theta.alpha};
    const Vec2 base_slope{theta.b, theta.beta};
    const Vec2 v{stats.y_end - stats.y_start, stats.x_end - stats.x_start};

    const double stoch = quad(d1, sinv, stats.u) - quad(d2, sinv, v);
    const double quadratic = quad(d1, sinv, d1) * stats.sum_inv_y -
                             2.0 * quad(d1, sinv, d2) * stats.horizon +
                             quad(d2, sinv, d2) * stats.sum_y;
    const double cross = quad(d1, sinv, base_lin) * stats.sum_inv_y -
                         (quad(d1, sinv, base_slope) + quad(d2, sinv, base_lin)) * stats.horizon +
                         quad(d2, sinv, base_slope) * stats.sum_y;
    return stoch - 0.5 * quadratic - cross;
}

inline double log_rn(const SamplePath& path, const DriftParams& theta,
                     const DriftParams& theta_tilde, double floor_eps = kDefaultFloorEps) {
    return log_rn(path_stats(path, floor_eps), path.fixed, theta, theta_tilde);
}

// Delta from increments reconstructed through the diffusion map: with
// P = sum (1/Y)[dY - (a-bY)dt, dX - ...] and Q the unweighted analogue,
// the two blocks are diag(r1,r2) Sinv P and -diag(r3,r4) Sinv Q.
inline Vec4 delta_from_observables(const PathStats& stats, const FixedCoeffs& fixed,
                                   const DriftParams& theta, const Vec4& scaling) {
    const Mat2 sinv = diffusion_matrices(fixed).S_inv;
    const Vec2 p = mul(sinv, stats.weighted_residual(theta));
    const Vec2 q = mul(sinv, stats.plain_residual(theta));
    return {scaling[0] * p[0], scaling[1] * p[1], -scaling[2] * q[0], -scaling[3] * q[1]};
}

inline Vec4 delta_from_observables(const SamplePath& path, const DriftParams& theta,
                                   const Vec4& scaling, double floor_eps = kDefaultFloorEps) {
    return delta_from_observables(path_stats(path, floor_eps), path.fixed, theta, scaling);
}

// Delta from the recorded Brownian increments; agrees with the observable
// mode to rounding on Euler paths generated under the same theta.
inline Vec4 delta_from_brownian(const PathStats& stats, const FixedCoeffs& fixed,
                                const Vec4& scaling) {
    if (!stats.has_increments)
        throw std::invalid_argument("delta_from_brownian: path carries no increments");
    const Mat2 lt_inv = diffusion_matrices(fixed).Lt_inv;
    const Vec2 top = mul(lt_inv, Vec2{stats.sw_inv, stats.sb_inv});
    const Vec2 bot = mul(lt_inv, Vec2{-stats.sw_sqrt, -stats.sb_sqrt});
    return {scaling[0] * top[0], scaling[1] * top[1], scaling[2] * bot[0], scaling[3] * bot[1]};
}

// J = r (G o Sinv) r with G the 2x2 gram factor of the path
inline Mat4 info_matrix(const PathStats& stats, const FixedCoeffs& fixed, const Vec4& scaling) {
    const Mat2 sinv = diffusion_matrices(fixed).S_inv;
    const Mat2 g = stats.gram();
    Mat4 j = kron(g, sinv);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) j.m[i][k] *= scaling[i] * scaling[k];
    return j;
}

inline QuadDecomposition quad_decomposition(const PathStats& stats, const FixedCoeffs& fixed,
                                            const DriftParams& theta, const Vec4& scaling,
                                            const Vec4& h, DeltaMode mode = DeltaMode::Auto) {
    theta.validate();
    for (double r : scaling)
        if (!(r > 0.0)) throw std::invalid_argument("quad_decomposition: scaling must be positive");
    const double a_shifted = theta.a + scaling[0] * h[0];
    require_domain(a_shifted, fixed.sigma1, /*allow_boundary=*/true, "quad_decomposition(a + r1 h1)");
    require_domain(theta.a, fixed.sigma1, /*allow_boundary=*/true, "quad_decomposition");

    QuadDecomposition out;
    out.scaling = scaling;
    out.h = h;
    out.floor_hits = stats.floor_hits;
    const bool brownian = mode == DeltaMode::Brownian ||
                          (mode == DeltaMode::Auto && stats.has_increments);
    out.delta = brownian ? delta_from_brownian(stats, fixed, scaling)
                         : delta_from_observables(stats, fixed, theta, scaling);
    out.info = info_matrix(stats, fixed, scaling);
    out.log_lr = dot(h, out.delta) - 0.5 * quad(h, out.info, h);
    return out;
}

inline QuadDecomposition quad_decomposition(const SamplePath& path, const DriftParams& theta,
                                            const Vec4& scaling, const Vec4& h,
                                            DeltaMode mode = DeltaMode::Auto,
                                            double floor_eps = kDefaultFloorEps) {
    return quad_decomposition(path_stats(path, floor_eps), path.fixed, theta, scaling, h, mode);
}

}  // namespace heston
