#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "heston/path_stats.hpp"
#include "heston/sde.hpp"

// Integral functionals of an observed path and the pathwise identities
// used as numerical self-checks. Left-point evaluation throughout: the
// exact quadratic structure of the discrete likelihood depends on it.

namespace heston {

struct PathFunctionals {
    double int_y = 0.0;     // int_0^T Y ds
    double int_inv_y = 0.0; // int_0^T ds / Y
    double iw_inv = 0.0;    // int dW / sqrt(Y)
    double ib_inv = 0.0;    // int dB / sqrt(Y)
    double iw_sqrt = 0.0;   // int sqrt(Y) dW
    double ib_sqrt = 0.0;   // int sqrt(Y) dB
    double y_end = 0.0;
    double x_end = 0.0;
    double horizon = 0.0;
    bool has_increments = false;
    std::int64_t floor_hits = 0;
};

// full statistics pass over a stored path (same accumulation order as the
// fused streaming simulation, so results agree bitwise)
inline PathStats path_stats(const SamplePath& path, double floor_eps = kDefaultFloorEps) {
    const auto n = path.n_steps();
    if (n < 1) throw std::invalid_argument("path_stats: path needs at least one step");
    StatsAccumulator acc(path.dt, path.y[0], path.x[0], floor_eps);
    if (path.has_increments()) {
        for (std::int64_t i = 0; i < n; ++i)
            acc.step(path.y[i], path.y[i + 1] - path.y[i], path.x[i + 1] - path.x[i], path.dw[i],
                     path.db[i]);
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            acc.step(path.y[i], path.y[i + 1] - path.y[i], path.x[i + 1] - path.x[i]);
    }
    PathStats s = acc.finish(path.y[n], path.x[n]);
    s.clamp_hits = path.clamp_hits;
    return s;
}

inline PathFunctionals functionals(const SamplePath& path, double floor_eps = kDefaultFloorEps) {
    const PathStats s = path_stats(path, floor_eps);
    PathFunctionals f;
    f.int_y = s.sum_y;
    f.int_inv_y = s.sum_inv_y;
    f.iw_inv = s.sw_inv;
    f.ib_inv = s.sb_inv;
    f.iw_sqrt = s.sw_sqrt;
    f.ib_sqrt = s.sb_sqrt;
    f.y_end = s.y_end;
    f.x_end = s.x_end;
    f.horizon = s.horizon;
    f.has_increments = s.has_increments;
    f.floor_hits = s.floor_hits;
    return f;
}

// weight w(Y) applied to the drift-compensated increments
struct Weight {
    enum class Kind { OneOverY, Const, Affine } kind = Kind::Const;
    double c0 = 1.0;
    double c1 = 0.0;

    static Weight one_over_y() { return {Kind::OneOverY, 0.0, 0.0}; }
    static Weight constant() { return {Kind::Const, 1.0, 0.0}; }
    static Weight affine(double c0, double c1) { return {Kind::Affine, c0, c1}; }

    double operator()(double y, double floor_eps) const {
        switch (kind) {
            case Kind::OneOverY: return 1.0 / (y < floor_eps ? floor_eps : y);
            case Kind::Const: return c0;
            case Kind::Affine: return c0 + c1 * y;
        }
        return 0.0;
    }
};

// ( int w(Y) [dY - (a0 - b0 Y) ds],  int w(Y) [dX - (alpha0 - beta0 Y) ds] )
inline std::pair<double, double> observable_integrals(const SamplePath& path,
                                                      const DriftParams& theta0,
                                                      const Weight& weight,
                                                      double floor_eps = kDefaultFloorEps) {
    const auto n = path.n_steps();
    if (n < 1) throw std::invalid_argument("observable_integrals: empty path");
    double ry = 0.0, rx = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double y = path.y[i];
        const double w = weight(y, floor_eps);
        ry += w * (path.y[i + 1] - y - (theta0.a - theta0.b * y) * path.dt);
        rx += w * (path.x[i + 1] - path.x[i] - (theta0.alpha - theta0.beta * y) * path.dt);
    }
    return {ry, rx};
}

// Residual of the logarithmic identity
//   sigma1 int dW/sqrt(Y) = log Y_T - log y0 + (sigma1^2/2 - a) int ds/Y + b T.
// On a discrete path this is an O(sqrt(dt T)) Ito-correction error, not an
// algebraic zero; it must shrink under grid refinement.
inline double check_log_identity(const SamplePath& path, double a, double b,
                                 double floor_eps = kDefaultFloorEps) {
    if (!path.has_increments())
        throw std::invalid_argument("check_log_identity: path has no Brownian increments");
    const PathStats s = path_stats(path, floor_eps);
    if (s.floor_hits > 0 || s.y_end <= 0.0 || path.y[0] <= 0.0)
        throw std::domain_error("check_log_identity: Y at the floor, identity not evaluable");
    const double s1 = path.fixed.sigma1;
    const double rhs = std::log(s.y_end) - std::log(path.y[0]) +
                       (0.5 * s1 * s1 - a) * s.sum_inv_y + b * s.horizon;
    return s1 * s.sw_inv - rhs;
}

// Residual of the linear identity
//   sigma1 int sqrt(Y) dW = Y_T - y0 - a T + b int Y ds,
// which the Euler recursion satisfies exactly on clamp-free paths.
inline double check_linear_identity(const SamplePath& path, double a, double b,
                                    double floor_eps = kDefaultFloorEps) {
    if (!path.has_increments())
        throw std::invalid_argument("check_linear_identity: path has no Brownian increments");
    const PathStats s = path_stats(path, floor_eps);
    const double rhs = s.y_end - path.y[0] - a * s.horizon + b * s.sum_y;
    return path.fixed.sigma1 * s.sw_sqrt - rhs;
}

}  // namespace heston
