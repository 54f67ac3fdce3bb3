#pragma once

#include <cmath>
#include <cstdint>

#include "heston/linalg.hpp"
#include "heston/model.hpp"

namespace heston {

// Sufficient statistics of one observed path for every drift-parameter
// computation in this library. All integrals are left-point sums (Ito
// convention); 1/Y terms floor the integrand at floor_eps and count how
// often the floor was active. The statistics are parameter-free: scores,
// log-likelihood ratios and the MLE for any theta are assembled from them
// afterwards, which keeps Monte Carlo passes single-sweep and storage-free.
//
//   sum_inv_y = sum dt / Y_i            sum_y = sum Y_i dt
//   u         = sum (1/Y_i) [dY_i, dX_i]
//   sw_inv    = sum dW_i / sqrt(Y_i)    sw_sqrt = sum sqrt(Y_i) dW_i
//   (sb_* likewise with dB; present only when increments were recorded)
struct PathStats {
    std::int64_t n_steps = 0;
    double dt = 0.0;
    double horizon = 0.0;
    double y_start = 0.0, x_start = 0.0;
    double y_end = 0.0, x_end = 0.0;
    double min_y = 0.0;

    double sum_inv_y = 0.0;
    double sum_y = 0.0;
    Vec2 u{0.0, 0.0};

    bool has_increments = false;
    double sw_inv = 0.0, sb_inv = 0.0;
    double sw_sqrt = 0.0, sb_sqrt = 0.0;

    std::int64_t floor_hits = 0;  // left endpoints below floor_eps
    std::int64_t clamp_hits = 0;  // Euler proposals truncated at zero

    // left factor of the unscaled observed information, [int 1/Y, -T; -T, int Y]
    Mat2 gram() const { return Mat2{{{sum_inv_y, -horizon}, {-horizon, sum_y}}}; }

    // sum (1/Y_i) [dY_i - (a - b Y_i) dt, dX_i - (alpha - beta Y_i) dt]
    Vec2 weighted_residual(const DriftParams& th) const {
        return {u[0] - th.a * sum_inv_y + th.b * horizon,
                u[1] - th.alpha * sum_inv_y + th.beta * horizon};
    }

    // sum [dY_i - (a - b Y_i) dt, dX_i - (alpha - beta Y_i) dt]
    Vec2 plain_residual(const DriftParams& th) const {
        return {(y_end - y_start) - th.a * horizon + th.b * sum_y,
                (x_end - x_start) - th.alpha * horizon + th.beta * sum_y};
    }
};

class StatsAccumulator {
  public:
    StatsAccumulator(double dt, double y_start, double x_start, double floor_eps)
        : floor_eps_(floor_eps) {
        stats_.dt = dt;
        stats_.y_start = y_start;
        stats_.x_start = x_start;
        stats_.y_end = y_start;
        stats_.x_end = x_start;
        stats_.min_y = y_start;
    }

    // one grid cell with left endpoint (y, x) and raw increments (dy, dx)
    void step(double y, double dy, double dx) {
        const double yf = y < floor_eps_ ? floor_eps_ : y;
        if (y < floor_eps_) ++stats_.floor_hits;
        const double inv = 1.0 / yf;
        stats_.sum_inv_y += stats_.dt * inv;
        stats_.sum_y += stats_.dt * y;
        stats_.u[0] += inv * dy;
        stats_.u[1] += inv * dx;
        if (y < stats_.min_y) stats_.min_y = y;
        ++stats_.n_steps;
    }

    // same cell, with the driving Brownian increments also known
    void step(double y, double dy, double dx, double dw, double db) {
        const double yf = y < floor_eps_ ? floor_eps_ : y;
        const double rsq = 1.0 / std::sqrt(yf);
        const double sq = std::sqrt(y < 0.0 ? 0.0 : y);
        stats_.sw_inv += rsq * dw;
        stats_.sb_inv += rsq * db;
        stats_.sw_sqrt += sq * dw;
        stats_.sb_sqrt += sq * db;
        stats_.has_increments = true;
        step(y, dy, dx);
    }

    void note_clamp() { ++stats_.clamp_hits; }

    // endpoints come from the caller so that stored paths and streaming
    // simulation produce bit-identical statistics
    PathStats finish(double y_end, double x_end) {
        stats_.y_end = y_end;
        stats_.x_end = x_end;
        stats_.horizon = stats_.dt * static_cast<double>(stats_.n_steps);
        return stats_;
    }

  private:
    PathStats stats_;
    double floor_eps_;
};

inline constexpr double kDefaultFloorEps = 1e-12;

}  // namespace heston
