#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "heston/linalg.hpp"

// Parameter containers and the fixed diffusion geometry of the model
//
//   dY = (a - b Y) dt + sigma1 sqrt(Y) dW
//   dX = (alpha - beta Y) dt + sigma2 sqrt(Y) (rho dW + sqrt(1-rho^2) dB)
//
// The diffusion coefficients (sigma1, sigma2, rho) and the initial state
// (y0, x0) are fixed and known; inference concerns the drift vector
// theta = (a, alpha, b, beta) only.

namespace heston {

struct FixedCoeffs {
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.0;
    double y0 = 1.0;
    double x0 = 0.0;

    void validate() const {
        if (!(std::isfinite(sigma1) && sigma1 > 0.0))
            throw std::invalid_argument("FixedCoeffs: sigma1 must be finite and > 0");
        if (!(std::isfinite(sigma2) && sigma2 > 0.0))
            throw std::invalid_argument("FixedCoeffs: sigma2 must be finite and > 0");
        if (!(std::isfinite(rho) && rho > -1.0 && rho < 1.0))
            throw std::invalid_argument("FixedCoeffs: rho must lie in (-1, 1)");
        if (!(std::isfinite(y0) && y0 > 0.0))
            throw std::invalid_argument("FixedCoeffs: y0 must be finite and > 0");
        if (!std::isfinite(x0)) throw std::invalid_argument("FixedCoeffs: x0 must be finite");
    }
};

struct DriftParams {
    double a = 1.0;
    double alpha = 0.0;
    double b = 1.0;
    double beta = 0.0;

    void validate() const {
        if (!(std::isfinite(a) && a > 0.0))
            throw std::invalid_argument("DriftParams: a must be finite and > 0");
        if (!(std::isfinite(alpha) && std::isfinite(b) && std::isfinite(beta)))
            throw std::invalid_argument("DriftParams: alpha, b, beta must be finite");
    }

    Vec4 as_vec() const { return {a, alpha, b, beta}; }

    static DriftParams from_vec(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

    DriftParams shifted(const Vec4& delta) const {
        return {a + delta[0], alpha + delta[1], b + delta[2], beta + delta[3]};
    }
};

enum class Regime { Subcritical, Critical, Supercritical };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Critical: return "critical";
        case Regime::Supercritical: return "supercritical";
    }
    return "?";
}

// sign of the mean-reversion coefficient decides the regime
inline Regime classify_regime(double b) {
    if (b > 0.0) return Regime::Subcritical;
    if (b < 0.0) return Regime::Supercritical;
    return Regime::Critical;
}

enum class DomainStatus { Interior, Boundary, Invalid };

// Position of a relative to the sigma1^2 / 2 threshold that keeps the
// volatility process away from zero. The boundary a = sigma1^2 / 2 is
// acceptable only for supercritical likelihood work; call sites enforce
// their own policy on the returned status.
inline DomainStatus parameter_domain_check(double a, double sigma1, Regime /*regime*/ = Regime::Subcritical) {
    if (!(sigma1 > 0.0)) throw std::invalid_argument("parameter_domain_check: sigma1 must be > 0");
    const double bound = 0.5 * sigma1 * sigma1;
    if (a > bound) return DomainStatus::Interior;
    if (a == bound) return DomainStatus::Boundary;
    return DomainStatus::Invalid;
}

// requireInterior = true rejects the Feller boundary a = sigma1^2/2
inline void require_domain(double a, double sigma1, bool allow_boundary, const std::string& where) {
    const DomainStatus st = parameter_domain_check(a, sigma1);
    if (st == DomainStatus::Invalid || (st == DomainStatus::Boundary && !allow_boundary))
        throw std::invalid_argument(where + ": a must satisfy a " +
                                    (allow_boundary ? ">=" : ">") + " sigma1^2/2");
}

// Lower-triangular diffusion factor L, its Gram matrix S = L L^T and the
// cached analytic inverse of S.
//
//   L = [ sigma1              0                      ]
//       [ sigma2 rho          sigma2 sqrt(1-rho^2)   ]
//
//   S = [ sigma1^2            rho sigma1 sigma2 ]
//       [ rho sigma1 sigma2   sigma2^2          ]
struct DiffusionMatrices {
    Mat2 L;
    Mat2 S;
    Mat2 S_inv;
    Mat2 Lt_inv;  // inverse of L^T, the mixing matrix applied to score blocks
    Mat2 L_inv;
};

inline DiffusionMatrices diffusion_matrices(const FixedCoeffs& fixed) {
    fixed.validate();
    const double s1 = fixed.sigma1, s2 = fixed.sigma2, rho = fixed.rho;
    const double root = std::sqrt(1.0 - rho * rho);
    DiffusionMatrices d;
    d.L = Mat2{{{s1, 0.0}, {s2 * rho, s2 * root}}};
    d.S = Mat2{{{s1 * s1, rho * s1 * s2}, {rho * s1 * s2, s2 * s2}}};
    d.S_inv = d.S.inverse();
    d.L_inv = Mat2{{{1.0 / s1, 0.0}, {-rho / (s1 * root), 1.0 / (s2 * root)}}};
    d.Lt_inv = d.L_inv.transpose();
    return d;
}

}  // namespace heston
