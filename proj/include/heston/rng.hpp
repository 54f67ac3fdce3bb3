#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace heston {

// SplitMix64 finalizer. Bijective on 64-bit words, used both as a stream
// mixer and to expand a seed into engine state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// One path / one replicate of Monte Carlo work is addressed by
// (master_seed, stream_index). The mapping to engine state is stateless:
// stream_index is folded into the master seed through two SplitMix64
// rounds, so distinct indices give unrelated streams and the same pair
// always reproduces the same path, independent of thread scheduling.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    SeedSpec with_stream(std::uint64_t idx) const { return {master_seed, idx}; }

    // derive a disjoint master seed for a named sub-phase of an experiment
    SeedSpec sub(std::uint64_t tag) const {
        std::uint64_t s = master_seed ^ (0xA0761D6478BD642FULL * (tag + 1));
        return {splitmix64(s), stream_index};
    }
};

// xoshiro256++ by Blackman and Vigna (public domain reference algorithm).
class Rng {
  public:
    explicit Rng(const SeedSpec& seed) {
        std::uint64_t s = seed.stream_index;
        std::uint64_t mixed = seed.master_seed ^ splitmix64(s);
        for (auto& w : state_) w = splitmix64(mixed);
        // state of all zeros is invalid; splitmix64 output makes this
        // practically impossible, guard anyway
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
        have_cached_normal_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on the open interval (0,1)
    double uniform01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    // standard normal via Box-Muller; one transform yields two values
    double normal() {
        if (have_cached_normal_) {
            have_cached_normal_ = false;
            return cached_normal_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        cached_normal_ = r * std::sin(t);
        have_cached_normal_ = true;
        return r * std::cos(t);
    }

    // Gamma(shape, 1) by Marsaglia-Tsang squeeze; shape < 1 handled by the
    // usual boost Gamma(shape) = Gamma(shape+1) * U^(1/shape)
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::domain_error("Rng::gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Poisson(mean): product-of-uniforms inversion for small means, PTRS
    // transformed rejection (Hormann 1993) otherwise
    long long poisson(double mean) {
        if (!(mean >= 0.0)) throw std::domain_error("Rng::poisson: mean must be >= 0");
        if (mean == 0.0) return 0;
        if (mean < 10.0) {
            const double limit = std::exp(-mean);
            long long k = 0;
            double p = uniform01();
            while (p > limit) {
                ++k;
                p *= uniform01();
            }
            return k;
        }
        const double smu = std::sqrt(mean);
        const double b = 0.931 + 2.53 * smu;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mean = std::log(mean);
        for (;;) {
            const double u = uniform01() - 0.5;
            const double v = uniform01();
            const double us = 0.5 - std::abs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
            const double rhs = -mean + kf * log_mean - std::lgamma(kf + 1.0);
            if (lhs <= rhs) return static_cast<long long>(kf);
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4]{};
    double cached_normal_ = 0.0;
    bool have_cached_normal_ = false;
};

}  // namespace heston
