#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "asq/error.hpp"

namespace asq {

// log Gamma via the Lanczos approximation (g=7, n=9). Own implementation so
// sampler accept/reject decisions do not depend on the host libm.
inline double log_gamma(double x) {
    static const double coeff[9] = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::log(3.14159265358979323846 / std::sin(3.14159265358979323846 * x)) -
               log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = coeff[0];
    double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += coeff[i] / (x + i);
    return 0.91893853320467274178 /* log sqrt(2 pi) */ + (x + 0.5) * std::log(t) - t +
           std::log(a);
}

// Seedable counter-free PRNG stream: xoshiro256++ seeded through SplitMix64.
// Same (seed, stream) always reproduces the same variate sequence; the heavy
// samplers below are all hand-rolled for that reason.
class RandomStream {
  public:
    RandomStream() : RandomStream(0, 0) {}

    RandomStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {
        std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1));
        for (auto& s : state_) s = splitmix64(x);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

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

    // uniform on [0,1), 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0,1): both endpoints excluded, safe under log()
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        ASQ_CHECK(n > 0, "uniform_int(0)");
        // rejection to avoid modulo bias
        const std::uint64_t limit = ~std::uint64_t(0) - ~std::uint64_t(0) % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Box-Muller; the second variate is discarded to keep the stream stateless.
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.28318530717958647692 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential(double rate) {
        if (!(rate > 0)) throw domain_error("exponential: rate must be > 0");
        return -std::log(uniform_pos()) / rate;
    }

    // Poisson: multiplication method for small means, Hormann's PTRD above.
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0)) throw domain_error("poisson: mean must be >= 0");
        if (mean == 0) return 0;
        if (mean < 10.0) {
            const double limit = std::exp(-mean);
            double prod = uniform_pos();
            std::uint64_t k = 0;
            while (prod > limit) {
                prod *= uniform_pos();
                ++k;
            }
            return k;
        }
        return poisson_ptrd(mean);
    }

    // Marsaglia-Tsang; shape < 1 boosted through gamma(shape+1) * U^(1/shape)
    double gamma(double shape, double scale) {
        if (!(shape > 0) || !(scale > 0)) throw domain_error("gamma: shape/scale must be > 0");
        if (shape < 1.0) {
            const double u = uniform_pos();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
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
            const double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
        }
    }

    std::uint64_t binomial(std::uint64_t n, double p) {
        if (!(p >= 0.0 && p <= 1.0)) throw domain_error("binomial: p outside [0,1]");
        std::uint64_t k = 0;
        for (std::uint64_t i = 0; i < n; ++i)
            if (uniform01() < p) ++k;
        return k;
    }

    // draws without replacement from a pool of `good` + `bad`; returns #good taken
    std::uint64_t hypergeometric(std::uint64_t good, std::uint64_t bad, std::uint64_t draws) {
        ASQ_CHECK(draws <= good + bad, "hypergeometric: draws exceed pool");
        std::uint64_t taken_good = 0;
        for (std::uint64_t i = 0; i < draws; ++i) {
            const std::uint64_t remaining = good + bad;
            if (uniform01() * static_cast<double>(remaining) < static_cast<double>(good)) {
                ++taken_good;
                --good;
            } else {
                --bad;
            }
        }
        return taken_good;
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    // W. Hormann, "The transformed rejection method for generating Poisson
    // random variables" (PTRD), valid for mean >= 10.
    std::uint64_t poisson_ptrd(double mu) {
        const double smu = std::sqrt(mu);
        const double b = 0.931 + 2.53 * smu;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            double u = uniform01() - 0.5;
            double v = uniform_pos();
            const double us = 0.5 - std::fabs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            const double k = kf;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                k * std::log(mu) - mu - log_gamma(k + 1.0)) {
                return static_cast<std::uint64_t>(kf);
            }
        }
    }

    std::uint64_t state_[4];
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
};

}  // namespace asq
