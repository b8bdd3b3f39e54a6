#pragma once

#include <cstdint>
#include <random>

namespace cohort_pulse {

/// Deterministic random stream with explicitly defined samplers, so draws are
/// identical across standard-library implementations and independent of how
/// work is scheduled across threads. Substreams are derived by mixing a seed
/// with stream labels.
class RandomStream {
public:
    explicit RandomStream(uint64_t seed) : engine_(seed) {}

    /// Substream for (seed, a, b, c); e.g. (participant, measure, purpose).
    static RandomStream derive(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0);

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Standard normal via Box-Muller.
    double normal();
    /// Azzalini representation: ξ + ω(δ|u₀| + √(1−δ²)·u₁).
    double skew_normal(double xi, double omega, double alpha);
    /// Bernoulli with probability p.
    bool bernoulli(double p);
    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer, used to mix substream labels into seeds.
uint64_t mix_seed(uint64_t x);

}  // namespace cohort_pulse
