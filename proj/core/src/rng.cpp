#include "cohort_pulse/rng.hpp"

#include <cmath>

namespace cohort_pulse {

uint64_t mix_seed(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomStream RandomStream::derive(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
    uint64_t s = mix_seed(seed);
    s = mix_seed(s ^ (a + 0x0123456789abcdefULL));
    s = mix_seed(s ^ (b + 0xfedcba9876543210ULL));
    s = mix_seed(s ^ c);
    return RandomStream(s);
}

double RandomStream::uniform() {
    return double(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

double RandomStream::skew_normal(double xi, double omega, double alpha) {
    const double delta = alpha / std::sqrt(1.0 + alpha * alpha);
    const double u0 = normal();
    const double u1 = normal();
    return xi + omega * (delta * std::fabs(u0) + std::sqrt(1.0 - delta * delta) * u1);
}

bool RandomStream::bernoulli(double p) { return uniform() < p; }

uint64_t RandomStream::below(uint64_t n) {
    return n == 0 ? 0 : engine_() % n;
}

}  // namespace cohort_pulse
