#pragma once

#include <span>
#include <vector>

namespace cohort_pulse {

/// Azzalini skew-normal: f(x) = (2/ω) φ(z) Φ(αz), z = (x-ξ)/ω.
struct SkewNormalParams {
    double xi = 0.0;     // location
    double omega = 1.0;  // scale, > 0
    double alpha = 0.0;  // skewness

    friend bool operator==(const SkewNormalParams&, const SkewNormalParams&) = default;
};

double skew_normal_pdf(double x, const SkewNormalParams& p);
double skew_normal_log_pdf(double x, const SkewNormalParams& p);
double skew_normal_log_likelihood(std::span<const double> xs, const SkewNormalParams& p);

/// Mean and standard deviation of the distribution.
double skew_normal_mean(const SkewNormalParams& p);
double skew_normal_stddev(const SkewNormalParams& p);

/// Method-of-moments starting point: matches sample mean, variance, and
/// (clamped) skewness.
SkewNormalParams skew_normal_moment_init(std::span<const double> xs);

struct SkewNormalFitResult {
    SkewNormalParams params;
    double log_likelihood = 0.0;
    double init_log_likelihood = 0.0;  // at the moment initializer
    int iterations = 0;
};

/// Maximum-likelihood fit starting from the moment initializer. The returned
/// likelihood is never below the initializer's.
SkewNormalFitResult skew_normal_fit_mle(std::span<const double> xs);

/// Argmax of the density, located numerically on [ξ-5ω, ξ+5ω] by a coarse
/// grid plus local refinement to 1e-6·ω.
double skew_normal_mode(const SkewNormalParams& p);

/// Model-implied mean absolute deviation around the mode, by quadrature.
double skew_normal_mean_abs_dev(const SkewNormalParams& p);

}  // namespace cohort_pulse
