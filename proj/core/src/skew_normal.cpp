#include "cohort_pulse/skew_normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cohort_pulse/numeric.hpp"

namespace cohort_pulse {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // ½·log(2π)

// Largest |skewness| the family can produce (δ → 1 limit), minus a margin.
constexpr double kMaxAbsSkewness = 0.9952717;

}  // namespace

double skew_normal_log_pdf(double x, const SkewNormalParams& p) {
    const double z = (x - p.xi) / p.omega;
    return std::log(2.0) - std::log(p.omega) - 0.5 * z * z - kHalfLog2Pi +
           numeric::log_normal_cdf(p.alpha * z);
}

double skew_normal_pdf(double x, const SkewNormalParams& p) {
    return std::exp(skew_normal_log_pdf(x, p));
}

double skew_normal_log_likelihood(std::span<const double> xs, const SkewNormalParams& p) {
    if (p.omega <= 0.0) return -std::numeric_limits<double>::infinity();
    const double base = std::log(2.0) - std::log(p.omega) - kHalfLog2Pi;
    double ll = 0.0;
    for (double x : xs) {
        const double z = (x - p.xi) / p.omega;
        ll += base - 0.5 * z * z + numeric::log_normal_cdf(p.alpha * z);
    }
    return ll;
}

double skew_normal_mean(const SkewNormalParams& p) {
    const double delta = p.alpha / std::sqrt(1.0 + p.alpha * p.alpha);
    return p.xi + p.omega * delta * std::sqrt(2.0 / M_PI);
}

double skew_normal_stddev(const SkewNormalParams& p) {
    const double delta = p.alpha / std::sqrt(1.0 + p.alpha * p.alpha);
    return p.omega * std::sqrt(1.0 - 2.0 * delta * delta / M_PI);
}

SkewNormalParams skew_normal_moment_init(std::span<const double> xs) {
    const size_t n = xs.size();
    if (n < 3) throw std::invalid_argument("need at least 3 samples for moment init");

    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(n);
    double m2 = 0.0, m3 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= double(n);
    m3 /= double(n);

    const double sd = std::sqrt(m2);
    double skew = sd > 0.0 ? m3 / (sd * sd * sd) : 0.0;
    skew = std::clamp(skew, -kMaxAbsSkewness, kMaxAbsSkewness);

    // Invert the skewness formula for |δ|.
    const double abs_skew_23 = std::pow(std::fabs(skew), 2.0 / 3.0);
    const double c = std::pow((4.0 - M_PI) / 2.0, 2.0 / 3.0);
    double delta = std::sqrt(M_PI / 2.0 * abs_skew_23 / (abs_skew_23 + c));
    delta = std::copysign(std::min(delta, 0.999), skew);

    SkewNormalParams p;
    p.alpha = delta / std::sqrt(1.0 - delta * delta);
    p.omega = std::sqrt(m2 / (1.0 - 2.0 * delta * delta / M_PI));
    p.xi = mean - p.omega * delta * std::sqrt(2.0 / M_PI);
    return p;
}

SkewNormalFitResult skew_normal_fit_mle(std::span<const double> xs) {
    const SkewNormalParams init = skew_normal_moment_init(xs);
    const double init_ll = skew_normal_log_likelihood(xs, init);

    // Optimize in (ξ, log ω, α) so the scale stays positive.
    auto objective = [&](const std::vector<double>& u) {
        SkewNormalParams p{u[0], std::exp(u[1]), u[2]};
        return -skew_normal_log_likelihood(xs, p);
    };
    std::vector<double> start = {init.xi, std::log(init.omega), init.alpha};
    std::vector<double> steps = {0.1 * init.omega, 0.1, 0.5};
    auto res = numeric::nelder_mead(objective, start, steps, 1e-11, 600);

    SkewNormalFitResult out;
    out.params = {res.x[0], std::exp(res.x[1]), res.x[2]};
    out.log_likelihood = -res.f;
    out.init_log_likelihood = init_ll;
    out.iterations = res.iterations;
    if (out.log_likelihood < init_ll) {  // best-ever tracking makes this unreachable
        out.params = init;
        out.log_likelihood = init_ll;
    }
    return out;
}

double skew_normal_mode(const SkewNormalParams& p) {
    const double lo = p.xi - 5.0 * p.omega;
    const double hi = p.xi + 5.0 * p.omega;
    const int grid = 400;

    auto neg_log_pdf = [&](double x) { return -skew_normal_log_pdf(x, p); };

    double best_x = lo;
    double best_f = neg_log_pdf(lo);
    for (int i = 1; i <= grid; ++i) {
        const double x = lo + (hi - lo) * double(i) / double(grid);
        const double f = neg_log_pdf(x);
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
    }
    const double h = (hi - lo) / double(grid);
    const double a = std::max(lo, best_x - h);
    const double b = std::min(hi, best_x + h);
    auto m = numeric::brent_minimize(neg_log_pdf, a, b, 1e-6 * p.omega);
    return m.f < best_f ? m.x : best_x;
}

double skew_normal_mean_abs_dev(const SkewNormalParams& p) {
    const double m0 = skew_normal_mode(p);
    auto f = [&](double x) { return std::fabs(x - m0) * skew_normal_pdf(x, p); };
    // Panels of width ω/2 keep the adaptive rule from terminating on probe
    // points that all sit in a flat tail; the kink at the mode falls on a
    // panel edge.
    auto piecewise = [&](double a, double b) {
        const int panels = std::max(1, int(std::ceil((b - a) / (0.5 * p.omega))));
        double sum = 0.0;
        for (int i = 0; i < panels; ++i) {
            const double x0 = a + (b - a) * double(i) / panels;
            const double x1 = a + (b - a) * double(i + 1) / panels;
            sum += numeric::integrate(f, x0, x1, 1e-12);
        }
        return sum;
    };
    return piecewise(p.xi - 10.0 * p.omega, m0) + piecewise(m0, p.xi + 10.0 * p.omega);
}

}  // namespace cohort_pulse
