#pragma once

#include <functional>
#include <vector>

namespace cohort_pulse::numeric {

/// Standard normal CDF.
double normal_cdf(double x);

/// log Φ(x), stable in the deep left tail where Φ underflows.
double log_normal_cdf(double x);

/// Two-sided p-value of a standard-normal statistic.
double two_sided_normal_p(double z);

struct ScalarMinimum {
    double x = 0.0;
    double f = 0.0;
    int evaluations = 0;
};

/// Brent's method on [a, b]. `tol` is the absolute x tolerance.
ScalarMinimum brent_minimize(const std::function<double(double)>& f, double a, double b,
                             double tol, int max_iter = 200);

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Nelder-Mead simplex minimization. The initial simplex is the start point
/// plus one vertex per coordinate displaced by `steps[i]`. Returns the best
/// vertex ever visited, so the result is never worse than the start.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const std::vector<double>& steps,
                             double ftol = 1e-10, int max_iter = 800);

/// Adaptive Simpson quadrature of f on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                 int max_depth = 40);

/// Population variance (1/N normalization).
double population_variance(const std::vector<double>& v);

double median(std::vector<double> v);

}  // namespace cohort_pulse::numeric
