#include "cohort_pulse/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cohort_pulse::numeric {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double log_normal_cdf(double x) {
    if (x > -8.0) return std::log(normal_cdf(x));
    // Asymptotic series for the far left tail: Φ(x) ≈ φ(x)/(-x) · (1 - 1/x² + 3/x⁴ - 15/x⁶)
    const double x2 = x * x;
    double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x2 - 0.5 * std::log(2.0 * M_PI) - std::log(-x) + std::log(series);
}

double two_sided_normal_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

ScalarMinimum brent_minimize(const std::function<double(double)>& f, double a, double b,
                             double tol, int max_iter) {
    const double golden = 0.3819660112501051;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    int evals = 1;
    double d = 0.0, e = 0.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        double m = 0.5 * (a + b);
        double tol1 = tol + std::numeric_limits<double>::epsilon() * std::fabs(x);
        double tol2 = 2.0 * tol1;
        if (std::fabs(x - m) <= tol2 - 0.5 * (b - a)) break;

        bool use_golden = true;
        if (std::fabs(e) > tol1) {
            // parabolic interpolation through (x, w, v)
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::fabs(q);
            double e_old = e;
            e = d;
            if (std::fabs(p) < std::fabs(0.5 * q * e_old) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
                use_golden = false;
            }
        }
        if (use_golden) {
            e = (x < m) ? b - x : a - x;
            d = golden * e;
        }
        double u = (std::fabs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
        double fu = f(u);
        ++evals;
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {x, fx, evals};
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const std::vector<double>& steps,
                             double ftol, int max_iter) {
    const size_t n = start.size();
    if (steps.size() != n) throw std::invalid_argument("steps size mismatch");

    struct Vertex {
        std::vector<double> x;
        double f;
    };
    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    simplex.push_back({start, f(start)});
    for (size_t i = 0; i < n; ++i) {
        std::vector<double> x = start;
        x[i] += steps[i];
        simplex.push_back({x, f(x)});
    }

    Vertex best_ever = simplex[0];
    auto track = [&](const Vertex& v) {
        if (v.f < best_ever.f) best_ever = v;
    };
    for (const auto& v : simplex) track(v);

    auto order = [&] {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };

    int iter = 0;
    bool converged = false;
    for (; iter < max_iter; ++iter) {
        order();
        double spread = std::fabs(simplex.back().f - simplex.front().f);
        if (spread <= ftol * (1.0 + std::fabs(simplex.front().f))) {
            converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j) centroid[j] += simplex[i].x[j];
        }
        for (double& c : centroid) c /= double(n);

        auto point_at = [&](double coef) {
            std::vector<double> x(n);
            for (size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + coef * (simplex.back().x[j] - centroid[j]);
            return x;
        };

        Vertex reflected{point_at(-1.0), 0.0};
        reflected.f = f(reflected.x);
        track(reflected);

        if (reflected.f < simplex.front().f) {
            Vertex expanded{point_at(-2.0), 0.0};
            expanded.f = f(expanded.x);
            track(expanded);
            simplex.back() = expanded.f < reflected.f ? expanded : reflected;
            continue;
        }
        if (reflected.f < simplex[n - 1].f) {
            simplex.back() = reflected;
            continue;
        }
        Vertex contracted{point_at(reflected.f < simplex.back().f ? -0.5 : 0.5), 0.0};
        contracted.f = f(contracted.x);
        track(contracted);
        if (contracted.f < std::min(reflected.f, simplex.back().f)) {
            simplex.back() = contracted;
            continue;
        }
        // shrink toward the best vertex
        for (size_t i = 1; i <= n; ++i) {
            for (size_t j = 0; j < n; ++j)
                simplex[i].x[j] = simplex[0].x[j] + 0.5 * (simplex[i].x[j] - simplex[0].x[j]);
            simplex[i].f = f(simplex[i].x);
            track(simplex[i]);
        }
    }
    order();
    track(simplex.front());
    return {best_ever.x, best_ever.f, iter, converged};
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, fa, m, fm, flm);
    double right = simpson(m, fm, b, fb, frm);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_depth) {
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = simpson(a, fa, b, fb, fm);
    return adaptive(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double population_variance(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / double(v.size());
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty vector");
    size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
    return 0.5 * (v[mid - 1] + hi);
}

}  // namespace cohort_pulse::numeric
