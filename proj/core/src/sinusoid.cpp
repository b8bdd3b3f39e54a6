#include "cohort_pulse/sinusoid.hpp"

#include <cmath>
#include <limits>

#include "cohort_pulse/errors.hpp"
#include "cohort_pulse/numeric.hpp"

namespace cohort_pulse {

double SinusoidFit::model_value(Instant t) const {
    const double secs = double((t - t0).count());
    return amplitude * std::sin(angular_freq * secs + phase) + vertical_shift;
}

SinusoidOptions default_sinusoid_options(Measure m) {
    SinusoidOptions opts;
    if (m == Measure::SleepHRV) opts.amplitude_hi = 20.0;
    return opts;
}

namespace {

struct Bounds {
    double lo, hi;
    double clamp(double v) const { return std::min(std::max(v, lo), hi); }
};

struct SeriesSums {
    std::vector<double> t;  // seconds since first point
    std::vector<double> y;
    double sum_y = 0.0;
    double sum_yy = 0.0;
    size_t n = 0;
};

// Exact minimizer of Σ(y - a·s - d)² over the box boundsA × boundsD, where
// s_i = sin(B·t_i + C). Convex quadratic on a box: the optimum is interior or
// on an edge, and each edge reduces to a clamped 1-D solve.
struct InnerSolution {
    double a = 0.0, d = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

InnerSolution solve_amplitude_shift(const SeriesSums& ss, double phase, const Bounds& ba,
                                    const Bounds& bd) {
    const size_t n = ss.n;
    double sum_s = 0.0, sum_ss = 0.0, sum_sy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double s = std::sin(kAnnualAngularFrequency * ss.t[i] + phase);
        sum_s += s;
        sum_ss += s * s;
        sum_sy += s * ss.y[i];
    }

    auto sse_at = [&](double a, double d) {
        return ss.sum_yy - 2.0 * a * sum_sy - 2.0 * d * ss.sum_y + a * a * sum_ss +
               2.0 * a * d * sum_s + d * d * double(n);
    };

    InnerSolution best;
    auto consider = [&](double a, double d) {
        const double v = sse_at(a, d);
        if (v < best.sse) best = {a, d, v};
    };

    // unconstrained stationary point of the 2x2 system
    const double det = sum_ss * double(n) - sum_s * sum_s;
    if (det > 1e-12 * sum_ss * double(n)) {
        const double a = (sum_sy * double(n) - sum_s * ss.sum_y) / det;
        const double d = (sum_ss * ss.sum_y - sum_s * sum_sy) / det;
        if (a >= ba.lo && a <= ba.hi && d >= bd.lo && d <= bd.hi) {
            consider(a, d);
            return best;
        }
    }
    // edges (inner variable clamped, which also covers the corners)
    for (double a : {ba.lo, ba.hi}) {
        const double d = bd.clamp((ss.sum_y - a * sum_s) / double(n));
        consider(a, d);
    }
    for (double d : {bd.lo, bd.hi}) {
        if (sum_ss > 0.0) {
            const double a = ba.clamp((sum_sy - d * sum_s) / sum_ss);
            consider(a, d);
        } else {
            consider(ba.clamp(0.0), d);
        }
    }
    return best;
}

}  // namespace

SinusoidFit fit_sinusoid(const MeasureSeries& s, const SinusoidOptions& opts) {
    const auto& pts = s.points();
    const double span_days =
        double((pts.back().timestamp - pts.front().timestamp).count()) / 86400.0;
    if (pts.size() < opts.min_points || span_days < opts.min_span_days)
        throw FitDataInsufficient("series for '" + s.participant_id() + "'/" +
                                  std::string(measure_name(s.measure())) + " spans " +
                                  std::to_string(span_days) + " days with " +
                                  std::to_string(pts.size()) +
                                  " points; need >= " + std::to_string(opts.min_span_days) +
                                  " days and >= " + std::to_string(opts.min_points));

    SeriesSums ss;
    ss.n = pts.size();
    ss.t.reserve(ss.n);
    ss.y.reserve(ss.n);
    const Instant t0 = pts.front().timestamp;
    for (const auto& p : pts) {
        ss.t.push_back(double((p.timestamp - t0).count()));
        ss.y.push_back(p.value);
        ss.sum_y += p.value;
        ss.sum_yy += p.value * p.value;
    }

    const double d_init = ss.sum_y / double(ss.n);
    Bounds bd{std::min(0.5 * d_init, 1.5 * d_init), std::max(0.5 * d_init, 1.5 * d_init)};
    Bounds ba{opts.amplitude_lo, opts.amplitude_hi};

    auto profiled = [&](double phase) { return solve_amplitude_shift(ss, phase, ba, bd).sse; };

    double best_phase = 0.0;
    double best_sse = std::numeric_limits<double>::infinity();
    const int cells = std::max(1, opts.phase_starts);
    for (int k = 0; k < cells; ++k) {
        const double lo = -M_PI + 2.0 * M_PI * double(k) / double(cells);
        const double hi = -M_PI + 2.0 * M_PI * double(k + 1) / double(cells);
        auto m = numeric::brent_minimize(profiled, lo, hi, 1e-9);
        if (m.f < best_sse) {
            best_sse = m.f;
            best_phase = m.x;
        }
    }
    if (!std::isfinite(best_sse))
        throw FitDiverged("sinusoid fit produced no finite optimum for '" + s.participant_id() +
                          "'/" + std::string(measure_name(s.measure())));

    const InnerSolution inner = solve_amplitude_shift(ss, best_phase, ba, bd);
    SinusoidFit fit;
    fit.amplitude = inner.a;
    fit.angular_freq = kAnnualAngularFrequency;
    fit.phase = best_phase;
    fit.vertical_shift = inner.d;
    fit.t0 = t0;
    fit.residual_rms = std::sqrt(std::max(0.0, inner.sse) / double(ss.n));
    return fit;
}

SinusoidFit fit_sinusoid(const MeasureSeries& s) {
    return fit_sinusoid(s, default_sinusoid_options(s.measure()));
}

SinusoidFit fit_sinusoid_with_offsets(const MeasureSeries& s, const SinusoidOptions& opts,
                                      const std::vector<int>& category) {
    const auto& pts = s.points();
    if (category.size() != pts.size())
        throw std::invalid_argument("category vector size mismatch in fit_sinusoid_with_offsets");
    const double span_days =
        double((pts.back().timestamp - pts.front().timestamp).count()) / 86400.0;
    if (pts.size() < opts.min_points || span_days < opts.min_span_days)
        throw FitDataInsufficient("series for '" + s.participant_id() + "'/" +
                                  std::string(measure_name(s.measure())) + " spans " +
                                  std::to_string(span_days) + " days with " +
                                  std::to_string(pts.size()) +
                                  " points; need >= " + std::to_string(opts.min_span_days) +
                                  " days and >= " + std::to_string(opts.min_points));

    const size_t n = pts.size();
    const Instant t0 = pts.front().timestamp;
    int n_cats = 0;
    for (int c : category) n_cats = std::max(n_cats, c + 1);

    std::vector<double> t(n), y(n);
    std::vector<double> cat_mean_y(size_t(n_cats), 0.0);
    std::vector<double> cat_count(size_t(n_cats), 0.0);
    for (size_t i = 0; i < n; ++i) {
        t[i] = double((pts[i].timestamp - t0).count());
        y[i] = pts[i].value;
        cat_mean_y[size_t(category[i])] += y[i];
        cat_count[size_t(category[i])] += 1.0;
    }
    for (int c = 0; c < n_cats; ++c)
        if (cat_count[size_t(c)] > 0.0) cat_mean_y[size_t(c)] /= cat_count[size_t(c)];

    std::vector<double> y_centered(n);
    double sum_yy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        y_centered[i] = y[i] - cat_mean_y[size_t(category[i])];
        sum_yy += y_centered[i] * y_centered[i];
    }

    const Bounds ba{opts.amplitude_lo, opts.amplitude_hi};
    std::vector<double> s_buf(n, 0.0);
    std::vector<double> cat_mean_s(size_t(n_cats), 0.0);

    // within-category centering of s and y makes the per-category offsets
    // implicit, leaving a clamped 1-D quadratic in the amplitude
    struct Inner {
        double a, sse;
    };
    auto inner = [&](double phase) {
        std::fill(cat_mean_s.begin(), cat_mean_s.end(), 0.0);
        for (size_t i = 0; i < n; ++i) {
            s_buf[i] = std::sin(kAnnualAngularFrequency * t[i] + phase);
            cat_mean_s[size_t(category[i])] += s_buf[i];
        }
        for (int c = 0; c < n_cats; ++c)
            if (cat_count[size_t(c)] > 0.0) cat_mean_s[size_t(c)] /= cat_count[size_t(c)];
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double sc = s_buf[i] - cat_mean_s[size_t(category[i])];
            num += y_centered[i] * sc;
            den += sc * sc;
        }
        const double a = den > 0.0 ? ba.clamp(num / den) : ba.clamp(0.0);
        return Inner{a, sum_yy - 2.0 * a * num + a * a * den};
    };

    double best_phase = 0.0;
    double best_sse = std::numeric_limits<double>::infinity();
    const int cells = std::max(1, opts.phase_starts);
    for (int k = 0; k < cells; ++k) {
        const double lo = -M_PI + 2.0 * M_PI * double(k) / double(cells);
        const double hi = -M_PI + 2.0 * M_PI * double(k + 1) / double(cells);
        auto m = numeric::brent_minimize([&](double c) { return inner(c).sse; }, lo, hi, 1e-9);
        if (m.f < best_sse) {
            best_sse = m.f;
            best_phase = m.x;
        }
    }
    if (!std::isfinite(best_sse))
        throw FitDiverged("sinusoid fit produced no finite optimum for '" + s.participant_id() +
                          "'/" + std::string(measure_name(s.measure())));

    const Inner sol = inner(best_phase);

    // reference-category level of (y - A·sin), clamped to the usual D box
    double d_init = 0.0;
    for (size_t i = 0; i < n; ++i) d_init += y[i];
    d_init /= double(n);
    const Bounds bd{std::min(0.5 * d_init, 1.5 * d_init), std::max(0.5 * d_init, 1.5 * d_init)};
    double ref_level = 0.0, ref_count = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (category[i] != 0) continue;
        ref_level += y[i] - sol.a * s_buf[i];
        ref_count += 1.0;
    }
    if (ref_count == 0.0) {
        for (size_t i = 0; i < n; ++i) ref_level += y[i] - sol.a * s_buf[i];
        ref_count = double(n);
    }

    SinusoidFit fit;
    fit.amplitude = sol.a;
    fit.angular_freq = kAnnualAngularFrequency;
    fit.phase = best_phase;
    fit.vertical_shift = bd.clamp(ref_level / ref_count);
    fit.t0 = t0;
    fit.residual_rms = std::sqrt(std::max(0.0, sol.sse) / double(n));
    return fit;
}

MeasureSeries detrend(const MeasureSeries& s, const SinusoidFit& fit) {
    std::vector<double> out;
    out.reserve(s.size());
    for (const auto& p : s.points()) {
        const double secs = double((p.timestamp - fit.t0).count());
        out.push_back(p.value -
                      fit.amplitude * std::sin(fit.angular_freq * secs + fit.phase));
    }
    return s.with_values(out, s.unit());
}

}  // namespace cohort_pulse
