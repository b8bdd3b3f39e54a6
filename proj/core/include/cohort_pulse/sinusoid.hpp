#pragma once

#include "cohort_pulse/records.hpp"

namespace cohort_pulse {

/// Annual cycle model y = A·sin(Bt + C) + D with t in seconds since the
/// series' first measurement. B is fixed to one cycle per 365 days.
struct SinusoidFit {
    double amplitude = 0.0;       // A, measure units
    double angular_freq = 0.0;    // B, rad/s (fixed)
    double phase = 0.0;           // C, rad, in [-π, π]
    double vertical_shift = 0.0;  // D, measure units
    Instant t0{};                 // instant defining t = 0
    double residual_rms = 0.0;

    double model_value(Instant t) const;
};

/// One cycle per 365 days, in rad/s.
inline constexpr double kAnnualAngularFrequency = 2.0 * 3.14159265358979323846 / (365.0 * 86400.0);

struct SinusoidOptions {
    double amplitude_lo = 0.0;
    double amplitude_hi = 5.0;      // default for heart-rate series; HRV uses 20
    int phase_starts = 8;           // deterministic multi-start grid over C
    double min_span_days = 180.0;   // refuse a year-cycle fit on less
    size_t min_points = 60;
};

/// Per-measure amplitude bound: [0, 5] bpm for heart rate, [0, 20] ms for HRV.
SinusoidOptions default_sinusoid_options(Measure m);

/// Least-squares fit (Gaussian MLE) of the annual sinusoid, with A and D
/// box-bounded and D initialized to the series mean. Deterministic.
/// Throws FitDataInsufficient when the series is too short, FitDiverged when
/// no finite optimum exists.
SinusoidFit fit_sinusoid(const MeasureSeries& s, const SinusoidOptions& opts);
SinusoidFit fit_sinusoid(const MeasureSeries& s);

/// Pipeline variant: the least-squares profile carries one free offset per
/// category of `category` (same length as the series; category 0 is the
/// reference). Calendar-locked level shifts land in the offsets instead of
/// bending the annual cycle, and the cycle stays anchored by every point.
/// The returned vertical shift is the reference-category level.
SinusoidFit fit_sinusoid_with_offsets(const MeasureSeries& s, const SinusoidOptions& opts,
                                      const std::vector<int>& category);

/// Removes the fitted seasonal component, re-adding the vertical shift:
/// x ↦ x − A·sin(Bt + C). Timestamps and point count are unchanged.
MeasureSeries detrend(const MeasureSeries& s, const SinusoidFit& fit);

}  // namespace cohort_pulse
