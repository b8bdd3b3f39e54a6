#pragma once

#include "cohort_pulse/records.hpp"
#include "cohort_pulse/skew_normal.hpp"

namespace cohort_pulse {

/// How the dispersion around the baseline is summarized. The normalizer needs
/// an absolute-deviation scale; mean is the default, median is available as a
/// config switch.
enum class MadKind { MeanAbs, MedianAbs };

/// Per-participant resting reference: skew-normal fit, its mode m⁰, and the
/// dispersion of observations around the mode.
struct BaselineModel {
    SkewNormalParams params;   // ξ, ω, α
    double mode = 0.0;         // m⁰, measure units
    double mad = 0.0;          // dispersion, measure units
    size_t n = 0;              // sample count behind the fit
    MadKind mad_kind = MadKind::MeanAbs;
    double log_likelihood = 0.0;
    double init_log_likelihood = 0.0;
};

struct BaselineOptions {
    size_t min_observations = 100;
    MadKind mad_kind = MadKind::MeanAbs;
};

/// Skew-normal MLE baseline. Throws BaselineDataInsufficient below the
/// observation floor and DegenerateDispersion when all values are equal.
BaselineModel fit_baseline(const MeasureSeries& s, const BaselineOptions& opts = {});

/// x ↦ (x − m⁰)/MAD. The result is in dimensionless MAD units; applying it to
/// an already-normalized series throws UnitError.
MeasureSeries normalize(const MeasureSeries& s, const BaselineModel& b);

/// Inverse of normalize: x' ↦ x'·MAD + m⁰.
MeasureSeries denormalize(const MeasureSeries& s, const BaselineModel& b);

/// One value per local date.
struct DailySeries {
    struct Point {
        Date date;
        double value = 0.0;
    };
    std::string participant_id;
    Measure measure{};
    ValueUnit unit = ValueUnit::MeasureUnits;
    std::vector<Point> points;  // dates strictly increasing
};

/// Per-local-date maximum; dates without data are absent.
DailySeries daily_max(const MeasureSeries& s, UtcOffset offset = kDefaultUtcOffset);

}  // namespace cohort_pulse
