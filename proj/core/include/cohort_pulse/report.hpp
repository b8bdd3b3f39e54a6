#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cohort_pulse/baseline.hpp"
#include "cohort_pulse/calendar.hpp"
#include "cohort_pulse/inference.hpp"
#include "cohort_pulse/simulate.hpp"
#include "cohort_pulse/sinusoid.hpp"

namespace cohort_pulse {

/// One analysis lane: a measure with its pipeline switches. `daily_max`
/// derives a "<measure>_max" lane; raw and normalized model variants are
/// emitted together whenever `normalize` is on.
struct AnalysisSpec {
    Measure measure{};
    bool detrend = false;
    bool normalize = false;
    bool daily_max = false;
    std::optional<std::pair<double, double>> amplitude_bound;  // else measure default
    bool periods = true;         // fit the period model
    bool calendar_weeks = true;  // fit the calendar-week model

    std::string label() const;
};

/// Standard lanes: detrended+normalized sleep HR and HRV, normalized waking
/// HR, normalized daily-max waking HR, and the four raw confound lanes
/// restricted to the calendar-week analysis.
std::vector<AnalysisSpec> default_analyses();

struct RunConfig {
    std::optional<std::string> input_csv;   // exactly one of these two
    std::optional<SimConfig> simulate;
    CalendarConfig calendar;
    std::vector<AnalysisSpec> analyses;
    bool run_periods = true;
    bool run_calendar_weeks = true;
    SignificancePolicy significance;        // Threshold 0.001 by default
    BaselineOptions baseline;
    UtcOffset utc_offset = kDefaultUtcOffset;
    std::string output_dir = "out";
    size_t threads = 0;                     // 0 = auto; env var caps either way
    /// Archive per-model observation tables for audit. On by default; bulk
    /// simulation studies can turn it off.
    bool write_intermediates = true;

    void validate() const;  // throws ConfigError
};

/// A fitted model with everything the artifact writers need.
struct ModelResult {
    std::string model;  // e.g. "sleep_hr_normalized" or "calweek_waking_hr_max"
    std::vector<CoefficientRow> rows;
    std::vector<bool> significant;
    LmmFit fit;
    std::vector<std::string> dropped_levels;
    std::vector<Observation> observations;  // archived intermediate data
};

struct RunResult {
    int exit_code = 0;
    std::string error;              // empty on success
    std::vector<std::string> artifacts;  // file names written under output_dir
    std::vector<ModelResult> period_models;
    std::vector<ModelResult> calweek_models;
};

/// Runs the full pipeline and writes every artifact atomically (staged, then
/// renamed into the output directory). On failure nothing is committed except
/// error.json, and the exit code is nonzero.
RunResult run(const RunConfig& cfg);

}  // namespace cohort_pulse
