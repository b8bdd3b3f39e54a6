#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cohort_pulse/time.hpp"

namespace cohort_pulse {

enum class Measure {
    WakingHR,
    SleepHR,
    SleepHRV,
    TotalSleepDuration,
    DeepSleepPct,
    LightSleepPct,
    HighActivitySeconds,
};

inline constexpr Measure kAllMeasures[] = {
    Measure::WakingHR,           Measure::SleepHR,       Measure::SleepHRV,
    Measure::TotalSleepDuration, Measure::DeepSleepPct,  Measure::LightSleepPct,
    Measure::HighActivitySeconds,
};

/// Lowercase snake-case wire name, e.g. "sleep_hr".
std::string_view measure_name(Measure m);
std::optional<Measure> measure_from_name(std::string_view name);

/// True for the measures recorded during sleep (nocturnal).
bool is_sleep_measure(Measure m);

/// Checks the per-measure plausibility window: HR in (20, 250), HRV in
/// (0, 500), percentages in [0, 100]. Non-finite values always fail.
bool value_in_range(Measure m, double value);

/// One timestamped physiological observation for one participant.
struct MeasureRecord {
    std::string participant_id;
    Instant timestamp{};
    Measure measure{};
    double value = 0.0;
    bool session_flag = false;  // live-recorded workout / guided session

    friend bool operator==(const MeasureRecord&, const MeasureRecord&) = default;
};

/// Unit state of a series; normalization is only legal on measure units.
enum class ValueUnit { MeasureUnits, MadUnits };

/// Ordered (timestamp, value) series for one participant and measure.
/// Construction enforces sortedness, distinct timestamps, and non-emptiness.
class MeasureSeries {
public:
    struct Point {
        Instant timestamp{};
        double value = 0.0;
    };

    MeasureSeries(std::string participant_id, Measure measure, std::vector<Point> points,
                  ValueUnit unit = ValueUnit::MeasureUnits);

    const std::string& participant_id() const noexcept { return participant_id_; }
    Measure measure() const noexcept { return measure_; }
    ValueUnit unit() const noexcept { return unit_; }
    const std::vector<Point>& points() const noexcept { return points_; }
    size_t size() const noexcept { return points_.size(); }
    Instant first_timestamp() const noexcept { return points_.front().timestamp; }
    Instant last_timestamp() const noexcept { return points_.back().timestamp; }

    std::vector<double> values() const;
    double mean_value() const;

    /// Same identity and timestamps, new values (pairwise). Used by the
    /// preprocessing transforms.
    MeasureSeries with_values(const std::vector<double>& new_values, ValueUnit unit) const;

private:
    std::string participant_id_;
    Measure measure_;
    ValueUnit unit_;
    std::vector<Point> points_;
};

/// Immutable collection of records with a (participant, measure) index.
class RecordSet {
public:
    RecordSet() = default;
    explicit RecordSet(std::vector<MeasureRecord> records);

    const std::vector<MeasureRecord>& records() const noexcept { return records_; }
    size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    /// Sorted unique participant ids.
    std::vector<std::string> participants() const;
    /// Measures present for a participant, in enum order.
    std::vector<Measure> measures_for(const std::string& participant_id) const;

    bool has(const std::string& participant_id, Measure m) const;

    /// Indices into records() for one (participant, measure), in timestamp
    /// order.
    const std::vector<size_t>* indices_for(const std::string& participant_id, Measure m) const;

    Instant min_timestamp() const;
    Instant max_timestamp() const;

private:
    std::vector<MeasureRecord> records_;
    std::map<std::pair<std::string, Measure>, std::vector<size_t>> index_;
};

/// Sorted series for one (participant, measure). Session-flagged records are
/// excluded unless `include_sessions` is set.
/// Throws EmptySeries when the pair is unknown or the filter removes
/// everything.
MeasureSeries series_for(const RecordSet& rs, const std::string& participant_id, Measure m,
                         bool include_sessions = false);

/// Merges concurrently parsed record sets. A (participant, measure,
/// timestamp) key seen in an earlier set wins; later duplicates are counted
/// in `dropped_duplicates`.
RecordSet merge_record_sets(const std::vector<RecordSet>& sets, size_t* dropped_duplicates = nullptr);

}  // namespace cohort_pulse
