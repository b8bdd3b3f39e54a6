#include "cohort_pulse/records.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

#include "cohort_pulse/errors.hpp"

namespace cohort_pulse {

std::string_view measure_name(Measure m) {
    switch (m) {
        case Measure::WakingHR: return "waking_hr";
        case Measure::SleepHR: return "sleep_hr";
        case Measure::SleepHRV: return "sleep_hrv";
        case Measure::TotalSleepDuration: return "total_sleep_duration";
        case Measure::DeepSleepPct: return "deep_sleep_pct";
        case Measure::LightSleepPct: return "light_sleep_pct";
        case Measure::HighActivitySeconds: return "high_activity_seconds";
    }
    return "unknown";
}

std::optional<Measure> measure_from_name(std::string_view name) {
    for (Measure m : kAllMeasures)
        if (measure_name(m) == name) return m;
    return std::nullopt;
}

bool is_sleep_measure(Measure m) {
    switch (m) {
        case Measure::SleepHR:
        case Measure::SleepHRV:
        case Measure::TotalSleepDuration:
        case Measure::DeepSleepPct:
        case Measure::LightSleepPct:
            return true;
        default:
            return false;
    }
}

bool value_in_range(Measure m, double value) {
    if (!std::isfinite(value)) return false;
    switch (m) {
        case Measure::WakingHR:
        case Measure::SleepHR:
            return value > 20.0 && value < 250.0;
        case Measure::SleepHRV:
            return value > 0.0 && value < 500.0;
        case Measure::DeepSleepPct:
        case Measure::LightSleepPct:
            return value >= 0.0 && value <= 100.0;
        case Measure::TotalSleepDuration:
        case Measure::HighActivitySeconds:
            return value >= 0.0;
    }
    return false;
}

MeasureSeries::MeasureSeries(std::string participant_id, Measure measure,
                             std::vector<Point> points, ValueUnit unit)
    : participant_id_(std::move(participant_id)),
      measure_(measure),
      unit_(unit),
      points_(std::move(points)) {
    if (points_.empty())
        throw EmptySeries("empty series for participant '" + participant_id_ + "'");
    for (size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i - 1].timestamp < points_[i].timestamp))
            throw std::invalid_argument("series timestamps must be strictly increasing");
    }
}

std::vector<double> MeasureSeries::values() const {
    std::vector<double> v;
    v.reserve(points_.size());
    for (const Point& p : points_) v.push_back(p.value);
    return v;
}

double MeasureSeries::mean_value() const {
    double sum = 0.0;
    for (const Point& p : points_) sum += p.value;
    return sum / double(points_.size());
}

MeasureSeries MeasureSeries::with_values(const std::vector<double>& new_values,
                                         ValueUnit unit) const {
    if (new_values.size() != points_.size())
        throw std::invalid_argument("value count mismatch in with_values");
    std::vector<Point> pts = points_;
    for (size_t i = 0; i < pts.size(); ++i) pts[i].value = new_values[i];
    return MeasureSeries(participant_id_, measure_, std::move(pts), unit);
}

RecordSet::RecordSet(std::vector<MeasureRecord> records) : records_(std::move(records)) {
    for (size_t i = 0; i < records_.size(); ++i) {
        const MeasureRecord& r = records_[i];
        index_[{r.participant_id, r.measure}].push_back(i);
    }
    for (auto& [key, idx] : index_) {
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            return records_[a].timestamp < records_[b].timestamp;
        });
    }
}

std::vector<std::string> RecordSet::participants() const {
    std::set<std::string> ids;
    for (const auto& [key, idx] : index_) ids.insert(key.first);
    return {ids.begin(), ids.end()};
}

std::vector<Measure> RecordSet::measures_for(const std::string& participant_id) const {
    std::vector<Measure> out;
    for (Measure m : kAllMeasures)
        if (has(participant_id, m)) out.push_back(m);
    return out;
}

bool RecordSet::has(const std::string& participant_id, Measure m) const {
    return index_.count({participant_id, m}) > 0;
}

const std::vector<size_t>* RecordSet::indices_for(const std::string& participant_id,
                                                  Measure m) const {
    auto it = index_.find({participant_id, m});
    return it == index_.end() ? nullptr : &it->second;
}

Instant RecordSet::min_timestamp() const {
    if (records_.empty()) throw EmptySeries("record set is empty");
    Instant t = records_.front().timestamp;
    for (const auto& r : records_) t = std::min(t, r.timestamp);
    return t;
}

Instant RecordSet::max_timestamp() const {
    if (records_.empty()) throw EmptySeries("record set is empty");
    Instant t = records_.front().timestamp;
    for (const auto& r : records_) t = std::max(t, r.timestamp);
    return t;
}

RecordSet merge_record_sets(const std::vector<RecordSet>& sets, size_t* dropped_duplicates) {
    std::vector<MeasureRecord> merged;
    std::set<std::tuple<std::string, Measure, Instant>> seen;
    size_t dropped = 0;
    for (const RecordSet& rs : sets) {
        for (const MeasureRecord& r : rs.records()) {
            if (seen.insert({r.participant_id, r.measure, r.timestamp}).second)
                merged.push_back(r);
            else
                ++dropped;
        }
    }
    if (dropped_duplicates) *dropped_duplicates = dropped;
    return RecordSet(std::move(merged));
}

MeasureSeries series_for(const RecordSet& rs, const std::string& participant_id, Measure m,
                         bool include_sessions) {
    const std::vector<size_t>* idx = rs.indices_for(participant_id, m);
    if (!idx)
        throw EmptySeries("no records for participant '" + participant_id + "' and measure '" +
                          std::string(measure_name(m)) + "'");
    std::vector<MeasureSeries::Point> pts;
    pts.reserve(idx->size());
    for (size_t i : *idx) {
        const MeasureRecord& r = rs.records()[i];
        if (!include_sessions && r.session_flag) continue;
        pts.push_back({r.timestamp, r.value});
    }
    if (pts.empty())
        throw EmptySeries("all records for participant '" + participant_id +
                          "' are session-flagged");
    return MeasureSeries(participant_id, m, std::move(pts));
}

}  // namespace cohort_pulse
