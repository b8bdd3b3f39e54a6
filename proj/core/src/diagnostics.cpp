#include "cohort_pulse/diagnostics.hpp"

#include <algorithm>

#include "cohort_pulse/errors.hpp"

namespace cohort_pulse {

double WeeklyShares::max_share_overall() const {
    double m = 0.0;
    for (const Week& w : weeks) m = std::max(m, w.max_share);
    return m;
}

WeeklyShares weekly_data_share(const RecordSet& rs, UtcOffset offset) {
    if (rs.empty()) throw EmptySeries("weekly_data_share requires a non-empty record set");

    std::map<IsoWeek, std::map<std::string, size_t>> counts;
    for (const MeasureRecord& r : rs.records())
        counts[iso_week(local_date(r.timestamp, offset))][r.participant_id] += 1;

    WeeklyShares out;
    for (const auto& [week, by_participant] : counts) {
        WeeklyShares::Week w;
        w.week = week;
        size_t total = 0;
        for (const auto& [id, n] : by_participant) total += n;
        for (const auto& [id, n] : by_participant) {
            double share = double(n) / double(total);
            w.share[id] = share;
            w.max_share = std::max(w.max_share, share);
        }
        out.weeks.push_back(std::move(w));
    }
    return out;
}

UsageMatrix usage_matrix(const RecordSet& rs, UtcOffset offset) {
    UsageMatrix m;
    if (rs.empty()) return m;

    m.participants = rs.participants();
    Date first = local_date(rs.min_timestamp(), offset);
    Date last = local_date(rs.max_timestamp(), offset);
    for (Date d = first; d <= last; d += std::chrono::days{1}) m.dates.push_back(d);

    std::map<std::string, size_t> col;
    for (size_t i = 0; i < m.participants.size(); ++i) col[m.participants[i]] = i;

    m.available.assign(m.dates.size(), std::vector<bool>(m.participants.size(), false));
    for (const MeasureRecord& r : rs.records()) {
        size_t row = size_t((local_date(r.timestamp, offset) - first).count());
        m.available[row][col[r.participant_id]] = true;
    }
    return m;
}

}  // namespace cohort_pulse
