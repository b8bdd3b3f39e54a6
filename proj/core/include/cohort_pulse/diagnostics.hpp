#pragma once

#include <map>
#include <string>
#include <vector>

#include "cohort_pulse/records.hpp"
#include "cohort_pulse/time.hpp"

namespace cohort_pulse {

/// Per-calendar-week record shares, the cohort balance diagnostic. For each
/// week present in the data, `share[participant]` is that participant's
/// fraction of the week's records; fractions sum to 1 per week.
struct WeeklyShares {
    struct Week {
        IsoWeek week;
        std::map<std::string, double> share;
        double max_share = 0.0;
    };
    std::vector<Week> weeks;  // ordered by (year, week)

    double max_share_overall() const;
};

WeeklyShares weekly_data_share(const RecordSet& rs, UtcOffset offset = kDefaultUtcOffset);

/// Day-by-participant availability grid: cell (d, p) is true iff participant
/// p has at least one record on local date d.
struct UsageMatrix {
    std::vector<Date> dates;                  // consecutive, covers the observed span
    std::vector<std::string> participants;    // sorted
    std::vector<std::vector<bool>> available; // [date][participant]

    bool cell(size_t date_idx, size_t participant_idx) const {
        return available[date_idx][participant_idx];
    }
};

UsageMatrix usage_matrix(const RecordSet& rs, UtcOffset offset = kDefaultUtcOffset);

}  // namespace cohort_pulse
