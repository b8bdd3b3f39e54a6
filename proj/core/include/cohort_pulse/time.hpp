#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

namespace cohort_pulse {

/// UTC timestamp with second resolution.
using Instant = std::chrono::sys_seconds;
/// Calendar date (no time of day).
using Date = std::chrono::sys_days;
/// Fixed offset from UTC used to derive the cohort's local dates.
using UtcOffset = std::chrono::minutes;

/// The study cohort lives in UTC+9; daily grouping uses this unless overridden.
inline constexpr UtcOffset kDefaultUtcOffset{9 * 60};

/// Parses "YYYY-MM-DDTHH:MM:SS" followed by "Z", "±hh:mm" or "±hhmm".
/// A bare "YYYY-MM-DD" is accepted as midnight UTC. Returns nullopt on
/// malformed input or a non-existent calendar date.
std::optional<Instant> parse_instant(std::string_view text);

/// Parses "YYYY-MM-DD".
std::optional<Date> parse_date(std::string_view text);

/// Canonical form: "YYYY-MM-DDTHH:MM:SSZ".
std::string format_instant_utc(Instant t);

/// "YYYY-MM-DD".
std::string format_date(Date d);

/// Calendar date of `t` in the cohort's local clock.
Date local_date(Instant t, UtcOffset offset = kDefaultUtcOffset);

struct IsoWeek {
    int year = 0;   // ISO week-based year, may differ from the calendar year
    int week = 0;   // 1..53

    friend auto operator<=>(const IsoWeek&, const IsoWeek&) = default;
};

/// ISO-8601 week of the given date (weeks start Monday; week 1 contains the
/// year's first Thursday).
IsoWeek iso_week(Date d);

/// Number of ISO weeks (52 or 53) in week-based year `y`.
int iso_weeks_in_year(int y);

}  // namespace cohort_pulse
