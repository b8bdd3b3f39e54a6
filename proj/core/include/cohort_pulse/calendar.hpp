#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cohort_pulse/time.hpp"

namespace cohort_pulse {

/// Academic-year taxonomy. Semester is the reference label for every date not
/// covered by a configured interval.
enum class PeriodLabel {
    SpringExam,
    SpringPreExam,
    SpringBreak,
    GoldenWeek,
    SummerExam,
    SummerPreExam,
    SummerBreak,
    NewYear,
    Semester,
};

inline constexpr std::array<PeriodLabel, 9> kAllPeriods = {
    PeriodLabel::SpringExam,  PeriodLabel::SpringPreExam, PeriodLabel::SpringBreak,
    PeriodLabel::GoldenWeek,  PeriodLabel::SummerExam,    PeriodLabel::SummerPreExam,
    PeriodLabel::SummerBreak, PeriodLabel::NewYear,       PeriodLabel::Semester,
};

std::string_view period_name(PeriodLabel p);
std::optional<PeriodLabel> period_from_name(std::string_view name);

/// Coarse category used for precedence and plot shading.
enum class PeriodCategory { Exam, PreExam, NewYear, GoldenWeek, Break, Semester };
PeriodCategory period_category(PeriodLabel p);

struct PeriodSpan {
    Date start;  // inclusive
    Date end;    // inclusive
    PeriodLabel label = PeriodLabel::Semester;
};

struct CalendarConfig {
    std::vector<PeriodSpan> spans;
    /// When set, a PreExam span is derived from every Exam span: the 14 days
    /// ending the day before the exam starts.
    bool derive_pre_exams = false;
    /// Category precedence, strongest first. Overlaps resolve to the earliest
    /// category in this list.
    std::vector<PeriodCategory> precedence = {
        PeriodCategory::Exam,       PeriodCategory::PreExam, PeriodCategory::NewYear,
        PeriodCategory::GoldenWeek, PeriodCategory::Break,   PeriodCategory::Semester,
    };
    /// Annotation-only dates (grade result releases); never affect labeling.
    std::vector<Date> annotations;
};

/// Date-interval to period mapping with precedence resolution. Immutable.
class PeriodCalendar {
public:
    static PeriodCalendar build(const CalendarConfig& config);

    PeriodLabel assign(Date d) const;

    const std::vector<PeriodSpan>& spans() const noexcept { return spans_; }
    const std::vector<PeriodCategory>& precedence() const noexcept { return precedence_; }
    const std::vector<Date>& annotations() const noexcept { return annotations_; }

private:
    std::vector<PeriodSpan> spans_;
    std::vector<PeriodCategory> precedence_;
    std::vector<Date> annotations_;
};

/// The study's academic calendar for 2021-2023, pre-exams derived as the two
/// weeks before each exam period.
CalendarConfig default_calendar_config();
PeriodCalendar default_calendar();

/// 1..52 factor for multi-year folding: ISO week-of-year with week 53 merged
/// into 52.
struct WeekIndex {
    int value = 1;

    friend auto operator<=>(const WeekIndex&, const WeekIndex&) = default;
};

WeekIndex iso_week_fold(Date d);
WeekIndex iso_week_fold(Instant t, UtcOffset offset = kDefaultUtcOffset);

}  // namespace cohort_pulse
