#include "cohort_pulse/calendar.hpp"

#include <algorithm>

#include "cohort_pulse/errors.hpp"

namespace cohort_pulse {

std::string_view period_name(PeriodLabel p) {
    switch (p) {
        case PeriodLabel::SpringExam: return "spring_exam";
        case PeriodLabel::SpringPreExam: return "spring_pre_exam";
        case PeriodLabel::SpringBreak: return "spring_break";
        case PeriodLabel::GoldenWeek: return "golden_week";
        case PeriodLabel::SummerExam: return "summer_exam";
        case PeriodLabel::SummerPreExam: return "summer_pre_exam";
        case PeriodLabel::SummerBreak: return "summer_break";
        case PeriodLabel::NewYear: return "new_year";
        case PeriodLabel::Semester: return "semester";
    }
    return "unknown";
}

std::optional<PeriodLabel> period_from_name(std::string_view name) {
    for (PeriodLabel p : kAllPeriods)
        if (period_name(p) == name) return p;
    return std::nullopt;
}

PeriodCategory period_category(PeriodLabel p) {
    switch (p) {
        case PeriodLabel::SpringExam:
        case PeriodLabel::SummerExam:
            return PeriodCategory::Exam;
        case PeriodLabel::SpringPreExam:
        case PeriodLabel::SummerPreExam:
            return PeriodCategory::PreExam;
        case PeriodLabel::NewYear: return PeriodCategory::NewYear;
        case PeriodLabel::GoldenWeek: return PeriodCategory::GoldenWeek;
        case PeriodLabel::SpringBreak:
        case PeriodLabel::SummerBreak:
            return PeriodCategory::Break;
        case PeriodLabel::Semester: return PeriodCategory::Semester;
    }
    return PeriodCategory::Semester;
}

namespace {

PeriodLabel pre_exam_label(PeriodLabel exam) {
    return exam == PeriodLabel::SpringExam ? PeriodLabel::SpringPreExam
                                           : PeriodLabel::SummerPreExam;
}

Date d(int y, unsigned m, unsigned day) {
    return Date{std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} /
                                      std::chrono::day{day}}};
}

}  // namespace

PeriodCalendar PeriodCalendar::build(const CalendarConfig& config) {
    PeriodCalendar cal;
    cal.precedence_ = config.precedence;
    cal.annotations_ = config.annotations;
    for (const PeriodSpan& s : config.spans) {
        if (s.start > s.end)
            throw ConfigError("period interval for '" + std::string(period_name(s.label)) +
                              "' has start " + format_date(s.start) + " after end " +
                              format_date(s.end));
        cal.spans_.push_back(s);
        if (config.derive_pre_exams && period_category(s.label) == PeriodCategory::Exam) {
            PeriodSpan pre;
            pre.start = s.start - std::chrono::days{14};
            pre.end = s.start - std::chrono::days{1};
            pre.label = pre_exam_label(s.label);
            cal.spans_.push_back(pre);
        }
    }
    return cal;
}

PeriodLabel PeriodCalendar::assign(Date day) const {
    PeriodLabel best = PeriodLabel::Semester;
    size_t best_rank = precedence_.size();
    for (const PeriodSpan& s : spans_) {
        if (day < s.start || day > s.end) continue;
        auto it = std::find(precedence_.begin(), precedence_.end(), period_category(s.label));
        size_t rank = size_t(it - precedence_.begin());
        if (rank < best_rank) {
            best_rank = rank;
            best = s.label;
        }
    }
    return best;
}

CalendarConfig default_calendar_config() {
    CalendarConfig cfg;
    cfg.derive_pre_exams = true;
    cfg.spans = {
        {d(2021, 1, 21), d(2021, 2, 3), PeriodLabel::SpringExam},
        {d(2022, 1, 20), d(2022, 2, 2), PeriodLabel::SpringExam},
        {d(2023, 1, 23), d(2023, 2, 3), PeriodLabel::SpringExam},

        {d(2021, 2, 4), d(2021, 4, 7), PeriodLabel::SpringBreak},
        {d(2022, 2, 3), d(2022, 4, 7), PeriodLabel::SpringBreak},
        {d(2023, 2, 4), d(2023, 4, 7), PeriodLabel::SpringBreak},

        {d(2021, 4, 29), d(2021, 5, 5), PeriodLabel::GoldenWeek},
        {d(2022, 4, 29), d(2022, 5, 5), PeriodLabel::GoldenWeek},
        {d(2023, 4, 29), d(2023, 5, 5), PeriodLabel::GoldenWeek},

        {d(2021, 7, 23), d(2021, 8, 4), PeriodLabel::SummerExam},
        {d(2022, 7, 22), d(2022, 8, 4), PeriodLabel::SummerExam},
        {d(2023, 7, 24), d(2023, 8, 4), PeriodLabel::SummerExam},

        {d(2021, 8, 5), d(2021, 9, 23), PeriodLabel::SummerBreak},
        {d(2022, 8, 5), d(2022, 9, 23), PeriodLabel::SummerBreak},
        {d(2023, 8, 5), d(2023, 9, 23), PeriodLabel::SummerBreak},

        {d(2021, 12, 15), d(2022, 1, 7), PeriodLabel::NewYear},
        {d(2022, 12, 15), d(2023, 1, 7), PeriodLabel::NewYear},
    };
    return cfg;
}

PeriodCalendar default_calendar() { return PeriodCalendar::build(default_calendar_config()); }

WeekIndex iso_week_fold(Date day) {
    int w = iso_week(day).week;
    return WeekIndex{std::min(w, 52)};
}

WeekIndex iso_week_fold(Instant t, UtcOffset offset) {
    return iso_week_fold(local_date(t, offset));
}

}  // namespace cohort_pulse
