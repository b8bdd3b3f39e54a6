#pragma once

#include <string>
#include <vector>

#include "cohort_pulse/calendar.hpp"
#include "cohort_pulse/inference.hpp"

namespace cohort_pulse {

struct WeekPlotInfo {
    std::string title;           // model label shown above the panel
    double reference = 0.0;      // semester-median intercept for the grey box
    double r2_marginal = 0.0;
    double r2_conditional = 0.0;
    std::string unit = "MAD";    // y-axis unit
};

/// Deterministic SVG panel: coefficients against calendar week 1..52,
/// square markers for p < 0.05, circles for p < 0.1, small dots otherwise,
/// period-colored background bands (pink pre-exam, red exam, green break,
/// gold golden week), orange vertical lines at annotation dates, and a grey
/// info box with the reference intercept and R². Identical inputs produce
/// identical bytes.
std::string emit_week_plot(const std::vector<WeekCoefficient>& series,
                           const PeriodCalendar& calendar, const WeekPlotInfo& info);

}  // namespace cohort_pulse
