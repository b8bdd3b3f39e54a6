#pragma once

#include <string>
#include <vector>

#include "cohort_pulse/reml.hpp"

namespace cohort_pulse {

/// One coefficient-table row.
struct CoefficientRow {
    std::string term;
    double estimate = 0.0;
    double se = 0.0;
    double z = 0.0;
    double p = 1.0;
    bool estimable = true;  // false when se = 0; z and p are then meaningless
};

/// Wald z table: two-sided p from the normal approximation of estimate/se.
std::vector<CoefficientRow> wald_inference(const LmmFit& fit);

enum class SignificanceMode {
    /// Flag p < alpha_effective (default 0.001), the raw-threshold convention;
    /// the comparison count is reported alongside.
    Threshold,
    /// Flag p·m < alpha.
    Strict,
};

struct SignificancePolicy {
    SignificanceMode mode = SignificanceMode::Threshold;
    double alpha = 0.001;  // Threshold: the effective cut; Strict: family alpha
};

std::vector<bool> bonferroni_flags(const std::vector<double>& p_values, size_t m,
                                   const SignificancePolicy& policy);
bool bonferroni_flag(double p, size_t m, const SignificancePolicy& policy);

/// Nakagawa-Schielzeth marginal/conditional R² of a fitted model.
/// Marginal: var(Xβ̂) over the total; conditional adds the random-intercept
/// variance. Throws when the total variance is zero.
std::pair<double, double> r2_nakagawa(const LmmFit& fit, const DesignMatrix& d);

/// Per-week coefficient from the calendar-week model.
struct WeekCoefficient {
    int week = 0;  // 1..52
    double estimate = 0.0;
    double se = 0.0;
    double p = 1.0;
    bool p_below_010 = false;
    bool p_below_005 = false;
};

struct CalweekModel {
    std::vector<WeekCoefficient> weeks;  // ascending, only weeks with data
    std::vector<int> dropped_weeks;
    double reference = 0.0;  // semester median the responses were centered on
    LmmFit fit;
};

/// Folded calendar-week model: responses centered on the semester median,
/// 52-level week factor with no global intercept, per-participant random
/// intercepts and a common slope. Observation levels must be week indices
/// rendered as decimal text.
CalweekModel calweek_model(const std::vector<Observation>& obs, double semester_median,
                           const RemlOptions& reml_opts = {});

/// Canonical text form of a week level ("1".."52").
std::string week_level(int week);

}  // namespace cohort_pulse
