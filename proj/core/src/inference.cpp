#include "cohort_pulse/inference.hpp"

#include <cmath>
#include <limits>

#include "cohort_pulse/errors.hpp"
#include "cohort_pulse/numeric.hpp"

namespace cohort_pulse {

std::vector<CoefficientRow> wald_inference(const LmmFit& fit) {
    std::vector<CoefficientRow> rows;
    rows.reserve(size_t(fit.beta.size()));
    for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
        CoefficientRow r;
        r.term = fit.column_names[size_t(j)];
        r.estimate = fit.beta[j];
        r.se = fit.se[j];
        if (r.se > 0.0) {
            r.z = r.estimate / r.se;
            r.p = numeric::two_sided_normal_p(r.z);
        } else {
            r.estimable = false;
            r.z = 0.0;
            r.p = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

bool bonferroni_flag(double p, size_t m, const SignificancePolicy& policy) {
    if (m < 1) throw ConfigError("bonferroni comparison count must be >= 1");
    if (std::isnan(p)) return false;
    if (policy.mode == SignificanceMode::Threshold) return p < policy.alpha;
    return p * double(m) < policy.alpha;
}

std::vector<bool> bonferroni_flags(const std::vector<double>& p_values, size_t m,
                                   const SignificancePolicy& policy) {
    std::vector<bool> flags;
    flags.reserve(p_values.size());
    for (double p : p_values) flags.push_back(bonferroni_flag(p, m, policy));
    return flags;
}

std::pair<double, double> r2_nakagawa(const LmmFit& fit, const DesignMatrix& d) {
    const Eigen::VectorXd fitted = d.X * fit.beta;
    const double var_fixed =
        fitted.maxCoeff() == fitted.minCoeff()
            ? 0.0
            : (fitted.array() - fitted.mean()).square().sum() / double(fitted.size());
    const double denom = var_fixed + fit.sigma2_gamma + fit.sigma2_eps;
    if (denom <= 0.0) throw OptimFailed("total variance is zero; R² undefined");
    return {var_fixed / denom, (var_fixed + fit.sigma2_gamma) / denom};
}

std::string week_level(int week) { return std::to_string(week); }

CalweekModel calweek_model(const std::vector<Observation>& obs, double semester_median,
                           const RemlOptions& reml_opts) {
    std::vector<Observation> centered = obs;
    for (Observation& o : centered) o.response -= semester_median;

    std::vector<std::string> domain;
    domain.reserve(52);
    for (int w = 1; w <= 52; ++w) domain.push_back(week_level(w));

    CalweekModel out;
    DesignMatrix d = encode_design_no_intercept(centered, domain);
    out.fit = fit_reml(d, reml_opts);
    out.reference = semester_median;
    for (const std::string& lvl : d.dropped_levels) out.dropped_weeks.push_back(std::stoi(lvl));

    for (Eigen::Index j = 0; j < out.fit.beta.size(); ++j) {
        WeekCoefficient wc;
        wc.week = std::stoi(d.column_names[size_t(j)]);
        wc.estimate = out.fit.beta[j];
        wc.se = out.fit.se[j];
        wc.p = out.fit.p_values[j];
        wc.p_below_010 = wc.p < 0.1;
        wc.p_below_005 = wc.p < 0.05;
        out.weeks.push_back(wc);
    }
    return out;
}

}  // namespace cohort_pulse
