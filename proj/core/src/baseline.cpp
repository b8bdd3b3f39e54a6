#include "cohort_pulse/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "cohort_pulse/errors.hpp"
#include "cohort_pulse/numeric.hpp"

namespace cohort_pulse {

BaselineModel fit_baseline(const MeasureSeries& s, const BaselineOptions& opts) {
    const std::vector<double> xs = s.values();
    if (xs.size() < opts.min_observations)
        throw BaselineDataInsufficient("baseline for '" + s.participant_id() + "'/" +
                                       std::string(measure_name(s.measure())) + " needs >= " +
                                       std::to_string(opts.min_observations) + " observations, has " +
                                       std::to_string(xs.size()));
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (*lo == *hi)
        throw DegenerateDispersion("all " + std::to_string(xs.size()) + " observations equal " +
                                   std::to_string(*lo) + "; dispersion is zero");

    auto fit = skew_normal_fit_mle(xs);

    BaselineModel b;
    b.params = fit.params;
    b.mode = skew_normal_mode(fit.params);
    b.n = xs.size();
    b.mad_kind = opts.mad_kind;
    b.log_likelihood = fit.log_likelihood;
    b.init_log_likelihood = fit.init_log_likelihood;

    if (opts.mad_kind == MadKind::MeanAbs) {
        double sum = 0.0;
        for (double x : xs) sum += std::fabs(x - b.mode);
        b.mad = sum / double(xs.size());
    } else {
        std::vector<double> dev(xs.size());
        for (size_t i = 0; i < xs.size(); ++i) dev[i] = std::fabs(xs[i] - b.mode);
        b.mad = numeric::median(std::move(dev));
    }
    if (b.mad <= 0.0)
        throw DegenerateDispersion("dispersion around the baseline is zero for '" +
                                   s.participant_id() + "'");
    return b;
}

MeasureSeries normalize(const MeasureSeries& s, const BaselineModel& b) {
    if (s.unit() == ValueUnit::MadUnits)
        throw UnitError("series for '" + s.participant_id() + "' is already in MAD units");
    if (b.mad <= 0.0) throw DegenerateDispersion("normalize requires MAD > 0");
    std::vector<double> out;
    out.reserve(s.size());
    for (const auto& p : s.points()) out.push_back((p.value - b.mode) / b.mad);
    return s.with_values(out, ValueUnit::MadUnits);
}

MeasureSeries denormalize(const MeasureSeries& s, const BaselineModel& b) {
    if (s.unit() != ValueUnit::MadUnits)
        throw UnitError("denormalize expects a series in MAD units");
    std::vector<double> out;
    out.reserve(s.size());
    for (const auto& p : s.points()) out.push_back(p.value * b.mad + b.mode);
    return s.with_values(out, ValueUnit::MeasureUnits);
}

DailySeries daily_max(const MeasureSeries& s, UtcOffset offset) {
    DailySeries out;
    out.participant_id = s.participant_id();
    out.measure = s.measure();
    out.unit = s.unit();
    for (const auto& p : s.points()) {
        const Date day = local_date(p.timestamp, offset);
        if (!out.points.empty() && out.points.back().date == day)
            out.points.back().value = std::max(out.points.back().value, p.value);
        else
            out.points.push_back({day, p.value});
    }
    return out;
}

}  // namespace cohort_pulse
