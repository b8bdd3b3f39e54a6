#include "cohort_pulse/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cohort_pulse/errors.hpp"

namespace cohort_pulse {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

Date get_date(const json& j, const std::string& where) {
    if (!j.is_string()) throw ConfigError(where + " must be an ISO date string");
    auto d = parse_date(j.get<std::string>());
    if (!d) throw ConfigError(where + " is not a valid ISO date: '" + j.get<std::string>() + "'");
    return *d;
}

Measure get_measure(const json& j, const std::string& where) {
    if (!j.is_string()) throw ConfigError(where + " must be a measure name");
    auto m = measure_from_name(j.get<std::string>());
    if (!m) throw ConfigError(where + " names unknown measure '" + j.get<std::string>() + "'");
    return *m;
}

PeriodCategory category_from_name(const std::string& s, const std::string& where) {
    if (s == "exam") return PeriodCategory::Exam;
    if (s == "pre_exam") return PeriodCategory::PreExam;
    if (s == "new_year") return PeriodCategory::NewYear;
    if (s == "golden_week") return PeriodCategory::GoldenWeek;
    if (s == "break") return PeriodCategory::Break;
    if (s == "semester") return PeriodCategory::Semester;
    throw ConfigError(where + ": unknown precedence category '" + s + "'");
}

CalendarConfig parse_calendar(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "default") return default_calendar_config();
        throw ConfigError("calendar must be \"default\" or an object");
    }
    require_keys(j, {"file", "periods", "derive_pre_exams", "precedence", "annotations"},
                 "calendar");
    if (j.contains("file")) return load_calendar_config(j.at("file").get<std::string>());

    CalendarConfig cfg;
    cfg.spans.clear();
    if (j.contains("derive_pre_exams")) cfg.derive_pre_exams = j.at("derive_pre_exams").get<bool>();
    if (j.contains("periods")) {
        for (const json& row : j.at("periods")) {
            require_keys(row, {"label", "start", "end"}, "calendar period");
            auto label = period_from_name(row.at("label").get<std::string>());
            if (!label)
                throw ConfigError("unknown period label '" + row.at("label").get<std::string>() +
                                  "'");
            cfg.spans.push_back({get_date(row.at("start"), "period start"),
                                 get_date(row.at("end"), "period end"), *label});
        }
    }
    if (j.contains("precedence")) {
        cfg.precedence.clear();
        for (const json& c : j.at("precedence"))
            cfg.precedence.push_back(category_from_name(c.get<std::string>(), "precedence"));
        if (std::find(cfg.precedence.begin(), cfg.precedence.end(), PeriodCategory::Semester) ==
            cfg.precedence.end())
            cfg.precedence.push_back(PeriodCategory::Semester);
    }
    if (j.contains("annotations"))
        for (const json& a : j.at("annotations")) cfg.annotations.push_back(get_date(a, "annotation"));
    return cfg;
}

std::pair<double, double> get_range(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(where + " must be a [lo, hi] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

SimConfig parse_sim(const json& j) {
    require_keys(j,
                 {"seed", "n_participants", "span", "daily_missing_prob", "daily_dropout_hazard",
                  "session_prob", "session_shift", "tranches", "measures", "effects",
                  "utc_offset_minutes"},
                 "simulate block");
    SimConfig cfg = default_sim_config();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    if (j.contains("n_participants")) cfg.n_participants = j.at("n_participants").get<int>();
    if (j.contains("span")) {
        const json& span = j.at("span");
        if (!span.is_array() || span.size() != 2)
            throw ConfigError("span must be [start, end] dates");
        cfg.span_start = get_date(span[0], "span start");
        cfg.span_end = get_date(span[1], "span end");
    }
    if (j.contains("daily_missing_prob"))
        cfg.daily_missing_prob = j.at("daily_missing_prob").get<double>();
    if (j.contains("daily_dropout_hazard"))
        cfg.daily_dropout_hazard = j.at("daily_dropout_hazard").get<double>();
    if (j.contains("session_prob")) cfg.session_prob = j.at("session_prob").get<double>();
    if (j.contains("session_shift")) cfg.session_shift = j.at("session_shift").get<double>();
    if (j.contains("utc_offset_minutes"))
        cfg.utc_offset = UtcOffset{j.at("utc_offset_minutes").get<int>()};
    if (j.contains("tranches")) {
        cfg.tranches.clear();
        for (const json& t : j.at("tranches")) {
            require_keys(t, {"join", "fraction"}, "tranche");
            cfg.tranches.push_back(
                {get_date(t.at("join"), "tranche join"), t.at("fraction").get<double>()});
        }
    }
    if (j.contains("measures")) {
        std::vector<MeasureSimConfig> defaults = cfg.measures;
        cfg.measures.clear();
        for (const json& m : j.at("measures")) {
            require_keys(m, {"measure", "xi", "omega", "alpha", "amplitude", "records_per_day",
                             "clamp"},
                         "simulate measure");
            const Measure measure = get_measure(m.at("measure"), "simulate measure");
            MeasureSimConfig mc;
            bool found = false;
            for (const MeasureSimConfig& d : defaults)
                if (d.measure == measure) {
                    mc = d;
                    found = true;
                }
            if (!found) mc.measure = measure;
            if (m.contains("xi")) std::tie(mc.xi_lo, mc.xi_hi) = get_range(m.at("xi"), "xi");
            if (m.contains("omega"))
                std::tie(mc.omega_lo, mc.omega_hi) = get_range(m.at("omega"), "omega");
            if (m.contains("alpha"))
                std::tie(mc.alpha_lo, mc.alpha_hi) = get_range(m.at("alpha"), "alpha");
            if (m.contains("amplitude"))
                std::tie(mc.amplitude_lo, mc.amplitude_hi) = get_range(m.at("amplitude"), "amplitude");
            if (m.contains("records_per_day"))
                mc.records_per_day = m.at("records_per_day").get<int>();
            if (m.contains("clamp"))
                std::tie(mc.clamp_lo, mc.clamp_hi) = get_range(m.at("clamp"), "clamp");
            cfg.measures.push_back(mc);
        }
    }
    if (j.contains("effects")) {
        cfg.effects.clear();
        for (const json& e : j.at("effects")) {
            require_keys(e, {"measure", "period", "week", "shift_mad"}, "planted effect");
            PlantedEffect pe;
            pe.measure = get_measure(e.at("measure"), "effect measure");
            if (e.contains("period")) {
                auto p = period_from_name(e.at("period").get<std::string>());
                if (!p)
                    throw ConfigError("unknown period '" + e.at("period").get<std::string>() +
                                      "' in planted effect");
                pe.period = *p;
            }
            if (e.contains("week")) pe.week = e.at("week").get<int>();
            pe.shift_mad = e.at("shift_mad").get<double>();
            cfg.effects.push_back(pe);
        }
    }
    return cfg;
}

AnalysisSpec parse_analysis(const json& j) {
    require_keys(j,
                 {"measure", "detrend", "normalize", "daily_max", "amplitude_bound", "periods",
                  "calendar_weeks"},
                 "measure analysis");
    AnalysisSpec spec;
    spec.measure = get_measure(j.at("measure"), "analysis measure");
    spec.detrend = spec.measure == Measure::SleepHR || spec.measure == Measure::SleepHRV;
    spec.normalize = spec.measure == Measure::SleepHR || spec.measure == Measure::SleepHRV ||
                     spec.measure == Measure::WakingHR;
    if (j.contains("detrend")) spec.detrend = j.at("detrend").get<bool>();
    if (j.contains("normalize")) spec.normalize = j.at("normalize").get<bool>();
    if (j.contains("daily_max")) spec.daily_max = j.at("daily_max").get<bool>();
    if (j.contains("amplitude_bound"))
        spec.amplitude_bound = get_range(j.at("amplitude_bound"), "amplitude_bound");
    if (j.contains("periods")) spec.periods = j.at("periods").get<bool>();
    if (j.contains("calendar_weeks")) spec.calendar_weeks = j.at("calendar_weeks").get<bool>();
    return spec;
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
    fs::path path{p};
    if (path.is_absolute() || base_dir.empty()) return p;
    return (fs::path(base_dir) / path).string();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    require_keys(j,
                 {"input", "output_dir", "utc_offset_minutes", "analyses", "significance",
                  "baseline", "calendar", "measures", "threads", "write_intermediates"},
                 "run config");

    RunConfig cfg;
    cfg.calendar = default_calendar_config();
    cfg.analyses = default_analyses();

    if (!j.contains("input")) throw ConfigError("run config needs an 'input' block");
    const json& input = j.at("input");
    require_keys(input, {"csv", "simulate"}, "input");
    if (input.contains("csv"))
        cfg.input_csv = resolve_path(base_dir, input.at("csv").get<std::string>());
    if (input.contains("simulate")) cfg.simulate = parse_sim(input.at("simulate"));

    if (j.contains("output_dir"))
        cfg.output_dir = resolve_path(base_dir, j.at("output_dir").get<std::string>());
    if (j.contains("utc_offset_minutes"))
        cfg.utc_offset = UtcOffset{j.at("utc_offset_minutes").get<int>()};
    if (j.contains("threads")) cfg.threads = j.at("threads").get<size_t>();
    if (j.contains("write_intermediates"))
        cfg.write_intermediates = j.at("write_intermediates").get<bool>();

    if (j.contains("analyses")) {
        const json& a = j.at("analyses");
        require_keys(a, {"periods", "calendar_weeks"}, "analyses");
        if (a.contains("periods")) cfg.run_periods = a.at("periods").get<bool>();
        if (a.contains("calendar_weeks"))
            cfg.run_calendar_weeks = a.at("calendar_weeks").get<bool>();
    }
    if (j.contains("significance")) {
        const json& s = j.at("significance");
        require_keys(s, {"mode", "alpha"}, "significance");
        if (s.contains("mode")) {
            const std::string mode = s.at("mode").get<std::string>();
            if (mode == "strict")
                cfg.significance = {SignificanceMode::Strict, 0.05};
            else if (mode == "threshold")
                cfg.significance = {SignificanceMode::Threshold, 0.001};
            else
                throw ConfigError("significance mode must be 'threshold' or 'strict'");
        }
        if (s.contains("alpha")) cfg.significance.alpha = s.at("alpha").get<double>();
    }
    if (j.contains("baseline")) {
        const json& b = j.at("baseline");
        require_keys(b, {"min_observations", "mad"}, "baseline");
        if (b.contains("min_observations"))
            cfg.baseline.min_observations = b.at("min_observations").get<size_t>();
        if (b.contains("mad")) {
            const std::string mad = b.at("mad").get<std::string>();
            if (mad == "mean_abs")
                cfg.baseline.mad_kind = MadKind::MeanAbs;
            else if (mad == "median_abs")
                cfg.baseline.mad_kind = MadKind::MedianAbs;
            else
                throw ConfigError("baseline mad must be 'mean_abs' or 'median_abs'");
        }
    }
    if (j.contains("calendar")) cfg.calendar = parse_calendar(j.at("calendar"));
    if (j.contains("measures")) {
        cfg.analyses.clear();
        for (const json& m : j.at("measures")) cfg.analyses.push_back(parse_analysis(m));
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str(), fs::path(path).parent_path().string());
}

SimConfig load_sim_config(const std::string& path) {
    json j = load_json_file(path);
    // accept either a bare simulate block or a run config carrying one
    if (j.contains("input") && j.at("input").contains("simulate"))
        return parse_sim(j.at("input").at("simulate"));
    return parse_sim(j);
}

CalendarConfig load_calendar_config(const std::string& path) {
    return parse_calendar(load_json_file(path));
}

}  // namespace cohort_pulse
