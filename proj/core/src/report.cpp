#include "cohort_pulse/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cohort_pulse/csv.hpp"
#include "cohort_pulse/diagnostics.hpp"
#include "cohort_pulse/errors.hpp"
#include "cohort_pulse/numeric.hpp"
#include "cohort_pulse/svg.hpp"
#include "cohort_pulse/threading.hpp"

namespace cohort_pulse {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string AnalysisSpec::label() const {
    std::string l{measure_name(measure)};
    if (daily_max) l += "_max";
    return l;
}

std::vector<AnalysisSpec> default_analyses() {
    std::vector<AnalysisSpec> specs;
    specs.push_back({Measure::SleepHR, true, true, false, std::nullopt, true, true});
    specs.push_back({Measure::SleepHRV, true, true, false, std::nullopt, true, true});
    specs.push_back({Measure::WakingHR, false, true, false, std::nullopt, true, true});
    specs.push_back({Measure::WakingHR, false, true, true, std::nullopt, true, true});
    for (Measure m : {Measure::HighActivitySeconds, Measure::TotalSleepDuration,
                      Measure::DeepSleepPct, Measure::LightSleepPct})
        specs.push_back({m, false, false, false, std::nullopt, false, true});
    return specs;
}

void RunConfig::validate() const {
    if (input_csv.has_value() == simulate.has_value())
        throw ConfigError("config must name exactly one input: a csv path or a simulate block");
    if (analyses.empty()) throw ConfigError("config lists no analyses");
    if (!run_periods && !run_calendar_weeks)
        throw ConfigError("at least one of periods/calendar_weeks must be enabled");
    if (output_dir.empty()) throw ConfigError("output_dir is empty");
    std::set<std::string> labels;
    for (const AnalysisSpec& spec : analyses)
        if (!labels.insert(spec.label()).second)
            throw ConfigError("duplicate analysis lane '" + spec.label() + "'");
    if (simulate) simulate->validate();
}

namespace {

// ---------------------------------------------------------------------------
// per-participant preparation (exclusion -> detrend -> baseline -> normalize)
// ---------------------------------------------------------------------------

struct PrepKey {
    Measure measure{};
    bool detrend = false;
    bool normalize = false;
    double amp_lo = 0.0, amp_hi = 0.0;

    friend auto operator<=>(const PrepKey&, const PrepKey&) = default;
};

PrepKey key_of(const AnalysisSpec& spec) {
    auto opts = default_sinusoid_options(spec.measure);
    double lo = opts.amplitude_lo, hi = opts.amplitude_hi;
    if (spec.amplitude_bound) {
        lo = spec.amplitude_bound->first;
        hi = spec.amplitude_bound->second;
    }
    return {spec.measure, spec.detrend, spec.normalize, lo, hi};
}

struct PreparedParticipant {
    std::string id;
    std::optional<MeasureSeries> raw;         // post-exclusion, post-detrend
    std::optional<MeasureSeries> normalized;  // raw scaled to MAD units
    std::optional<SinusoidFit> sinusoid;
    std::optional<BaselineModel> baseline;
    std::string skip_stage;   // non-empty when some stage was skipped
    std::string skip_reason;
};

struct Prepared {
    PrepKey key;
    std::vector<PreparedParticipant> participants;  // sorted by id
};

PreparedParticipant prepare_participant(const RecordSet& rs, const std::string& id,
                                        const PrepKey& key, const BaselineOptions& baseline_opts,
                                        const PeriodCalendar& calendar, UtcOffset offset) {
    PreparedParticipant out;
    out.id = id;
    try {
        MeasureSeries series = series_for(rs, id, key.measure, /*include_sessions=*/false);
        if (key.detrend) {
            SinusoidOptions opts = default_sinusoid_options(key.measure);
            opts.amplitude_lo = key.amp_lo;
            opts.amplitude_hi = key.amp_hi;
            // One free level per period label keeps calendar-locked period
            // effects out of the fitted annual cycle (semester is category 0;
            // labels stay separate so distinct shifts cannot alias the sine).
            std::vector<int> category;
            category.reserve(series.size());
            for (const auto& p : series.points()) {
                const PeriodLabel label = calendar.assign(local_date(p.timestamp, offset));
                category.push_back(label == PeriodLabel::Semester ? 0 : 1 + int(label));
            }
            out.sinusoid = fit_sinusoid_with_offsets(series, opts, category);
            series = detrend(series, *out.sinusoid);
        }
        if (key.normalize) {
            out.baseline = fit_baseline(series, baseline_opts);
            out.normalized = normalize(series, *out.baseline);
        }
        out.raw = std::move(series);
    } catch (const Error& e) {
        out.skip_stage = e.module();
        out.skip_reason = e.what();
        out.raw.reset();
        out.normalized.reset();
    }
    return out;
}

// ---------------------------------------------------------------------------
// model assembly
// ---------------------------------------------------------------------------

std::vector<std::string> period_domain() {
    std::vector<std::string> domain;
    for (PeriodLabel p : kAllPeriods) domain.emplace_back(period_name(p));
    return domain;
}

// (date, value) rows of one participant's response, aggregated if requested.
template <typename Emit>
void for_each_response(const MeasureSeries& series, bool use_daily_max, UtcOffset offset,
                       Emit&& emit) {
    if (use_daily_max) {
        const DailySeries daily = daily_max(series, offset);
        for (const auto& p : daily.points) emit(p.date, p.value);
    } else {
        for (const auto& p : series.points()) emit(local_date(p.timestamp, offset), p.value);
    }
}

std::vector<Observation> build_period_observations(const Prepared& prep, bool normalized_variant,
                                                   bool use_daily_max, UtcOffset offset,
                                                   const PeriodCalendar& calendar) {
    std::vector<Observation> obs;
    for (const PreparedParticipant& pp : prep.participants) {
        const auto& series = normalized_variant ? pp.normalized : pp.raw;
        if (!series) continue;
        for_each_response(*series, use_daily_max, offset, [&](Date d, double v) {
            obs.push_back({pp.id, v, std::string(period_name(calendar.assign(d)))});
        });
    }
    return obs;
}

std::vector<Observation> build_week_observations(const Prepared& prep, bool normalized_variant,
                                                 bool use_daily_max, UtcOffset offset) {
    std::vector<Observation> obs;
    for (const PreparedParticipant& pp : prep.participants) {
        const auto& series = normalized_variant ? pp.normalized : pp.raw;
        if (!series) continue;
        for_each_response(*series, use_daily_max, offset, [&](Date d, double v) {
            obs.push_back({pp.id, v, week_level(iso_week_fold(d).value)});
        });
    }
    return obs;
}

double semester_median_of(const Prepared& prep, bool normalized_variant, bool use_daily_max,
                          UtcOffset offset, const PeriodCalendar& calendar) {
    std::vector<double> values;
    for (const PreparedParticipant& pp : prep.participants) {
        const auto& series = normalized_variant ? pp.normalized : pp.raw;
        if (!series) continue;
        for_each_response(*series, use_daily_max, offset, [&](Date d, double v) {
            if (calendar.assign(d) == PeriodLabel::Semester) values.push_back(v);
        });
    }
    if (values.empty())
        throw OptimFailed("no semester-period observations to anchor the calendar-week model");
    return numeric::median(std::move(values));
}

ModelResult fit_period_model(std::string model_name, std::vector<Observation> obs,
                             const SignificancePolicy& policy) {
    DesignMatrix d = encode_design(obs, period_domain(), std::string(period_name(PeriodLabel::Semester)));
    ModelResult r;
    r.model = std::move(model_name);
    r.fit = fit_reml(d);
    r.rows = wald_inference(r.fit);
    std::vector<double> ps;
    for (const auto& row : r.rows) ps.push_back(row.p);
    r.significant = bonferroni_flags(ps, std::max<size_t>(r.fit.bonferroni_m, 1), policy);
    r.dropped_levels = d.dropped_levels;
    r.observations = std::move(obs);
    return r;
}

ModelResult fit_calweek_model(std::string model_name, std::vector<Observation> obs,
                              double semester_median, const SignificancePolicy& policy,
                              CalweekModel& out_cw) {
    out_cw = calweek_model(obs, semester_median);
    ModelResult r;
    r.model = std::move(model_name);
    r.fit = out_cw.fit;
    r.rows = wald_inference(r.fit);
    std::vector<double> ps;
    for (const auto& row : r.rows) ps.push_back(row.p);
    r.significant = bonferroni_flags(ps, std::max<size_t>(r.fit.bonferroni_m, 1), policy);
    for (int w : out_cw.dropped_weeks) r.dropped_levels.push_back(week_level(w));
    r.observations = std::move(obs);
    return r;
}

// ---------------------------------------------------------------------------
// artifact writers
// ---------------------------------------------------------------------------

class ArtifactStage {
public:
    explicit ArtifactStage(fs::path out_dir) : out_dir_(std::move(out_dir)) {
        staging_ = out_dir_ / ".staging";
        fs::create_directories(staging_);
    }

    ~ArtifactStage() {
        std::error_code ec;
        fs::remove_all(staging_, ec);
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(staging_ / name, std::ios::binary);
        if (!f) throw Error("cli_report", "cannot write artifact '" + name + "'");
        f << content;
        f.close();
        names_.push_back(name);
    }

    /// Moves everything into the output directory. Nothing is visible there
    /// until this commit runs.
    std::vector<std::string> commit() {
        for (const std::string& name : names_) {
            fs::rename(staging_ / name, out_dir_ / name);
        }
        return names_;
    }

private:
    fs::path out_dir_;
    fs::path staging_;
    std::vector<std::string> names_;
};

std::string coefficients_csv(const std::vector<ModelResult>& models) {
    std::ostringstream os;
    os << "model,term,estimate,se,z,p,significant\n";
    for (const ModelResult& m : models) {
        for (size_t i = 0; i < m.rows.size(); ++i) {
            const CoefficientRow& r = m.rows[i];
            os << m.model << ',' << r.term << ',' << format_double(r.estimate) << ','
               << format_double(r.se) << ',';
            if (r.estimable)
                os << format_double(r.z) << ',' << format_double(r.p);
            else
                os << ',';  // non-estimable: z and p omitted
            os << ',' << (m.significant[i] ? "true" : "false") << '\n';
        }
    }
    return os.str();
}

std::string calweek_csv(const CalweekModel& cw) {
    std::ostringstream os;
    os << "week,estimate,se,p,p_below_010,p_below_005\n";
    for (const WeekCoefficient& w : cw.weeks) {
        os << w.week << ',' << format_double(w.estimate) << ',' << format_double(w.se) << ','
           << format_double(w.p) << ',' << (w.p_below_010 ? "true" : "false") << ','
           << (w.p_below_005 ? "true" : "false") << '\n';
    }
    return os.str();
}

std::string observations_csv(const std::vector<Observation>& obs) {
    std::ostringstream os;
    os << "participant,level,response\n";
    for (const Observation& o : obs)
        os << o.participant_id << ',' << o.level << ',' << format_double(o.response) << '\n';
    return os.str();
}

std::string fits_csv(const std::vector<Prepared>& preps) {
    std::ostringstream os;
    os << "participant,measure,A,B,C,D,xi,omega,alpha,m0,mad,n\n";
    for (const Prepared& prep : preps) {
        for (const PreparedParticipant& pp : prep.participants) {
            if (!pp.sinusoid && !pp.baseline) continue;
            os << pp.id << ',' << measure_name(prep.key.measure) << ',';
            if (pp.sinusoid) {
                os << format_double(pp.sinusoid->amplitude) << ','
                   << format_double(pp.sinusoid->angular_freq) << ','
                   << format_double(pp.sinusoid->phase) << ','
                   << format_double(pp.sinusoid->vertical_shift) << ',';
            } else {
                os << ",,,,";
            }
            if (pp.baseline) {
                os << format_double(pp.baseline->params.xi) << ','
                   << format_double(pp.baseline->params.omega) << ','
                   << format_double(pp.baseline->params.alpha) << ','
                   << format_double(pp.baseline->mode) << ',' << format_double(pp.baseline->mad)
                   << ',' << pp.baseline->n << '\n';
            } else {
                os << ",,,,,\n";
            }
        }
    }
    return os.str();
}

std::string skipped_csv(const std::vector<Prepared>& preps) {
    std::ostringstream os;
    os << "participant,measure,stage,reason\n";
    for (const Prepared& prep : preps) {
        for (const PreparedParticipant& pp : prep.participants) {
            if (pp.skip_stage.empty()) continue;
            std::string reason = pp.skip_reason;
            for (char& c : reason)
                if (c == ',' || c == '\n') c = ';';
            os << pp.id << ',' << measure_name(prep.key.measure) << ',' << pp.skip_stage << ','
               << reason << '\n';
        }
    }
    return os.str();
}

std::string weekly_share_csv(const WeeklyShares& shares) {
    std::ostringstream os;
    os << "iso_year,iso_week,participant,share\n";
    for (const auto& w : shares.weeks)
        for (const auto& [id, share] : w.share)
            os << w.week.year << ',' << w.week.week << ',' << id << ',' << format_double(share)
               << '\n';
    return os.str();
}

std::string weekly_share_summary_csv(const WeeklyShares& shares) {
    std::ostringstream os;
    os << "iso_year,iso_week,max_share\n";
    for (const auto& w : shares.weeks)
        os << w.week.year << ',' << w.week.week << ',' << format_double(w.max_share) << '\n';
    return os.str();
}

std::string usage_matrix_csv(const UsageMatrix& m) {
    std::ostringstream os;
    os << "date";
    for (const std::string& p : m.participants) os << ',' << p;
    os << '\n';
    for (size_t i = 0; i < m.dates.size(); ++i) {
        os << format_date(m.dates[i]);
        for (size_t j = 0; j < m.participants.size(); ++j) os << ',' << (m.available[i][j] ? 1 : 0);
        os << '\n';
    }
    return os.str();
}

ordered_json model_summary_json(const ModelResult& m) {
    ordered_json j;
    j["model"] = m.model;
    j["n_obs"] = m.fit.n_obs;
    j["n_groups"] = m.fit.n_groups;
    j["sigma2_gamma"] = m.fit.sigma2_gamma;
    j["sigma2_eps"] = m.fit.sigma2_eps;
    j["r2_marginal"] = m.fit.r2_marginal;
    j["r2_conditional"] = m.fit.r2_conditional;
    j["reml_loglik"] = m.fit.reml_loglik;
    j["bonferroni_m"] = m.fit.bonferroni_m;
    j["theta_at_boundary"] = m.fit.theta_at_boundary;
    j["dropped_levels"] = m.dropped_levels;
    return j;
}

void write_error_report(const fs::path& out_dir, const std::string& module,
                        const std::string& message) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::ofstream f(out_dir / "error.json", std::ios::binary);
    ordered_json j;
    j["module"] = module;
    j["message"] = message;
    f << j.dump(2) << '\n';
}

}  // namespace

RunResult run(const RunConfig& cfg) {
    RunResult result;
    const fs::path out_dir{cfg.output_dir};
    try {
        cfg.validate();
        const size_t threads = effective_thread_count(cfg.threads);
        const PeriodCalendar calendar = PeriodCalendar::build(cfg.calendar);

        // -- input ----------------------------------------------------------
        RecordSet rs;
        std::vector<RejectedRow> rejections;
        if (cfg.input_csv) {
            ParseResult parsed = parse_records_file(*cfg.input_csv);
            rs = std::move(parsed.records);
            rejections = std::move(parsed.rejections);
        } else {
            rs = generate_cohort(*cfg.simulate, calendar).records;
        }
        if (rs.empty()) throw ParseError("input contains no usable records");

        // -- per-participant fits, shared across lanes ------------------------
        std::map<PrepKey, size_t> prep_index;
        std::vector<Prepared> preps;
        for (const AnalysisSpec& spec : cfg.analyses) {
            const PrepKey key = key_of(spec);
            if (prep_index.count(key)) continue;
            prep_index[key] = preps.size();
            preps.push_back({key, {}});
        }
        for (Prepared& prep : preps) {
            std::vector<std::string> ids;
            for (const std::string& id : rs.participants())
                if (rs.has(id, prep.key.measure)) ids.push_back(id);
            prep.participants.resize(ids.size());
            parallel_for(ids.size(), threads, [&](size_t i) {
                prep.participants[i] = prepare_participant(rs, ids[i], prep.key, cfg.baseline,
                                                           calendar, cfg.utc_offset);
            });
        }

        // -- models -----------------------------------------------------------
        struct ModelTask {
            std::string name;
            std::vector<Observation> obs;
            bool is_calweek = false;
            double semester_median = 0.0;
        };
        std::vector<ModelTask> tasks;
        for (const AnalysisSpec& spec : cfg.analyses) {
            const Prepared& prep = preps[prep_index[key_of(spec)]];
            const std::string label = spec.label();
            if (cfg.run_periods && spec.periods) {
                tasks.push_back({label + "_raw",
                                 build_period_observations(prep, false, spec.daily_max,
                                                           cfg.utc_offset, calendar),
                                 false, 0.0});
                if (spec.normalize)
                    tasks.push_back({label + "_normalized",
                                     build_period_observations(prep, true, spec.daily_max,
                                                               cfg.utc_offset, calendar),
                                     false, 0.0});
            }
            if (cfg.run_calendar_weeks && spec.calendar_weeks) {
                ModelTask t;
                t.name = "calweek_" + label;
                t.is_calweek = true;
                t.obs = build_week_observations(prep, spec.normalize, spec.daily_max,
                                                cfg.utc_offset);
                t.semester_median = semester_median_of(prep, spec.normalize, spec.daily_max,
                                                       cfg.utc_offset, calendar);
                tasks.push_back(std::move(t));
            }
        }

        std::vector<ModelResult> fitted(tasks.size());
        std::vector<CalweekModel> calweeks(tasks.size());
        parallel_for(tasks.size(), threads, [&](size_t i) {
            ModelTask& t = tasks[i];
            if (t.is_calweek)
                fitted[i] = fit_calweek_model(t.name, std::move(t.obs), t.semester_median,
                                              cfg.significance, calweeks[i]);
            else
                fitted[i] = fit_period_model(t.name, std::move(t.obs), cfg.significance);
        });

        // -- artifacts --------------------------------------------------------
        fs::create_directories(out_dir);
        ArtifactStage stage(out_dir);

        std::vector<ModelResult> period_models;
        for (size_t i = 0; i < fitted.size(); ++i)
            if (!tasks[i].is_calweek) period_models.push_back(fitted[i]);
        if (!period_models.empty())
            stage.write("coefficients.csv", coefficients_csv(period_models));

        ordered_json summaries = ordered_json::array();
        for (const ModelResult& m : fitted) summaries.push_back(model_summary_json(m));
        stage.write("model_summaries.json", summaries.dump(2) + "\n");

        for (size_t i = 0; i < fitted.size(); ++i) {
            if (cfg.write_intermediates)
                stage.write("intermediate_" + fitted[i].model + ".csv",
                            observations_csv(fitted[i].observations));
            if (!tasks[i].is_calweek) continue;
            const AnalysisSpec* spec = nullptr;
            for (const AnalysisSpec& s : cfg.analyses)
                if ("calweek_" + s.label() == fitted[i].model) spec = &s;
            WeekPlotInfo info;
            info.title = fitted[i].model;
            info.reference = calweeks[i].reference;
            info.r2_marginal = fitted[i].fit.r2_marginal;
            info.r2_conditional = fitted[i].fit.r2_conditional;
            info.unit = spec && spec->normalize ? "MAD" : "measure units";
            stage.write(fitted[i].model + ".csv", calweek_csv(calweeks[i]));
            stage.write(fitted[i].model + ".svg",
                        emit_week_plot(calweeks[i].weeks, calendar, info));
        }

        stage.write("fits.csv", fits_csv(preps));
        stage.write("skipped.csv", skipped_csv(preps));

        const WeeklyShares shares = weekly_data_share(rs, cfg.utc_offset);
        stage.write("weekly_share.csv", weekly_share_csv(shares));
        stage.write("weekly_share_summary.csv", weekly_share_summary_csv(shares));
        stage.write("usage_matrix.csv", usage_matrix_csv(usage_matrix(rs, cfg.utc_offset)));
        if (cfg.input_csv) stage.write("rejections.csv", rejection_report_csv(rejections));

        ordered_json summary;
        summary["input"] = cfg.input_csv ? ordered_json{{"csv", *cfg.input_csv}}
                                         : ordered_json{{"simulate", {{"seed", cfg.simulate->seed}}}};
        summary["n_records"] = rs.size();
        summary["n_participants"] = rs.participants().size();
        summary["n_rejections"] = rejections.size();
        summary["significance_mode"] =
            cfg.significance.mode == SignificanceMode::Strict ? "strict" : "threshold";
        summary["alpha"] = cfg.significance.alpha;
        ordered_json names = ordered_json::array();
        for (const ModelResult& m : fitted) names.push_back(m.model);
        summary["models"] = names;
        stage.write("run_summary.json", summary.dump(2) + "\n");

        result.artifacts = stage.commit();
        for (size_t i = 0; i < fitted.size(); ++i) {
            if (tasks[i].is_calweek)
                result.calweek_models.push_back(std::move(fitted[i]));
            else
                result.period_models.push_back(std::move(fitted[i]));
        }
        result.exit_code = 0;
    } catch (const Error& e) {
        write_error_report(out_dir, e.module(), e.what());
        result.exit_code = 1;
        result.error = std::string(e.module()) + ": " + e.what();
    } catch (const std::exception& e) {
        write_error_report(out_dir, "cli_report", e.what());
        result.exit_code = 1;
        result.error = e.what();
    }
    return result;
}

}  // namespace cohort_pulse
