#include "cohort_pulse/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "cohort_pulse/csv.hpp"
#include "cohort_pulse/errors.hpp"
#include "cohort_pulse/rng.hpp"
#include "cohort_pulse/sinusoid.hpp"

namespace cohort_pulse {

namespace {

Date make_date(int y, unsigned m, unsigned d) {
    return Date{std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} /
                                      std::chrono::day{d}}};
}

// Local-clock slots, minutes after midnight. Sleep measures land at night,
// waking measures during the day, daily summaries at fixed hours.
std::vector<int> slot_minutes(Measure m, int records_per_day) {
    std::vector<int> slots;
    int start = 0, step = 0;
    switch (m) {
        case Measure::SleepHR:
        case Measure::SleepHRV:
            start = 30; step = 85;  // 00:30, 01:55, 03:20, ...
            break;
        case Measure::WakingHR:
            start = 9 * 60; step = 95;  // 09:00, 10:35, ...
            break;
        case Measure::TotalSleepDuration:
        case Measure::DeepSleepPct:
        case Measure::LightSleepPct:
            start = 8 * 60; step = 30;
            break;
        case Measure::HighActivitySeconds:
            start = 21 * 60; step = 15;
            break;
    }
    for (int i = 0; i < records_per_day; ++i) slots.push_back(start + i * step);
    return slots;
}

constexpr int kSessionSlotMinutes = 18 * 60 + 30;

// substream purposes
enum : uint64_t { kAttendance = 1, kParams = 2, kDraws = 3, kSessions = 4 };

}  // namespace

void SimConfig::validate() const {
    if (n_participants < 1) throw ConfigError("n_participants must be >= 1");
    if (span_start > span_end) throw ConfigError("simulation span start is after its end");
    if (daily_missing_prob < 0.0 || daily_missing_prob > 1.0)
        throw ConfigError("daily_missing_prob must be in [0, 1]");
    if (daily_dropout_hazard < 0.0 || daily_dropout_hazard > 1.0)
        throw ConfigError("daily_dropout_hazard must be in [0, 1]");
    if (session_prob < 0.0 || session_prob > 1.0)
        throw ConfigError("session_prob must be in [0, 1]");
    if (measures.empty()) throw ConfigError("simulation needs at least one measure");
    for (const auto& m : measures) {
        if (m.records_per_day < 1) throw ConfigError("records_per_day must be >= 1");
        if (m.omega_lo <= 0.0) throw ConfigError("omega range must be positive");
        if (m.xi_hi < m.xi_lo || m.omega_hi < m.omega_lo || m.alpha_hi < m.alpha_lo ||
            m.amplitude_hi < m.amplitude_lo)
            throw ConfigError("parameter range is inverted for " +
                              std::string(measure_name(m.measure)));
    }
    for (const auto& e : effects) {
        if (e.period.has_value() == e.week.has_value())
            throw ConfigError("planted effect must name exactly one of period or week");
        if (e.week && (*e.week < 1 || *e.week > 52))
            throw ConfigError("planted effect week must be in 1..52");
    }
    double frac = 0.0;
    for (const auto& t : tranches) {
        if (t.fraction <= 0.0) throw ConfigError("tranche fraction must be positive");
        frac += t.fraction;
    }
    if (!tranches.empty() && std::fabs(frac - 1.0) > 1e-9)
        throw ConfigError("tranche fractions must sum to 1");
}

SimConfig default_sim_config() {
    SimConfig cfg;
    cfg.span_start = make_date(2021, 7, 30);
    cfg.span_end = make_date(2023, 11, 21);
    cfg.measures = {
        {Measure::WakingHR, 65.0, 80.0, 6.0, 10.0, 2.0, 5.0, 0.0, 0.0, 6, 21.0, 249.0},
        {Measure::SleepHR, 50.0, 60.0, 4.0, 8.0, 2.0, 6.0, 1.0, 3.5, 4, 21.0, 249.0},
        {Measure::SleepHRV, 45.0, 70.0, 10.0, 18.0, 2.0, 5.0, 4.0, 16.0, 4, 1.0, 499.0},
        {Measure::TotalSleepDuration, 22000.0, 30000.0, 2500.0, 4500.0, -2.0, 2.0, 0.0, 0.0, 1,
         0.0, 86400.0},
        {Measure::DeepSleepPct, 12.0, 25.0, 3.0, 6.0, -1.0, 3.0, 0.0, 0.0, 1, 0.0, 100.0},
        {Measure::LightSleepPct, 45.0, 60.0, 5.0, 8.0, -2.0, 2.0, 0.0, 0.0, 1, 0.0, 100.0},
        {Measure::HighActivitySeconds, 1200.0, 4800.0, 600.0, 1500.0, 1.0, 4.0, 0.0, 0.0, 1, 0.0,
         86400.0},
    };
    cfg.tranches = {
        {make_date(2021, 7, 30), 0.38},
        {make_date(2021, 10, 1), 0.27},
        {make_date(2022, 1, 10), 0.20},
        {make_date(2022, 4, 1), 0.15},
    };
    return cfg;
}

const ParticipantTruth::PerMeasure* GroundTruth::find(const std::string& participant_id,
                                                      Measure m) const {
    for (const auto& p : participants) {
        if (p.participant_id != participant_id) continue;
        for (const auto& pm : p.measures)
            if (pm.measure == m) return &pm;
    }
    return nullptr;
}

SimulatedCohort generate_cohort(const SimConfig& cfg, const PeriodCalendar& calendar) {
    cfg.validate();
    const uint64_t seed = cfg.seed;

    SimulatedCohort out;
    out.truth.effects = cfg.effects;

    // Tranche membership by cumulative fraction over the participant index.
    std::vector<Tranche> tranches = cfg.tranches;
    if (tranches.empty()) tranches.push_back({cfg.span_start, 1.0});

    std::vector<MeasureRecord> records;
    const int digits = cfg.n_participants > 999 ? 5 : 3;

    for (int pi = 0; pi < cfg.n_participants; ++pi) {
        ParticipantTruth truth;
        {
            std::ostringstream id;
            id << 'P';
            std::string num = std::to_string(pi + 1);
            id << std::string(size_t(std::max(0, digits - int(num.size()))), '0') << num;
            truth.participant_id = id.str();
        }

        double cum = 0.0;
        truth.join_date = tranches.back().join_date;
        for (const Tranche& t : tranches) {
            cum += t.fraction;
            if (double(pi) < cum * double(cfg.n_participants) - 1e-9) {
                truth.join_date = t.join_date;
                break;
            }
        }
        truth.join_date = std::max(truth.join_date, cfg.span_start);

        RandomStream attendance = RandomStream::derive(seed, uint64_t(pi), kAttendance);
        // Geometric dropout after joining.
        truth.leave_date = cfg.span_end;
        if (cfg.daily_dropout_hazard > 0.0) {
            const double u = attendance.uniform();
            const double days = std::floor(std::log1p(-u) / std::log1p(-cfg.daily_dropout_hazard));
            Date candidate = truth.join_date + std::chrono::days{int64_t(std::min(days, 1e7))};
            truth.leave_date = std::min(candidate, cfg.span_end);
        }

        // Active days (ring worn), drawn in date order.
        std::vector<Date> active_days;
        for (Date day = truth.join_date; day <= truth.leave_date; day += std::chrono::days{1}) {
            if (!attendance.bernoulli(cfg.daily_missing_prob)) active_days.push_back(day);
        }

        const Instant join_midnight =
            Instant{std::chrono::time_point_cast<std::chrono::seconds>(truth.join_date)} -
            cfg.utc_offset;

        for (size_t mi = 0; mi < cfg.measures.size(); ++mi) {
            const MeasureSimConfig& mc = cfg.measures[mi];
            RandomStream params = RandomStream::derive(seed, uint64_t(pi), kParams, mi);

            ParticipantTruth::PerMeasure pm;
            pm.measure = mc.measure;
            pm.baseline.xi = params.uniform(mc.xi_lo, mc.xi_hi);
            pm.baseline.omega = params.uniform(mc.omega_lo, mc.omega_hi);
            pm.baseline.alpha = params.uniform(mc.alpha_lo, mc.alpha_hi);
            pm.amplitude = params.uniform(mc.amplitude_lo, mc.amplitude_hi);
            pm.phase = params.uniform(-M_PI, M_PI);
            pm.vertical_shift = skew_normal_mean(pm.baseline);
            pm.mode = skew_normal_mode(pm.baseline);
            pm.mad = skew_normal_mean_abs_dev(pm.baseline);

            RandomStream draws = RandomStream::derive(seed, uint64_t(pi), kDraws, mi);
            RandomStream sessions = RandomStream::derive(seed, uint64_t(pi), kSessions, mi);
            const std::vector<int> slots = slot_minutes(mc.measure, mc.records_per_day);

            for (Date day : active_days) {
                double planted = 0.0;
                for (const PlantedEffect& e : cfg.effects) {
                    if (e.measure != mc.measure) continue;
                    const bool hit = e.period ? calendar.assign(day) == *e.period
                                              : iso_week_fold(day).value == *e.week;
                    if (hit) planted += e.shift_mad * pm.mad;
                }

                auto emit = [&](int minutes, double extra, bool session_flag) {
                    const Instant ts =
                        Instant{std::chrono::time_point_cast<std::chrono::seconds>(day)} -
                        cfg.utc_offset + std::chrono::minutes{minutes};
                    const double t = double((ts - join_midnight).count());
                    const double seasonal =
                        pm.amplitude * std::sin(kAnnualAngularFrequency * t + pm.phase);
                    double value =
                        draws.skew_normal(pm.baseline.xi, pm.baseline.omega, pm.baseline.alpha) +
                        seasonal + planted + extra;
                    value = std::clamp(value, mc.clamp_lo, mc.clamp_hi);
                    records.push_back({truth.participant_id, ts, mc.measure, value, session_flag});
                };

                for (int minutes : slots) emit(minutes, 0.0, false);
                if (mc.measure == Measure::WakingHR && sessions.bernoulli(cfg.session_prob))
                    emit(kSessionSlotMinutes, cfg.session_shift, true);
            }
            truth.measures.push_back(pm);
        }
        out.truth.participants.push_back(std::move(truth));
    }

    out.records = RecordSet(std::move(records));
    return out;
}

SimulatedCohort generate_cohort(const SimConfig& cfg) {
    return generate_cohort(cfg, default_calendar());
}

namespace {

constexpr std::string_view kTruthHeader =
    "row_type,participant,measure,xi,omega,alpha,amplitude,phase,vertical_shift,mode,mad,"
    "join_date,leave_date,period,week,shift";

}  // namespace

void truth_report(const GroundTruth& gt, std::ostream& out) {
    out << kTruthHeader << '\n';
    for (const auto& p : gt.participants) {
        for (const auto& pm : p.measures) {
            out << "param," << p.participant_id << ',' << measure_name(pm.measure) << ','
                << format_double(pm.baseline.xi) << ',' << format_double(pm.baseline.omega) << ','
                << format_double(pm.baseline.alpha) << ',' << format_double(pm.amplitude) << ','
                << format_double(pm.phase) << ',' << format_double(pm.vertical_shift) << ','
                << format_double(pm.mode) << ',' << format_double(pm.mad) << ','
                << format_date(p.join_date) << ',' << format_date(p.leave_date) << ",,,\n";
        }
    }
    for (const auto& e : gt.effects) {
        out << "effect,," << measure_name(e.measure) << ",,,,,,,,,,,"
            << (e.period ? std::string(period_name(*e.period)) : std::string()) << ','
            << (e.week ? std::to_string(*e.week) : std::string()) << ','
            << format_double(e.shift_mad) << '\n';
    }
}

std::string truth_report(const GroundTruth& gt) {
    std::ostringstream os;
    truth_report(gt, os);
    return os.str();
}

GroundTruth parse_truth_report(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTruthHeader)
        throw ParseError("malformed truth report header");

    GroundTruth gt;
    auto num = [](std::string_view s) { return std::stod(std::string(s)); };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 16) throw ParseError("truth report row has " + std::to_string(f.size()) +
                                             " fields, expected 16");
        auto measure = measure_from_name(f[2]);
        if (!measure) throw ParseError("unknown measure in truth report: '" + std::string(f[2]) + "'");
        if (f[0] == "param") {
            if (gt.participants.empty() || gt.participants.back().participant_id != f[1]) {
                ParticipantTruth p;
                p.participant_id = std::string(f[1]);
                auto join = parse_date(f[11]);
                auto leave = parse_date(f[12]);
                if (!join || !leave) throw ParseError("bad dates in truth report");
                p.join_date = *join;
                p.leave_date = *leave;
                gt.participants.push_back(std::move(p));
            }
            ParticipantTruth::PerMeasure pm;
            pm.measure = *measure;
            pm.baseline = {num(f[3]), num(f[4]), num(f[5])};
            pm.amplitude = num(f[6]);
            pm.phase = num(f[7]);
            pm.vertical_shift = num(f[8]);
            pm.mode = num(f[9]);
            pm.mad = num(f[10]);
            gt.participants.back().measures.push_back(pm);
        } else if (f[0] == "effect") {
            PlantedEffect e;
            e.measure = *measure;
            if (!f[13].empty()) {
                auto p = period_from_name(f[13]);
                if (!p) throw ParseError("unknown period in truth report");
                e.period = *p;
            }
            if (!f[14].empty()) e.week = std::stoi(std::string(f[14]));
            e.shift_mad = num(f[15]);
            gt.effects.push_back(e);
        } else {
            throw ParseError("unknown truth report row type '" + std::string(f[0]) + "'");
        }
    }
    return gt;
}

}  // namespace cohort_pulse
