#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cohort_pulse/baseline.hpp"
#include "cohort_pulse/csv.hpp"
#include "cohort_pulse/diagnostics.hpp"
#include "cohort_pulse/simulate.hpp"
#include "cohort_pulse/sinusoid.hpp"

using namespace cohort_pulse;

namespace {

Date d(int y, unsigned m, unsigned day) {
    return Date{std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} /
                                      std::chrono::day{day}}};
}

// Two-year cohort small enough for unit tests; sleep HR only.
SimConfig small_config(uint64_t seed) {
    SimConfig cfg = default_sim_config();
    cfg.seed = seed;
    cfg.n_participants = 5;
    cfg.span_start = d(2021, 7, 30);
    cfg.span_end = d(2023, 7, 30);
    cfg.tranches = {{d(2021, 7, 30), 1.0}};
    cfg.daily_dropout_hazard = 0.0;
    cfg.measures = {{Measure::SleepHR, 52.0, 58.0, 4.0, 7.0, 3.0, 5.0, 1.5, 3.0, 4, 21.0, 249.0}};
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("simulate");

TEST_CASE("identical seeds give byte-identical record sets") {
    auto a = generate_cohort(small_config(1234));
    auto b = generate_cohort(small_config(1234));
    CHECK(serialize_records(a.records) == serialize_records(b.records));
    CHECK(a.truth == b.truth);

    auto c = generate_cohort(small_config(1235));
    CHECK(serialize_records(a.records) != serialize_records(c.records));
}

TEST_CASE("truth report round-trips exactly") {
    SimConfig cfg = small_config(77);
    cfg.effects = {{Measure::SleepHR, PeriodLabel::SummerExam, std::nullopt, 0.42},
                   {Measure::SleepHR, std::nullopt, 30, -0.2}};
    auto sim = generate_cohort(cfg);
    const std::string report = truth_report(sim.truth);
    std::istringstream in(report);
    GroundTruth parsed = parse_truth_report(in);
    CHECK(parsed == sim.truth);
    CHECK(parsed.effects == cfg.effects);
}

TEST_CASE("single-participant cohort yields one parameter row per measure") {
    SimConfig cfg = default_sim_config();
    cfg.seed = 5;
    cfg.n_participants = 1;
    cfg.span_start = d(2022, 1, 1);
    cfg.span_end = d(2022, 3, 1);
    cfg.tranches = {{d(2022, 1, 1), 1.0}};
    auto sim = generate_cohort(cfg);
    const std::string report = truth_report(sim.truth);
    size_t param_rows = 0;
    std::istringstream in(report);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line))
        if (line.rfind("param,", 0) == 0) ++param_rows;
    CHECK(param_rows == cfg.measures.size());
    REQUIRE(sim.truth.participants.size() == 1);
    CHECK(sim.truth.participants[0].measures.size() == cfg.measures.size());
}

TEST_CASE("session records appear only on waking HR and are flagged") {
    SimConfig cfg = default_sim_config();
    cfg.seed = 9;
    cfg.n_participants = 3;
    cfg.span_start = d(2022, 1, 1);
    cfg.span_end = d(2022, 12, 31);
    cfg.tranches = {{d(2022, 1, 1), 1.0}};
    cfg.session_prob = 0.2;
    auto sim = generate_cohort(cfg);
    size_t sessions = 0;
    for (const auto& r : sim.records.records()) {
        if (r.session_flag) {
            ++sessions;
            CHECK(r.measure == Measure::WakingHR);
        }
    }
    CHECK(sessions > 0);
}

TEST_CASE("every generated value satisfies the record invariants") {
    auto sim = generate_cohort(small_config(55));
    for (const auto& r : sim.records.records()) CHECK(value_in_range(r.measure, r.value));
}

TEST_CASE("tranche onboarding shows as leading unavailability") {
    SimConfig cfg = small_config(31);
    cfg.n_participants = 6;
    cfg.tranches = {{d(2021, 7, 30), 0.5}, {d(2022, 2, 1), 0.5}};
    auto sim = generate_cohort(cfg);
    auto m = usage_matrix(sim.records, cfg.utc_offset);
    for (const auto& p : sim.truth.participants) {
        size_t col = 0;
        while (m.participants[col] != p.participant_id) ++col;
        for (size_t row = 0; row < m.dates.size(); ++row) {
            if (m.dates[row] < p.join_date) CHECK_FALSE(m.cell(row, col));
        }
        // first availability is exactly the join date (no missing-day draw on
        // day one for these seeds would be too strict; just bound it)
        size_t first_row = 0;
        while (first_row < m.dates.size() && !m.cell(first_row, col)) ++first_row;
        REQUIRE(first_row < m.dates.size());
        CHECK(m.dates[first_row] >= p.join_date);
    }
}

TEST_CASE("pipeline recovers the planted seasonal amplitude and baseline mode") {
    auto sim = generate_cohort(small_config(2024));
    for (const auto& p : sim.truth.participants) {
        const auto* truth = sim.truth.find(p.participant_id, Measure::SleepHR);
        REQUIRE(truth != nullptr);
        auto series = series_for(sim.records, p.participant_id, Measure::SleepHR, false);
        auto fit = fit_sinusoid(series);
        CHECK(std::fabs(fit.amplitude - truth->amplitude) / truth->amplitude <= 0.15);

        auto flat = detrend(series, fit);
        auto base = fit_baseline(flat);
        CHECK(std::fabs(base.mode - truth->mode) <= 0.5);
        // dispersion estimate tracks the model-implied value loosely
        CHECK(std::fabs(base.mad - truth->mad) / truth->mad <= 0.15);
    }
}

TEST_CASE("planted period shifts move the affected draws") {
    SimConfig cfg = small_config(404);
    SimConfig null_cfg = cfg;
    cfg.effects = {{Measure::SleepHR, PeriodLabel::SummerExam, std::nullopt, 2.0}};
    auto planted = generate_cohort(cfg);
    auto null_run = generate_cohort(null_cfg);
    // same seed: identical draws except inside the planted period
    const auto& a = planted.records.records();
    const auto& b = null_run.records.records();
    REQUIRE(a.size() == b.size());
    auto cal = default_calendar();
    size_t shifted = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        const bool in_period =
            cal.assign(local_date(a[i].timestamp, cfg.utc_offset)) == PeriodLabel::SummerExam;
        if (in_period) {
            CHECK(a[i].value > b[i].value);
            ++shifted;
        } else {
            CHECK(a[i].value == b[i].value);
        }
    }
    CHECK(shifted > 0);
}

TEST_CASE("default balanced cohort keeps weekly shares below 0.15") {
    SimConfig cfg = default_sim_config();
    cfg.seed = 7;
    // trim to the two leading measures to keep the unit test quick
    std::vector<MeasureSimConfig> keep;
    for (const auto& m : cfg.measures)
        if (m.measure == Measure::SleepHR || m.measure == Measure::WakingHR) keep.push_back(m);
    cfg.measures = keep;
    auto sim = generate_cohort(cfg);
    auto shares = weekly_data_share(sim.records, cfg.utc_offset);
    CHECK(shares.max_share_overall() <= 0.15);
}

TEST_SUITE_END();
