#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "cohort_pulse/csv.hpp"
#include "cohort_pulse/diagnostics.hpp"
#include "cohort_pulse/errors.hpp"
#include "cohort_pulse/records.hpp"
#include "cohort_pulse/rng.hpp"

using namespace cohort_pulse;

namespace {

ParseResult parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_records(in);
}

const std::string kHeader = "participant_id,timestamp,measure,value,session_flag\n";

}  // namespace

TEST_SUITE_BEGIN("ingest");

TEST_CASE("well-formed row becomes one record with exact fields") {
    auto r = parse_text(kHeader + "P001,2022-01-25T03:14:00Z,sleep_hr,57.0,false\n");
    REQUIRE(r.accepted == 1);
    REQUIRE(r.rejected == 0);
    const MeasureRecord& rec = r.records.records()[0];
    CHECK(rec.participant_id == "P001");
    CHECK(rec.measure == Measure::SleepHR);
    CHECK(rec.value == 57.0);
    CHECK(rec.session_flag == false);
    CHECK(format_instant_utc(rec.timestamp) == "2022-01-25T03:14:00Z");
}

TEST_CASE("timestamps with offsets normalize to UTC") {
    auto r = parse_text(kHeader + "P001,2022-01-25T12:14:00+09:00,sleep_hr,57.0,false\n");
    REQUIRE(r.accepted == 1);
    CHECK(format_instant_utc(r.records.records()[0].timestamp) == "2022-01-25T03:14:00Z");
}

TEST_CASE("NaN value is rejected with a non-finite reason") {
    auto r = parse_text(kHeader + "P001,2022-01-25T03:14:00Z,sleep_hr,NaN,false\n");
    CHECK(r.accepted == 0);
    REQUIRE(r.rejected == 1);
    CHECK(r.rejections[0].line == 2);
    // NaN never passes the finite/range gate regardless of how it is spelled
    CHECK(r.rejections[0].reason.find("value") != std::string::npos);
}

TEST_CASE("count conservation: 10 valid + 2 invalid rows") {
    std::string text = kHeader;
    for (int i = 0; i < 10; ++i)
        text += "P001,2022-01-0" + std::to_string(i % 9 + 1) + "T0" + std::to_string(i % 10) +
                ":00:00Z,waking_hr,7" + std::to_string(i) + ".5,false\n";
    text += "P001,not-a-time,waking_hr,70,false\n";
    text += "P001,2022-01-09T10:00:00Z,waking_hr,9000,false\n";  // out of range
    auto r = parse_text(text);
    CHECK(r.accepted == 10);
    CHECK(r.rejected == 2);
    CHECK(r.records.size() == 10);
    CHECK(r.rejections.size() == 2);
}

TEST_CASE("malformed header is fatal") {
    std::istringstream in("id,ts,measure,value,flag\nP1,2022-01-01T00:00:00Z,sleep_hr,60,false\n");
    CHECK_THROWS_AS(parse_records(in), ParseError);
}

TEST_CASE("duplicate key rejects the later occurrence") {
    auto r = parse_text(kHeader +
                        "P001,2022-01-25T03:14:00Z,sleep_hr,57.0,false\n"
                        "P001,2022-01-25T03:14:00Z,sleep_hr,61.0,false\n");
    REQUIRE(r.accepted == 1);
    CHECK(r.records.records()[0].value == 57.0);
    REQUIRE(r.rejected == 1);
    CHECK(r.rejections[0].line == 3);
    CHECK(r.rejections[0].reason.find("duplicate") != std::string::npos);
}

TEST_CASE("parse-serialize round trip is bit-exact") {
    std::string text = kHeader;
    RandomStream rng(7);
    for (int i = 0; i < 200; ++i) {
        const int offset_choice = int(rng.below(3));
        const char* suffix = offset_choice == 0 ? "Z" : (offset_choice == 1 ? "+09:00" : "-0230");
        char row[160];
        std::snprintf(row, sizeof(row), "P%03d,2022-%02d-%02dT%02d:%02d:%02d%s,%s,%s,%s\n",
                      int(rng.below(5)), int(rng.below(12) + 1), int(rng.below(28) + 1),
                      int(rng.below(24)), int(rng.below(60)), int(rng.below(60)), suffix,
                      rng.bernoulli(0.5) ? "sleep_hr" : "waking_hr",
                      format_double(40.0 + rng.uniform() * 60.0).c_str(),
                      rng.bernoulli(0.2) ? "true" : "false");
        text += row;
    }
    auto first = parse_text(text);
    const std::string canonical = serialize_records(first.records);
    auto second = parse_text(canonical);
    CHECK(second.rejected == 0);
    CHECK(second.accepted == first.accepted);
    CHECK(serialize_records(second.records) == canonical);
    CHECK(second.records.records() == first.records.records());
}

TEST_CASE("series_for filters sessions and sorts") {
    std::vector<MeasureRecord> recs;
    auto at = [](const char* s) { return *parse_instant(s); };
    recs.push_back({"P1", at("2022-01-03T10:00:00Z"), Measure::WakingHR, 80.0, false});
    recs.push_back({"P1", at("2022-01-01T10:00:00Z"), Measure::WakingHR, 70.0, false});
    recs.push_back({"P1", at("2022-01-02T10:00:00Z"), Measure::WakingHR, 120.0, true});
    RecordSet rs(std::move(recs));

    auto without = series_for(rs, "P1", Measure::WakingHR, false);
    CHECK(without.size() == 2);
    auto with = series_for(rs, "P1", Measure::WakingHR, true);
    CHECK(with.size() == 3);

    // sortedness against an independent sort of the raw timestamps
    std::vector<Instant> expected;
    for (const auto& r : rs.records()) expected.push_back(r.timestamp);
    std::sort(expected.begin(), expected.end());
    for (size_t i = 0; i < with.size(); ++i) CHECK(with.points()[i].timestamp == expected[i]);

    CHECK_THROWS_AS(series_for(rs, "P9", Measure::WakingHR), EmptySeries);
    CHECK_THROWS_AS(series_for(rs, "P1", Measure::SleepHR), EmptySeries);
}

TEST_CASE("series length + rejects + session exclusions conserve the raw count") {
    RandomStream rng(99);
    std::string text = kHeader;
    const int rows = 500;
    int bad = 0;
    for (int i = 0; i < rows; ++i) {
        const bool make_bad = rng.bernoulli(0.1);
        char row[160];
        if (make_bad) {
            ++bad;
            std::snprintf(row, sizeof(row), "P%01d,2022-%02d-%02dT%02d:%02d:%02dZ,sleep_hr,bogus,false\n",
                          int(rng.below(3)), int(rng.below(12) + 1), int(rng.below(28) + 1),
                          int(rng.below(24)), int(rng.below(60)), int(rng.below(60)));
        } else {
            std::snprintf(row, sizeof(row), "P%01d,2022-%02d-%02dT%02d:%02d:%02dZ,sleep_hr,%s,%s\n",
                          int(rng.below(3)), int(rng.below(12) + 1), int(rng.below(28) + 1),
                          int(rng.below(24)), int(rng.below(60)), int(rng.below(60)),
                          format_double(50.0 + rng.uniform() * 20.0).c_str(),
                          rng.bernoulli(0.15) ? "true" : "false");
        }
        text += row;
    }
    auto r = parse_text(text);
    CHECK(r.accepted + r.rejected == size_t(rows));
    size_t total_series = 0, total_sessions = 0;
    for (const std::string& id : r.records.participants()) {
        if (!r.records.has(id, Measure::SleepHR)) continue;
        const auto all = series_for(r.records, id, Measure::SleepHR, true);
        size_t sessions = 0;
        for (size_t k : *r.records.indices_for(id, Measure::SleepHR))
            if (r.records.records()[k].session_flag) ++sessions;
        const auto filtered = sessions < all.size()
                                  ? series_for(r.records, id, Measure::SleepHR, false).size()
                                  : 0;
        CHECK(filtered + sessions == all.size());
        total_series += filtered;
        total_sessions += sessions;
    }
    CHECK(total_series + total_sessions + r.rejected == size_t(rows));
}

TEST_CASE("weekly shares: single participant owns every week") {
    auto r = parse_text(kHeader +
                        "P1,2022-01-03T10:00:00Z,waking_hr,70,false\n"
                        "P1,2022-01-12T10:00:00Z,waking_hr,71,false\n");
    auto shares = weekly_data_share(r.records);
    REQUIRE(shares.weeks.size() == 2);
    for (const auto& w : shares.weeks) {
        CHECK(w.share.at("P1") == 1.0);
        CHECK(w.max_share == 1.0);
    }
}

TEST_CASE("weekly shares: equal counts split 0.5/0.5 and sum to one") {
    std::string text = kHeader;
    for (int i = 0; i < 4; ++i) {
        text += "PA,2022-03-0" + std::to_string(i + 1) + "T10:00:00Z,waking_hr,70,false\n";
        text += "PB,2022-03-0" + std::to_string(i + 1) + "T11:00:00Z,waking_hr,72,false\n";
    }
    auto shares = weekly_data_share(parse_text(text).records);
    for (const auto& w : shares.weeks) {
        CHECK(w.share.at("PA") == doctest::Approx(0.5));
        CHECK(w.share.at("PB") == doctest::Approx(0.5));
        double sum = 0.0;
        for (const auto& [id, s] : w.share) sum += s;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("weekly shares match a brute-force recount") {
    RandomStream rng(12345);
    std::vector<MeasureRecord> recs;
    auto base = *parse_instant("2022-01-01T00:00:00Z");
    for (int i = 0; i < 800; ++i) {
        MeasureRecord r;
        r.participant_id = "P" + std::to_string(rng.below(7));
        r.timestamp = base + std::chrono::seconds{int64_t(rng.below(200ull * 86400))};
        r.measure = Measure::WakingHR;
        r.value = 60.0 + rng.uniform() * 30.0;
        recs.push_back(r);
    }
    RecordSet rs(recs);
    auto shares = weekly_data_share(rs);

    // brute force: count records per (week, participant) directly
    std::map<std::pair<IsoWeek, std::string>, int> counts;
    std::map<IsoWeek, int> totals;
    for (const auto& r : recs) {
        const IsoWeek w = iso_week(local_date(r.timestamp));
        counts[{w, r.participant_id}] += 1;
        totals[w] += 1;
    }
    for (const auto& w : shares.weeks) {
        double sum = 0.0;
        for (const auto& [id, share] : w.share) {
            CHECK(share ==
                  doctest::Approx(double(counts[{w.week, id}]) / totals[w.week]).epsilon(1e-12));
            sum += share;
            CHECK(share >= 0.0);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("usage matrix marks availability cells") {
    auto r = parse_text(kHeader + "P1,2022-03-01T10:00:00Z,waking_hr,70,false\n");
    auto m = usage_matrix(r.records);
    size_t trues = 0;
    for (const auto& row : m.available)
        for (bool b : row) trues += b;
    CHECK(trues == 1);
    CHECK(m.dates.size() == 1);

    // 10-day gap: leading and trailing marks, 10 false cells between
    auto r2 = parse_text(kHeader +
                         "P1,2022-03-01T10:00:00Z,waking_hr,70,false\n"
                         "P1,2022-03-12T10:00:00Z,waking_hr,70,false\n");
    auto m2 = usage_matrix(r2.records);
    REQUIRE(m2.dates.size() == 12);
    CHECK(m2.cell(0, 0));
    CHECK(m2.cell(11, 0));
    for (size_t i = 1; i <= 10; ++i) CHECK_FALSE(m2.cell(i, 0));
}

TEST_CASE("merging parsed sets drops cross-file duplicates, earlier set wins") {
    auto a = parse_text(kHeader +
                        "P1,2022-01-01T00:00:00Z,sleep_hr,57,false\n"
                        "P1,2022-01-02T00:00:00Z,sleep_hr,58,false\n");
    auto b = parse_text(kHeader +
                        "P1,2022-01-02T00:00:00Z,sleep_hr,99,false\n"
                        "P2,2022-01-02T00:00:00Z,sleep_hr,61,false\n");
    size_t dropped = 0;
    RecordSet merged = merge_record_sets({a.records, b.records}, &dropped);
    CHECK(merged.size() == 3);
    CHECK(dropped == 1);
    auto s = series_for(merged, "P1", Measure::SleepHR);
    CHECK(s.points()[1].value == 58.0);  // the earlier file's record survived
}

TEST_CASE("duplicate timestamps are rejected at series construction") {
    auto t = *parse_instant("2022-01-01T00:00:00Z");
    std::vector<MeasureSeries::Point> pts = {{t, 1.0}, {t, 2.0}};
    CHECK_THROWS(MeasureSeries("P1", Measure::SleepHR, pts));
    CHECK_THROWS_AS(MeasureSeries("P1", Measure::SleepHR, {}), EmptySeries);
}

TEST_SUITE_END();
