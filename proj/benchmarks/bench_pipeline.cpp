#include <benchmark/benchmark.h>

#include <sstream>

#include "cohort_pulse/baseline.hpp"
#include "cohort_pulse/csv.hpp"
#include "cohort_pulse/design.hpp"
#include "cohort_pulse/reml.hpp"
#include "cohort_pulse/rng.hpp"
#include "cohort_pulse/sinusoid.hpp"
#include "cohort_pulse/skew_normal.hpp"

using namespace cohort_pulse;

namespace {

MeasureSeries make_series(size_t n, uint64_t seed) {
    RandomStream rng(seed);
    std::vector<MeasureSeries::Point> pts;
    Instant t = *parse_instant("2021-07-30T00:00:00Z");
    for (size_t i = 0; i < n; ++i) {
        t += std::chrono::seconds{86400 / 2};  // two points a day keeps the span > a year
        const double day = double(i) / 2.0;
        pts.push_back({t, 56.0 + 2.0 * std::sin(kAnnualAngularFrequency * day * 86400.0 + 0.7) +
                              rng.skew_normal(0.0, 4.0, 4.0)});
    }
    return MeasureSeries("P1", Measure::SleepHR, std::move(pts));
}

DesignMatrix make_design(Eigen::Index n, int levels, int groups, uint64_t seed) {
    RandomStream rng(seed);
    std::vector<Observation> obs;
    std::vector<std::string> domain;
    for (int l = 0; l < levels; ++l) domain.push_back("L" + std::to_string(l));
    for (Eigen::Index i = 0; i < n; ++i) {
        obs.push_back({"G" + std::to_string(rng.below(uint64_t(groups))),
                       rng.normal() + 0.3 * double(rng.below(uint64_t(levels))),
                       domain[size_t(rng.below(uint64_t(levels)))]});
    }
    return encode_design(obs, domain, "L0");
}

void BM_FitSinusoid(benchmark::State& state) {
    auto series = make_series(size_t(state.range(0)), 1);
    for (auto _ : state) {
        auto fit = fit_sinusoid(series);
        benchmark::DoNotOptimize(fit.amplitude);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitSinusoid)->Range(1024, 8192)->Complexity()->Unit(benchmark::kMillisecond);

void BM_SkewNormalMle(benchmark::State& state) {
    RandomStream rng(2);
    std::vector<double> xs(size_t(state.range(0)));
    for (double& x : xs) x = rng.skew_normal(55.0, 6.0, 5.0);
    for (auto _ : state) {
        auto fit = skew_normal_fit_mle(xs);
        benchmark::DoNotOptimize(fit.params.alpha);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SkewNormalMle)->Range(512, 8192)->Complexity()->Unit(benchmark::kMillisecond);

void BM_RemlFit(benchmark::State& state) {
    auto d = make_design(state.range(0), 9, 100, 3);
    for (auto _ : state) {
        auto fit = fit_reml(d);
        benchmark::DoNotOptimize(fit.sigma2_gamma);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RemlFit)->Range(4096, 262144)->Complexity()->Unit(benchmark::kMillisecond);

void BM_ParseRecords(benchmark::State& state) {
    std::ostringstream text;
    text << kRecordCsvHeader << '\n';
    RandomStream rng(4);
    for (int i = 0; i < state.range(0); ++i) {
        text << 'P' << rng.below(100) << ",2022-" << (1 + i % 12 < 10 ? "0" : "")
             << (1 + i % 12) << "-0" << (1 + i % 9) << "T0" << (i % 10) << ":1"
             << (i % 10) << ":00Z,sleep_hr," << format_double(50.0 + rng.uniform() * 20.0)
             << ",false\n";
    }
    const std::string blob = text.str();
    for (auto _ : state) {
        std::istringstream in(blob);
        auto parsed = parse_records(in);
        benchmark::DoNotOptimize(parsed.accepted);
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(blob.size()));
}
BENCHMARK(BM_ParseRecords)->Range(1024, 65536);

void BM_SkewNormalMode(benchmark::State& state) {
    SkewNormalParams p{55.0, 6.0, 5.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(skew_normal_mode(p));
    }
}
BENCHMARK(BM_SkewNormalMode);

}  // namespace

BENCHMARK_MAIN();
