#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>

#include "cohort_pulse/errors.hpp"
#include "cohort_pulse/inference.hpp"
#include "cohort_pulse/reml.hpp"
#include "cohort_pulse/rng.hpp"

using namespace cohort_pulse;

namespace {

std::vector<std::string> periods9() {
    return {"spring_exam",  "spring_pre_exam", "spring_break", "golden_week", "summer_exam",
            "summer_pre_exam", "summer_break", "new_year",     "semester"};
}

// Balanced one-way layout: k groups of size n, y = mu + gamma_g + eps.
std::vector<Observation> balanced_oneway(int k, int n, double mu, double sg, double se,
                                         uint64_t seed) {
    RandomStream rng(seed);
    std::vector<Observation> obs;
    for (int g = 0; g < k; ++g) {
        const double gamma = sg * rng.normal();
        for (int i = 0; i < n; ++i)
            obs.push_back({"G" + std::to_string(g), mu + gamma + se * rng.normal(), "semester"});
    }
    // a second level so the design encodes (two balanced halves)
    return obs;
}

// ANOVA closed-form REML estimators for the balanced one-way random model.
struct AnovaEstimates {
    double grand_mean, sigma2_eps, sigma2_gamma;
};

AnovaEstimates anova_oracle(const std::vector<Observation>& obs, int k, int n) {
    std::vector<double> group_mean(size_t(k), 0.0);
    double grand = 0.0;
    for (int g = 0; g < k; ++g) {
        for (int i = 0; i < n; ++i) group_mean[size_t(g)] += obs[size_t(g * n + i)].response;
        group_mean[size_t(g)] /= double(n);
        grand += group_mean[size_t(g)];
    }
    grand /= double(k);
    double ssb = 0.0, ssw = 0.0;
    for (int g = 0; g < k; ++g) {
        ssb += (group_mean[size_t(g)] - grand) * (group_mean[size_t(g)] - grand);
        for (int i = 0; i < n; ++i) {
            const double d = obs[size_t(g * n + i)].response - group_mean[size_t(g)];
            ssw += d * d;
        }
    }
    const double msb = double(n) * ssb / double(k - 1);
    const double mse = ssw / double(k * (n - 1));
    return {grand, mse, (msb - mse) / double(n)};
}

// Intercept-only design over one factor level (needs no encode_design).
DesignMatrix intercept_only(const std::vector<Observation>& obs) {
    DesignMatrix d;
    const Eigen::Index N = Eigen::Index(obs.size());
    d.y.resize(N);
    d.X = Eigen::MatrixXd::Ones(N, 1);
    d.group.resize(obs.size());
    d.column_names = {"intercept"};
    d.has_intercept = true;
    std::map<std::string, int> gid;
    for (Eigen::Index i = 0; i < N; ++i) {
        d.y[i] = obs[size_t(i)].response;
        auto [it, fresh] = gid.emplace(obs[size_t(i)].participant_id, int(gid.size()));
        d.group[size_t(i)] = it->second;
    }
    d.group_names.resize(gid.size());
    for (auto& [name, id] : gid) d.group_names[size_t(id)] = name;
    return d;
}

// Direct least squares through Eigen's QR: the independent OLS oracle.
Eigen::VectorXd ols_oracle(const DesignMatrix& d) {
    return d.X.colPivHouseholderQr().solve(d.y);
}

std::vector<Observation> random_design(RandomStream& rng, int n_obs, int n_levels, int n_groups,
                                       bool null_groups) {
    std::vector<Observation> obs;
    std::vector<double> level_effect(static_cast<size_t>(n_levels), 0.0);
    for (double& e : level_effect) e = rng.normal();
    std::vector<double> group_effect(static_cast<size_t>(n_groups), 0.0);
    if (!null_groups)
        for (double& e : group_effect) e = 0.7 * rng.normal();
    for (int i = 0; i < n_obs; ++i) {
        const int lvl = int(rng.below(uint64_t(n_levels)));
        const int grp = int(rng.below(uint64_t(n_groups)));
        obs.push_back({"G" + std::to_string(grp),
                       1.5 + level_effect[size_t(lvl)] + group_effect[size_t(grp)] + rng.normal(),
                       "L" + std::to_string(lvl)});
    }
    return obs;
}

std::vector<std::string> levels(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("L" + std::to_string(i));
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("lmm");

TEST_CASE("encoding: two levels give intercept plus one dummy") {
    std::vector<Observation> obs = {{"P1", 1.0, "semester"},
                                    {"P1", 2.0, "spring_exam"},
                                    {"P2", 3.0, "semester"}};
    auto d = encode_design(obs, periods9(), "semester");
    CHECK(d.n_cols() == 2);
    CHECK(d.column_names[0] == "intercept(semester)");
    CHECK(d.column_names[1] == "spring_exam");
    CHECK(d.dropped_levels.size() == 7);
}

TEST_CASE("encoding: nine populated levels give nine columns") {
    std::vector<Observation> obs;
    RandomStream rng(3);
    for (const std::string& lvl : periods9())
        for (int i = 0; i < 5; ++i)
            obs.push_back({"P" + std::to_string(i % 3), rng.normal(), lvl});
    auto d = encode_design(obs, periods9(), "semester");
    CHECK(d.n_cols() == 9);  // intercept + 8 slopes
    CHECK(d.dropped_levels.empty());
    CHECK(d.n_groups() == 3);
}

TEST_CASE("encoding errors: missing reference, single level, unknown level") {
    std::vector<Observation> no_ref = {{"P1", 1.0, "spring_exam"}, {"P1", 2.0, "summer_exam"}};
    CHECK_THROWS_AS(encode_design(no_ref, periods9(), "semester"), EncodeError);

    std::vector<Observation> single = {{"P1", 1.0, "semester"}, {"P2", 2.0, "semester"}};
    CHECK_THROWS_AS(encode_design(single, periods9(), "semester"), EncodeError);

    std::vector<Observation> alien = {{"P1", 1.0, "holiday"}, {"P1", 2.0, "semester"}};
    CHECK_THROWS_AS(encode_design(alien, periods9(), "semester"), EncodeError);
}

TEST_CASE("permuting observations leaves the fit unchanged") {
    RandomStream rng(41);
    auto obs = random_design(rng, 400, 4, 12, false);
    auto d1 = encode_design(obs, levels(4), "L0");
    auto fit1 = fit_reml(d1);

    // deterministic shuffle
    std::vector<Observation> shuffled = obs;
    for (size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    auto fit2 = fit_reml(encode_design(shuffled, levels(4), "L0"));

    for (Eigen::Index j = 0; j < fit1.beta.size(); ++j) {
        CHECK(fit1.beta[j] == doctest::Approx(fit2.beta[j]).epsilon(1e-9));
        CHECK(fit1.se[j] == doctest::Approx(fit2.se[j]).epsilon(1e-9));
    }
    CHECK(fit1.sigma2_gamma == doctest::Approx(fit2.sigma2_gamma).epsilon(1e-8));
}

TEST_CASE("balanced one-way REML equals the ANOVA closed form") {
    for (uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        const int k = 20, n = 10;
        auto obs = balanced_oneway(k, n, 50.0, 1.0, 0.5, seed);
        auto oracle = anova_oracle(obs, k, n);
        auto fit = fit_reml(intercept_only(obs));
        REQUIRE(oracle.sigma2_gamma > 0.0);
        CHECK(fit.beta[0] == doctest::Approx(oracle.grand_mean).epsilon(1e-10));
        CHECK(fit.sigma2_eps == doctest::Approx(oracle.sigma2_eps).epsilon(1e-7));
        CHECK(fit.sigma2_gamma == doctest::Approx(oracle.sigma2_gamma).epsilon(1e-7));
    }
}

TEST_CASE("one group degenerates to ordinary least squares") {
    RandomStream rng(7);
    std::vector<Observation> obs;
    for (int i = 0; i < 80; ++i)
        obs.push_back({"ONLY", rng.normal() + (i % 2 ? 1.0 : 0.0), i % 2 ? "L1" : "L0"});
    auto d = encode_design(obs, levels(2), "L0");
    auto fit = fit_reml(d);
    auto ols = ols_oracle(d);
    CHECK(fit.theta_at_boundary);
    for (Eigen::Index j = 0; j < ols.size(); ++j)
        CHECK(std::fabs(fit.beta[j] - ols[j]) <= 1e-9);
}

TEST_CASE("group-mean-equalized balanced data drives theta to zero and OLS") {
    // Every group sees every level equally often, so equalizing raw group
    // means also zeroes the residual between-group variance; the REML
    // optimum then sits exactly on the boundary.
    RandomStream rng(15);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<Observation> obs;
        const int n_groups = 6, n_levels = 3, reps = 8;
        for (int g = 0; g < n_groups; ++g)
            for (int lvl = 0; lvl < n_levels; ++lvl)
                for (int i = 0; i < reps; ++i)
                    obs.push_back({"G" + std::to_string(g), 0.8 * lvl + rng.normal(),
                                   "L" + std::to_string(lvl)});
        std::map<std::string, std::pair<double, int>> sums;
        double grand = 0.0;
        for (const auto& o : obs) {
            sums[o.participant_id].first += o.response;
            sums[o.participant_id].second += 1;
            grand += o.response;
        }
        grand /= double(obs.size());
        for (auto& o : obs) {
            auto [s, c] = sums[o.participant_id];
            o.response += grand - s / double(c);
        }
        auto d = encode_design(obs, levels(3), "L0");
        auto fit = fit_reml(d);
        CHECK(fit.theta_at_boundary);
        CHECK(fit.sigma2_gamma == 0.0);
        auto ols = ols_oracle(d);
        for (Eigen::Index j = 0; j < ols.size(); ++j)
            CHECK(std::fabs(fit.beta[j] - ols[j]) <= 1e-9);
    }
}

TEST_CASE("forcing sigma2_gamma to zero reproduces OLS on random instances") {
    RandomStream rng(99);
    RemlOptions opts;
    opts.fix_theta_zero = true;
    for (int rep = 0; rep < 12; ++rep) {
        auto obs = random_design(rng, int(40 + rng.below(160)), 3, 5, false);
        auto d = encode_design(obs, levels(3), "L0");
        auto fit = fit_reml(d, opts);
        auto ols = ols_oracle(d);
        for (Eigen::Index j = 0; j < ols.size(); ++j)
            CHECK(std::fabs(fit.beta[j] - ols[j]) <= 1e-9);
    }
}

TEST_CASE("rank-deficient design is rejected") {
    // duplicate a level's rows into two identical columns via a custom matrix
    DesignMatrix d;
    d.y = Eigen::VectorXd::Random(30);
    d.X = Eigen::MatrixXd::Zero(30, 3);
    for (int i = 0; i < 30; ++i) {
        d.X(i, 0) = 1.0;
        d.X(i, 1) = i % 2;
        d.X(i, 2) = i % 2;  // collinear with column 1
    }
    d.group.assign(30, 0);
    for (int i = 0; i < 30; ++i) d.group[size_t(i)] = i % 3;
    d.group_names = {"A", "B", "C"};
    d.column_names = {"intercept", "c1", "c2"};
    CHECK_THROWS_AS(fit_reml(d), RankDeficient);
}

TEST_CASE("wald rows: zero estimate and the 1.96 quantile") {
    LmmFit fit;
    fit.beta = Eigen::VectorXd(2);
    fit.se = Eigen::VectorXd(2);
    fit.p_values = Eigen::VectorXd(2);
    fit.beta << 0.0, 1.96;
    fit.se << 1.0, 1.0;
    fit.column_names = {"a", "b"};
    auto rows = wald_inference(fit);
    CHECK(rows[0].p == doctest::Approx(1.0));
    CHECK(std::fabs(rows[1].p - 0.05) <= 1e-3);
    CHECK(rows[1].z == doctest::Approx(1.96));
}

TEST_CASE("non-estimable coefficients are flagged, p omitted") {
    LmmFit fit;
    fit.beta = Eigen::VectorXd::Constant(1, 2.0);
    fit.se = Eigen::VectorXd::Zero(1);
    fit.p_values = Eigen::VectorXd::Zero(1);
    fit.column_names = {"dead"};
    auto rows = wald_inference(fit);
    CHECK_FALSE(rows[0].estimable);
    CHECK(std::isnan(rows[0].p));
}

TEST_CASE("bonferroni flag rules in both modes") {
    SignificancePolicy thr{SignificanceMode::Threshold, 0.001};
    SignificancePolicy strict{SignificanceMode::Strict, 0.05};
    CHECK_FALSE(bonferroni_flag(1.0, 8, thr));
    CHECK_FALSE(bonferroni_flag(1.0, 8, strict));
    CHECK(bonferroni_flag(5e-4, 8, thr));       // below the 0.001 cut
    CHECK_FALSE(bonferroni_flag(2e-3, 8, thr));
    CHECK(bonferroni_flag(0.004, 8, strict));   // 0.032 < 0.05
    CHECK_FALSE(bonferroni_flag(0.008, 8, strict));
}

TEST_CASE("strict-mode family-wise error stays at alpha under a global null") {
    int families_with_flag = 0;
    const int seeds = 200;
    SignificancePolicy strict{SignificanceMode::Strict, 0.05};
    for (int s = 0; s < seeds; ++s) {
        RandomStream rng(1000 + uint64_t(s));
        // balanced null: 9 levels x 20 groups, random intercepts present
        std::vector<Observation> obs;
        std::vector<double> gamma(20);
        for (double& g : gamma) g = 0.5 * rng.normal();
        for (int lvl = 0; lvl < 9; ++lvl)
            for (int g = 0; g < 20; ++g)
                for (int i = 0; i < 4; ++i)
                    obs.push_back({"G" + std::to_string(g), gamma[size_t(g)] + rng.normal(),
                                   "L" + std::to_string(lvl)});
        auto fit = fit_reml(encode_design(obs, levels(9), "L0"));
        std::vector<double> ps(fit.p_values.data(), fit.p_values.data() + fit.p_values.size());
        ps.erase(ps.begin());  // drop the intercept row: comparisons only
        auto flags = bonferroni_flags(ps, fit.bonferroni_m, strict);
        bool any = false;
        for (bool f : flags) any |= f;
        families_with_flag += any;
    }
    CHECK(double(families_with_flag) / double(seeds) <= 0.05);
}

TEST_CASE("r2: intercept-only gives exactly zero marginal") {
    auto obs = balanced_oneway(10, 8, 3.0, 1.0, 0.4, 7);
    auto d = intercept_only(obs);
    auto fit = fit_reml(d);
    auto [r2m, r2c] = r2_nakagawa(fit, d);
    CHECK(r2m == 0.0);
    CHECK(fit.r2_marginal == 0.0);
    CHECK(r2c > 0.0);
    CHECK(r2m <= r2c);
    CHECK(r2c <= 1.0);
}

TEST_CASE("r2 matches direct evaluation of the variance shares") {
    RandomStream rng(55);
    auto obs = random_design(rng, 600, 5, 15, false);
    auto d = encode_design(obs, levels(5), "L0");
    auto fit = fit_reml(d);

    Eigen::VectorXd fitted = d.X * fit.beta;
    const double mean = fitted.mean();
    double var_fixed = 0.0;
    for (Eigen::Index i = 0; i < fitted.size(); ++i)
        var_fixed += (fitted[i] - mean) * (fitted[i] - mean);
    var_fixed /= double(fitted.size());
    const double denom = var_fixed + fit.sigma2_gamma + fit.sigma2_eps;
    CHECK(fit.r2_marginal == doctest::Approx(var_fixed / denom).epsilon(1e-9));
    CHECK(fit.r2_conditional ==
          doctest::Approx((var_fixed + fit.sigma2_gamma) / denom).epsilon(1e-9));
    CHECK(fit.r2_marginal <= fit.r2_conditional);
}

TEST_CASE("criterion at the returned theta beats a thousand-point grid") {
    RandomStream rng(21);
    auto obs = random_design(rng, 500, 4, 18, false);
    auto d = encode_design(obs, levels(4), "L0");
    auto fit = fit_reml(d);
    const double at_hat = reml_criterion(d, fit.theta);
    for (int i = 0; i < 1000; ++i) {
        const double log_theta = -14.0 + 28.0 * double(i) / 999.0;
        CHECK(at_hat <= reml_criterion(d, std::exp(log_theta)) + 1e-7);
    }
    CHECK(at_hat <= reml_criterion(d, 0.0) + 1e-7);
}

TEST_CASE("adding a constant shifts only the intercept") {
    RandomStream rng(61);
    auto obs = random_design(rng, 400, 4, 10, false);
    auto d1 = encode_design(obs, levels(4), "L0");
    auto fit1 = fit_reml(d1);
    for (auto& o : obs) o.response += 17.25;
    auto fit2 = fit_reml(encode_design(obs, levels(4), "L0"));
    CHECK(fit2.beta[0] == doctest::Approx(fit1.beta[0] + 17.25).epsilon(1e-9));
    for (Eigen::Index j = 1; j < fit1.beta.size(); ++j)
        CHECK(std::fabs(fit2.beta[j] - fit1.beta[j]) <= 1e-9);
}

TEST_CASE("scaling responses scales estimates and leaves p-values alone") {
    RandomStream rng(62);
    auto obs = random_design(rng, 400, 4, 10, false);
    auto fit1 = fit_reml(encode_design(obs, levels(4), "L0"));
    const double s = 3.75;
    for (auto& o : obs) o.response *= s;
    auto fit2 = fit_reml(encode_design(obs, levels(4), "L0"));
    for (Eigen::Index j = 0; j < fit1.beta.size(); ++j) {
        CHECK(fit2.beta[j] == doctest::Approx(s * fit1.beta[j]).epsilon(1e-7));
        CHECK(fit2.se[j] == doctest::Approx(s * fit1.se[j]).epsilon(1e-7));
        CHECK(std::fabs(fit2.p_values[j] - fit1.p_values[j]) <= 1e-9);
    }
    CHECK(std::sqrt(fit2.sigma2_eps) == doctest::Approx(s * std::sqrt(fit1.sigma2_eps)).epsilon(1e-7));
    CHECK(std::sqrt(fit2.sigma2_gamma) ==
          doctest::Approx(s * std::sqrt(fit1.sigma2_gamma)).epsilon(1e-6));
}

TEST_CASE("calweek: flat response at the semester median gives null coefficients") {
    RandomStream rng(70);
    std::vector<Observation> obs;
    for (int w = 1; w <= 52; ++w)
        for (int g = 0; g < 8; ++g)
            for (int i = 0; i < 3; ++i)
                obs.push_back({"G" + std::to_string(g), 4.2 + 0.3 * rng.normal(), week_level(w)});
    auto cw = calweek_model(obs, 4.2);
    REQUIRE(cw.weeks.size() == 52);
    for (const auto& w : cw.weeks) CHECK(std::fabs(w.estimate) < 3.0 * w.se);
}

TEST_CASE("calweek: planted bump in weeks 29-31 is recovered and flagged") {
    RandomStream rng(71);
    std::vector<Observation> obs;
    for (int w = 1; w <= 52; ++w) {
        const double bump = (w >= 29 && w <= 31) ? 1.0 : 0.0;
        for (int g = 0; g < 10; ++g)
            for (int i = 0; i < 6; ++i)
                obs.push_back(
                    {"G" + std::to_string(g), 2.0 + bump + 0.4 * rng.normal(), week_level(w)});
    }
    auto cw = calweek_model(obs, 2.0);
    REQUIRE(cw.weeks.size() == 52);
    for (const auto& w : cw.weeks) {
        if (w.week >= 29 && w.week <= 31) {
            CHECK(w.estimate == doctest::Approx(1.0).epsilon(0.15));
            CHECK(w.p_below_005);
            CHECK(w.p_below_010);  // tiers nest
        }
    }
    // marker tiers follow the p thresholds exactly
    for (const auto& w : cw.weeks) {
        CHECK(w.p_below_010 == (w.p < 0.1));
        CHECK(w.p_below_005 == (w.p < 0.05));
    }
}

TEST_CASE("calweek: missing weeks are dropped and reported") {
    RandomStream rng(72);
    std::vector<Observation> obs;
    for (int w = 1; w <= 20; ++w)
        for (int g = 0; g < 5; ++g)
            obs.push_back({"G" + std::to_string(g), rng.normal(), week_level(w)});
    auto cw = calweek_model(obs, 0.0);
    CHECK(cw.weeks.size() == 20);
    CHECK(cw.dropped_weeks.size() == 32);
}

TEST_SUITE_END();
