#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "cohort_pulse/config.hpp"
#include "cohort_pulse/csv.hpp"
#include "cohort_pulse/errors.hpp"
#include "cohort_pulse/report.hpp"
#include "cohort_pulse/simulate.hpp"

using namespace cohort_pulse;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, uint64_t seed,
            bool seed_set, bool strict) {
    RunConfig cfg = load_run_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed_set) {
        if (!cfg.simulate) {
            std::cerr << "--seed only applies to simulated input\n";
            return 2;
        }
        cfg.simulate->seed = seed;
    }
    if (strict) cfg.significance = {SignificanceMode::Strict, 0.05};

    RunResult result = run(cfg);
    if (result.exit_code != 0) {
        std::cerr << "run failed: " << result.error << "\n"
                  << "details in " << cfg.output_dir << "/error.json\n";
        return result.exit_code;
    }
    std::cout << "wrote " << result.artifacts.size() << " artifacts to " << cfg.output_dir << "\n";
    for (const std::string& a : result.artifacts) std::cout << "  " << a << "\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_csv,
                 const std::string& truth_csv, uint64_t seed, bool seed_set) {
    SimConfig cfg = load_sim_config(config_path);
    if (seed_set) cfg.seed = seed;
    SimulatedCohort cohort = generate_cohort(cfg);

    std::ofstream out(out_csv, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write '" << out_csv << "'\n";
        return 1;
    }
    serialize_records(cohort.records, out);
    std::cout << "wrote " << cohort.records.size() << " records for "
              << cohort.truth.participants.size() << " participants to " << out_csv << "\n";

    if (!truth_csv.empty()) {
        std::ofstream truth(truth_csv, std::ios::binary);
        if (!truth) {
            std::cerr << "cannot write '" << truth_csv << "'\n";
            return 1;
        }
        truth_report(cohort.truth, truth);
        std::cout << "wrote ground truth to " << truth_csv << "\n";
    }
    return 0;
}

int cmd_validate(const std::string& input_csv) {
    ParseResult parsed = parse_records_file(input_csv);
    std::cout << "accepted: " << parsed.accepted << "\n"
              << "rejected: " << parsed.rejected << "\n";
    if (!parsed.records.empty()) {
        std::cout << "participants: " << parsed.records.participants().size() << "\n"
                  << "range: " << format_instant_utc(parsed.records.min_timestamp()) << " .. "
                  << format_instant_utc(parsed.records.max_timestamp()) << "\n";
    }
    if (parsed.rejected > 0) {
        std::cout << "rejection report:\n" << rejection_report_csv(parsed.rejections);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cohort-level stress biomarker pipeline"};
    app.require_subcommand(1);

    std::string config_path, out_dir, out_csv, truth_csv, input_csv;
    uint64_t seed = 0;
    bool strict = false;

    auto* run_cmd = app.add_subcommand("run", "run the full analysis pipeline from a config");
    run_cmd->add_option("--config", config_path, "run config JSON")->required();
    run_cmd->add_option("--out", out_dir, "output directory (overrides config)");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "simulator seed override");
    run_cmd->add_flag("--strict-bonferroni", strict,
                      "flag significance by p*m < 0.05 instead of the raw 0.001 cut");

    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic cohort CSV");
    sim_cmd->add_option("--config", config_path, "simulator config JSON")->required();
    sim_cmd->add_option("--out", out_csv, "output CSV path")->required();
    sim_cmd->add_option("--truth", truth_csv, "also write the ground-truth audit CSV");
    auto* sim_seed_opt = sim_cmd->add_option("--seed", seed, "seed override");

    auto* val_cmd = app.add_subcommand("validate", "parse a CSV and report rejections");
    val_cmd->add_option("--input", input_csv, "input CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return cmd_run(config_path, out_dir, seed, seed_opt->count() > 0, strict);
        if (sim_cmd->parsed())
            return cmd_simulate(config_path, out_csv, truth_csv, seed, sim_seed_opt->count() > 0);
        if (val_cmd->parsed()) return cmd_validate(input_csv);
    } catch (const Error& e) {
        std::cerr << "[" << e.module() << "] " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
