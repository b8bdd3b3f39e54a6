#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cohort_pulse/calendar.hpp"
#include "cohort_pulse/records.hpp"
#include "cohort_pulse/skew_normal.hpp"

namespace cohort_pulse {

/// Per-measure generator hyperparameters. Participant-level true parameters
/// are drawn uniformly from these ranges.
struct MeasureSimConfig {
    Measure measure{};
    double xi_lo = 50.0, xi_hi = 60.0;
    double omega_lo = 4.0, omega_hi = 8.0;
    double alpha_lo = 2.0, alpha_hi = 6.0;
    double amplitude_lo = 0.0, amplitude_hi = 0.0;  // seasonal A range; 0 disables
    int records_per_day = 1;
    double clamp_lo = -1e300, clamp_hi = 1e300;  // keep draws inside measure invariants
};

/// Additive shift, in units of the participant's true dispersion, applied to
/// every draw of `measure` whose local date falls in the period (or folds to
/// the week).
struct PlantedEffect {
    Measure measure{};
    std::optional<PeriodLabel> period;
    std::optional<int> week;  // 1..52
    double shift_mad = 0.0;

    friend bool operator==(const PlantedEffect&, const PlantedEffect&) = default;
};

struct Tranche {
    Date join_date;
    double fraction = 1.0;  // share of the cohort joining at this date
};

struct SimConfig {
    int n_participants = 103;
    Date span_start;
    Date span_end;
    std::vector<MeasureSimConfig> measures;
    std::vector<PlantedEffect> effects;
    std::vector<Tranche> tranches;
    double daily_missing_prob = 0.15;    // whole-day gaps (ring not worn)
    double daily_dropout_hazard = 4e-4;  // geometric hazard of leaving for good
    double session_prob = 0.02;          // live-workout record per active day
    double session_shift = 25.0;         // added to session-flagged waking HR
    uint64_t seed = 42;
    UtcOffset utc_offset = kDefaultUtcOffset;

    void validate() const;  // throws ConfigError
};

/// 103 participants, 2021-07-30..2023-11-21, tranche onboarding, and
/// physiologically plausible baseline/seasonality ranges for all seven
/// measures. No planted effects.
SimConfig default_sim_config();

struct ParticipantTruth {
    struct PerMeasure {
        Measure measure{};
        SkewNormalParams baseline;
        double amplitude = 0.0;       // A
        double phase = 0.0;           // C
        double vertical_shift = 0.0;  // D: mean about which the sinusoid oscillates
        double mode = 0.0;            // argmax of the true density
        double mad = 0.0;             // model-implied mean |x - mode|

        friend bool operator==(const PerMeasure&, const PerMeasure&) = default;
    };
    std::string participant_id;
    Date join_date;
    Date leave_date;
    std::vector<PerMeasure> measures;

    friend bool operator==(const ParticipantTruth&, const ParticipantTruth&) = default;
};

struct GroundTruth {
    std::vector<ParticipantTruth> participants;
    std::vector<PlantedEffect> effects;

    const ParticipantTruth::PerMeasure* find(const std::string& participant_id, Measure m) const;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct SimulatedCohort {
    RecordSet records;
    GroundTruth truth;
};

/// Draws the cohort. Bit-identical output for identical configs; per
/// participant/measure substreams keep subsets reproducible.
SimulatedCohort generate_cohort(const SimConfig& cfg, const PeriodCalendar& calendar);
SimulatedCohort generate_cohort(const SimConfig& cfg);

/// Audit file with every true parameter and planted effect.
void truth_report(const GroundTruth& gt, std::ostream& out);
std::string truth_report(const GroundTruth& gt);
GroundTruth parse_truth_report(std::istream& in);

}  // namespace cohort_pulse
