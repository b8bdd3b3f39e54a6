#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace cohort_pulse {

/// One modeling row: a response with its grouping participant and the
/// categorical level (a period name or a week index rendered as text).
struct Observation {
    std::string participant_id;
    double response = 0.0;
    std::string level;
};

/// Reference-coded design for a single categorical fixed effect with
/// per-participant grouping. Column 0 is the intercept when present.
struct DesignMatrix {
    Eigen::VectorXd y;                        // N
    Eigen::MatrixXd X;                        // N × p
    std::vector<int> group;                   // N, values in [0, k)
    std::vector<std::string> column_names;    // p
    std::vector<std::string> group_names;     // k, sorted
    std::vector<std::string> dropped_levels;  // declared levels with no rows
    bool has_intercept = true;
    std::optional<std::string> reference_level;

    Eigen::Index n_obs() const { return y.size(); }
    Eigen::Index n_cols() const { return X.cols(); }
    int n_groups() const { return int(group_names.size()); }
};

/// Builds an intercept + dummies design. `level_order` declares the factor
/// domain and fixes column order; levels with zero rows are dropped and
/// reported. Throws EncodeError when the reference is absent from the data or
/// only one level has rows.
DesignMatrix encode_design(const std::vector<Observation>& obs,
                           const std::vector<std::string>& level_order,
                           const std::string& reference_level);

/// No-intercept variant: one indicator column per level present, no
/// reference. Used by the calendar-week model on centered responses.
DesignMatrix encode_design_no_intercept(const std::vector<Observation>& obs,
                                        const std::vector<std::string>& level_order);

}  // namespace cohort_pulse
