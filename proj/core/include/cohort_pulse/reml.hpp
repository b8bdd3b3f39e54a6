#pragma once

#include <string>
#include <vector>

#include "cohort_pulse/design.hpp"

namespace cohort_pulse {

/// Fitted random-intercept mixed model.
struct LmmFit {
    Eigen::VectorXd beta;          // fixed-effect estimates, one per design column
    Eigen::VectorXd se;            // Wald standard errors
    Eigen::VectorXd p_values;      // two-sided normal p per coefficient
    double sigma2_gamma = 0.0;     // random-intercept variance
    double sigma2_eps = 0.0;       // residual variance
    double theta = 0.0;            // variance ratio σ²_γ / σ²_ε
    double r2_marginal = 0.0;
    double r2_conditional = 0.0;
    double reml_loglik = 0.0;
    Eigen::Index n_obs = 0;
    int n_groups = 0;
    size_t bonferroni_m = 0;       // non-reference comparison count
    std::vector<std::string> column_names;
    bool theta_at_boundary = false;  // θ̂ = 0: model degenerated to OLS
};

struct RemlOptions {
    /// Search window for log θ.
    double log_theta_min = -14.0;
    double log_theta_max = 14.0;
    int grid_points = 49;
    /// Relative tolerance on θ for the bracketed refinement.
    double theta_rel_tol = 1e-8;
    /// Force θ = 0 (pure fixed-effects GLS = OLS); used for degeneracy checks.
    bool fix_theta_zero = false;
};

/// Restricted-maximum-likelihood fit. β and σ²_ε are profiled analytically;
/// the variance ratio θ is found by bracketed scalar minimization on a log
/// grid. θ̂ = 0 is a legal boundary solution and reduces to ordinary least
/// squares. Throws RankDeficient for singular designs and OptimFailed when
/// the criterion is not finite anywhere.
LmmFit fit_reml(const DesignMatrix& d, const RemlOptions& opts = {});

/// The profiled REML criterion (-2·restricted log-likelihood, up to the
/// additive constant) at a given variance ratio. Exposed for optimizer
/// sanity checks.
double reml_criterion(const DesignMatrix& d, double theta);

}  // namespace cohort_pulse
