#include "cohort_pulse/reml.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cohort_pulse/errors.hpp"
#include "cohort_pulse/numeric.hpp"

namespace cohort_pulse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093453;

// Sufficient statistics for the block-compressed GLS algebra. With
// V(θ) = I + θ·ZZᵀ and per-group inverse Vᵢ⁻¹ = I − cᵢJ, cᵢ = θ/(1+θnᵢ),
// everything the criterion needs reduces to XᵀX, Xᵀy, yᵀy and per-group
// column sums.
struct Sums {
    Eigen::MatrixXd xtx;             // p×p
    Eigen::VectorXd xty;             // p
    double yty = 0.0;
    Eigen::MatrixXd group_x_sums;    // p×k, column i = Σ rows of X in group i
    Eigen::VectorXd group_y_sums;    // k
    Eigen::VectorXd group_sizes;     // k
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    int k = 0;
};

Sums accumulate(const DesignMatrix& d) {
    Sums s;
    s.n = d.n_obs();
    s.p = d.n_cols();
    s.k = d.n_groups();
    s.xtx = d.X.transpose() * d.X;
    s.xty = d.X.transpose() * d.y;
    s.yty = d.y.squaredNorm();
    s.group_x_sums = Eigen::MatrixXd::Zero(s.p, s.k);
    s.group_y_sums = Eigen::VectorXd::Zero(s.k);
    s.group_sizes = Eigen::VectorXd::Zero(s.k);
    for (Eigen::Index i = 0; i < s.n; ++i) {
        const int g = d.group[size_t(i)];
        s.group_x_sums.col(g) += d.X.row(i).transpose();
        s.group_y_sums[g] += d.y[i];
        s.group_sizes[g] += 1.0;
    }
    return s;
}

struct Profile {
    double criterion = kInf;  // (N−p)·log σ̂² + log|V| + log|XᵀV⁻¹X|
    double sigma2 = 0.0;      // profiled residual variance
    double rss = 0.0;         // rᵀV⁻¹r at the GLS solution
    Eigen::VectorXd beta;
    Eigen::LDLT<Eigen::MatrixXd> gram;  // factorization of XᵀV⁻¹X
    bool ok = false;
};

Profile profile_at(const Sums& s, double theta) {
    Profile out;
    Eigen::MatrixXd m = s.xtx;
    Eigen::VectorXd b = s.xty;
    double q = s.yty;
    double log_det_v = 0.0;
    for (int i = 0; i < s.k; ++i) {
        const double ni = s.group_sizes[i];
        const double ci = theta / (1.0 + theta * ni);
        if (ci != 0.0) {
            m.noalias() -= ci * s.group_x_sums.col(i) * s.group_x_sums.col(i).transpose();
            b.noalias() -= ci * s.group_y_sums[i] * s.group_x_sums.col(i);
            q -= ci * s.group_y_sums[i] * s.group_y_sums[i];
        }
        log_det_v += std::log1p(theta * ni);
    }

    out.gram.compute(m);
    if (out.gram.info() != Eigen::Success) return out;
    const Eigen::VectorXd diag = out.gram.vectorD();
    double log_det_m = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (!(diag[i] > 0.0)) return out;  // not SPD: rank-deficient at this θ
        log_det_m += std::log(diag[i]);
    }

    out.beta = out.gram.solve(b);
    out.rss = q - out.beta.dot(b);
    const double dof = double(s.n - s.p);
    if (!(out.rss > 0.0) || dof <= 0.0) return out;
    out.sigma2 = out.rss / dof;
    out.criterion = dof * std::log(out.sigma2) + log_det_v + log_det_m;
    out.ok = std::isfinite(out.criterion);
    return out;
}

// Exact derivative of the profiled criterion in θ. By the envelope theorem
// the β̂(θ) dependence drops out of d(rss)/dθ, leaving per-group closed
// forms; this lets the optimum be located as a derivative root instead of by
// value comparison, which stalls at the f-noise floor.
double criterion_slope(const Sums& s, double theta, const Profile& prof) {
    double d_log_det_v = 0.0;
    double d_rss = 0.0;
    double d_log_det_m = 0.0;
    for (int i = 0; i < s.k; ++i) {
        const double ni = s.group_sizes[i];
        const double w = 1.0 / (1.0 + theta * ni);  // dcᵢ/dθ = w²
        d_log_det_v += ni * w;
        const double group_residual_sum = s.group_y_sums[i] - s.group_x_sums.col(i).dot(prof.beta);
        d_rss -= w * w * group_residual_sum * group_residual_sum;
        d_log_det_m -= w * w * s.group_x_sums.col(i).dot(prof.gram.solve(s.group_x_sums.col(i)));
    }
    const double dof = double(s.n - s.p);
    return dof * d_rss / prof.rss + d_log_det_v + d_log_det_m;
}

double criterion_slope(const Sums& s, double theta) {
    const Profile prof = profile_at(s, theta);
    if (!prof.ok) return kInf;
    return criterion_slope(s, theta, prof);
}

}  // namespace

double reml_criterion(const DesignMatrix& d, double theta) {
    return profile_at(accumulate(d), theta).criterion;
}

LmmFit fit_reml(const DesignMatrix& d, const RemlOptions& opts) {
    const Eigen::Index n = d.n_obs();
    const Eigen::Index p = d.n_cols();
    if (n <= p + 1)
        throw OptimFailed("mixed model needs N > p + 1 (" + std::to_string(n) + " rows, " +
                          std::to_string(p) + " columns)");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.X);
    if (qr.rank() < p)
        throw RankDeficient("design matrix has rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(p) + " columns");

    const Sums sums = accumulate(d);

    const Profile at_zero = profile_at(sums, 0.0);
    if (!at_zero.ok)
        throw OptimFailed("REML criterion is not finite at θ = 0 (degenerate response?)");

    double theta_hat = 0.0;
    Profile best = at_zero;

    if (!opts.fix_theta_zero && sums.k >= 2) {
        auto crit = [&](double log_theta) { return profile_at(sums, std::exp(log_theta)).criterion; };
        const double slope_at_zero = criterion_slope(sums, 0.0, at_zero);

        double lo = opts.log_theta_min;
        double hi = opts.log_theta_max;
        const int grid = std::max(opts.grid_points, 5);
        double best_psi = lo;
        double best_val = kInf;
        int best_j = 0;
        auto scan = [&]() {
            for (int j = 0; j < grid; ++j) {
                const double psi = lo + (hi - lo) * double(j) / double(grid - 1);
                const double v = crit(psi);
                if (v < best_val) {
                    best_val = v;
                    best_psi = psi;
                    best_j = j;
                }
            }
        };
        scan();
        // extend upward if the minimum sits on the top edge
        while (best_j == grid - 1 && hi < 40.0) {
            lo = hi;
            hi = std::min(hi + 14.0, 40.0);
            best_j = 0;
            scan();
            if (best_j == 0) break;  // previous edge was the true minimum region
        }

        // Only leave the θ = 0 boundary for a genuine descent: either the
        // criterion slopes downward at zero, or a grid point beats the
        // boundary by more than evaluation noise.
        const double noise = 1e-7 * (1.0 + std::fabs(at_zero.criterion));
        if (slope_at_zero < 0.0 || best_val < at_zero.criterion - noise) {
            const double step = (hi - lo) / double(grid - 1);
            double bracket_lo = best_psi - step;
            double bracket_hi = best_psi + step;

            // The slope changes sign across the bracket when the minimum is
            // interior; bisecting it reaches machine precision where a value
            // search would stall at the f-noise floor.
            double refined_psi;
            if (criterion_slope(sums, std::exp(bracket_lo)) < 0.0 &&
                criterion_slope(sums, std::exp(bracket_hi)) > 0.0) {
                for (int iter = 0; iter < 100 && bracket_hi - bracket_lo > 1e-13; ++iter) {
                    const double mid = 0.5 * (bracket_lo + bracket_hi);
                    if (criterion_slope(sums, std::exp(mid)) < 0.0)
                        bracket_lo = mid;
                    else
                        bracket_hi = mid;
                }
                refined_psi = 0.5 * (bracket_lo + bracket_hi);
            } else {
                refined_psi =
                    numeric::brent_minimize(crit, bracket_lo, bracket_hi, opts.theta_rel_tol).x;
            }

            const Profile refined = profile_at(sums, std::exp(refined_psi));
            if (refined.ok && refined.criterion <= at_zero.criterion) {
                theta_hat = std::exp(refined_psi);
                best = refined;
            }
        }
    }

    LmmFit fit;
    fit.theta = theta_hat;
    fit.theta_at_boundary = theta_hat == 0.0;
    fit.beta = best.beta;
    fit.sigma2_eps = best.sigma2;
    fit.sigma2_gamma = theta_hat * best.sigma2;
    fit.n_obs = n;
    fit.n_groups = sums.k;
    fit.column_names = d.column_names;
    fit.bonferroni_m = size_t(p) - (d.has_intercept ? 1 : 0);

    const Eigen::MatrixXd cov =
        best.sigma2 * best.gram.solve(Eigen::MatrixXd::Identity(p, p));
    fit.se.resize(p);
    fit.p_values.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        fit.se[j] = std::sqrt(std::max(0.0, cov(j, j)));
        fit.p_values[j] =
            fit.se[j] > 0.0 ? numeric::two_sided_normal_p(fit.beta[j] / fit.se[j])
                            : std::numeric_limits<double>::quiet_NaN();
    }

    // Fixed-effect explained variance over observations (1/N normalization).
    // Constant fitted values (intercept-only) give exactly zero.
    const Eigen::VectorXd fitted = d.X * fit.beta;
    const double var_fixed =
        fitted.maxCoeff() == fitted.minCoeff()
            ? 0.0
            : (fitted.array() - fitted.mean()).square().sum() / double(n);
    const double denom = var_fixed + fit.sigma2_gamma + fit.sigma2_eps;
    if (denom <= 0.0) throw OptimFailed("total variance is zero; R² undefined");
    fit.r2_marginal = var_fixed / denom;
    fit.r2_conditional = (var_fixed + fit.sigma2_gamma) / denom;

    const double dof = double(n - p);
    fit.reml_loglik = -0.5 * (best.criterion + dof * (1.0 + kLog2Pi));
    return fit;
}

}  // namespace cohort_pulse
