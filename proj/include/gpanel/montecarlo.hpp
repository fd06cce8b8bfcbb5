#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpanel/dgp.hpp"
#include "gpanel/estimator.hpp"

namespace gpanel {

// Where the group separation used for the classification threshold comes
// from: the true mean gap, or the gap of the fitted means.
enum class MgSource { truth, estimated };

// Optional assertions evaluated after a run; any failure makes the mc
// command exit nonzero.
struct McChecks {
    std::optional<double> slope_min, slope_max;
    std::optional<double> coverage_min, coverage_max;
    // |mean(scaled errors)| <= z * sqrt(var(scaled errors)/R) per group.
    std::optional<double> mean_scaled_zscore_max;
    std::optional<double> eq3_lhs_expected, eq3_lhs_tol;
    // At the largest grid point: fraction of replications with zero
    // misclassifications inside I must reach this value.
    std::optional<double> misclass_in_i_zero_frac_min;
    // P(any misclassification) must not increase along the (N,T) grid, and
    // may tie only at zero.
    bool p_any_misclass_nonincreasing = false;
};

struct McConfig {
    DgpConfig design;  // N and T are overridden per grid point
    std::vector<std::pair<int, int>> grid;
    int replications = 1;
    FitOptions fit;
    double alpha = 0.05;
    std::uint64_t base_seed = 1;
    MgSource mg_source = MgSource::truth;
    McChecks checks;

    void validate() const;
};

struct ReplicationRow {
    int n = 0;
    int t = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    bool flagged = false;  // non-convergence or a caught failure

    // Indexed by true group g.
    std::vector<double> err;     // mu_hat[pi(g)] - mu0[g]
    std::vector<double> scaled;  // sqrt(NT) * err
    std::vector<int> covered;    // 1/0, -1 for a degenerate interval

    int misclassified_in_i = 0;
    int misclassified_in_ic = 0;
    int misclassified_total = 0;
    double objective = 0.0;
    double eq3_lhs = 0.0;
    int ic_eq2_count = 0;         // #Ic under the strict threshold formula
    double max_partial_sum = 0.0; // max_i |T^-1/2 sum_t v_it|; nan if unavailable
};

// Per-replication seed: a stated mixing of (base_seed, N, T, rep), so rows
// are independent of execution schedule and stable under increasing R.
std::uint64_t replication_seed(std::uint64_t base_seed, int n, int t, int rep);

// The designed misclassification-prone set: the divergent units of a
// diverging schedule, empty otherwise. Used for row bookkeeping (the strict
// threshold classification is reported separately as ic_eq2_count).
std::vector<int> bookkeeping_ic_set(const DgpConfig& design);

// Runs replications over the grid (sorted by (N,T)); output is a pure
// function of cfg, byte-identical for every worker count.
std::vector<ReplicationRow> run_mc(const McConfig& cfg, int threads = 1);

struct SlopeFit {
    double slope = 0.0;
    double se = 0.0;
    int points = 0;
};

// OLS of log rmse_g(N,T) on log(NT) with intercept; needs >= 3 grid points.
SlopeFit rate_regression(const std::vector<ReplicationRow>& rows, int group);

// Fraction of rows with covered == 1.
double coverage(const std::vector<ReplicationRow>& rows, int group);

struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

// Sample moments of the scaled errors; needs >= 100 rows.
MomentSummary normality_moments(const std::vector<ReplicationRow>& rows, int group);

struct TailCheckResult {
    double frequency = 0.0;
    double bound = 0.0;      // 3/N
    double threshold = 0.0;  // 14 sqrt(log N)
    int exceed_count = 0;
};

// Simulates R pure-noise panels and counts how often the maximal normalized
// partial sum exceeds 14 sqrt(log N).
TailCheckResult tail_bound_check(int n, int t, int replications, const ErrorLaw& law,
                                 std::uint64_t seed);

struct PointSummary {
    int n = 0;
    int t = 0;
    bool converged_only = false;
    int n_reps = 0;
    int n_flagged = 0;
    std::vector<double> rmse;
    std::vector<double> mean_scaled;
    std::vector<double> var_scaled;
    std::vector<double> coverage_rate;
    double p_any_misclass_in_i = 0.0;
    double mean_misclass_rate = 0.0;
    // (log T) sqrt(log N) / sqrt(T): reported so grids can be judged against
    // the asymptotic regime, never asserted.
    double asymptotic_seq_value = 0.0;
};

// Two summaries per grid point: over all rows and over converged rows only.
std::vector<PointSummary> summarize_points(const std::vector<ReplicationRow>& rows,
                                           int num_groups);

std::string rows_to_csv(const std::vector<ReplicationRow>& rows, int num_groups);

struct ParsedRows {
    std::vector<ReplicationRow> rows;
    int num_groups = 0;
};
ParsedRows rows_from_csv(const std::string& text);

std::string summary_to_csv(const std::vector<ReplicationRow>& rows, int num_groups);

// Sorted scaled errors against normal quantiles, per group.
std::string qq_to_csv(const std::vector<ReplicationRow>& rows, int num_groups);

// Returns one message per failed configured check; empty means all passed.
std::vector<std::string> run_config_checks(const McConfig& cfg,
                                           const std::vector<ReplicationRow>& rows);

}  // namespace gpanel
