#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gpanel/dgp.hpp"

namespace gpanel {

struct GroupAssignment {
    std::vector<int> labels;  // 0-based, in [0, num_groups)
};

struct GroupMeans {
    std::vector<double> values;
};

enum class InitStrategy {
    random_assignment,  // uniform labels
    spread_seeding,     // greedy farthest-point centers on unit means
    interleaved,        // alternate the two across restarts
};

struct FitOptions {
    int restarts = 100;
    int max_iterations = 1000;
    // Half-width of the symmetric box the means are clamped to. Defaults to
    // 10 * max|ybar_i|, which never binds for means that are averages of the
    // data.
    std::optional<double> box_halfwidth;
    InitStrategy init = InitStrategy::interleaved;

    void validate() const;
};

struct EstimateResult {
    GroupMeans mu_hat;
    GroupAssignment g_hat;
    double objective = 0.0;
    int restarts_run = 0;
    long long iterations_total = 0;
    int best_restart_index = 0;
    bool converged = true;
    bool box_clamped = false;  // set when the parameter box ever bound
};

// Unit time-averages ybar_i, computed with compensated summation.
std::vector<double> unit_means(const PanelData& data);

// Q(g, mu) = (NT)^-1 sum_i sum_t (y_it - mu_{g_i})^2, by direct evaluation.
double objective(const PanelData& data, const GroupAssignment& g, const GroupMeans& mu);

// W = (NT)^-1 sum_i sum_t (y_it - ybar_i)^2, the assignment-invariant part
// of the decomposition Q = W + B.
double within_term(const PanelData& data);
double within_term(const PanelData& data, const std::vector<double>& ybar);

// B = N^-1 sum_i (ybar_i - mu_{g_i})^2.
double between_term(const std::vector<double>& ybar, const GroupAssignment& g,
                    const GroupMeans& mu);

// Group means of ybar; empty groups are reseeded to the unit mean farthest
// from its current center; result clamped to the default parameter box.
GroupMeans update_means(const PanelData& data, const GroupAssignment& g, int num_groups);

// Nearest-mean assignment on ybar, ties to the lowest group index.
GroupAssignment update_assignment(const PanelData& data, const GroupMeans& mu);

struct LloydTrace {
    // Q = W + B after every half-step (initial means, then each
    // assignment/means update). Non-increasing by construction.
    std::vector<double> objective_half_steps;
};

// Alternating minimization from a fixed starting assignment, stopping at an
// assignment fixed point. Non-convergence within max_iterations leaves
// converged=false on the returned (still best) iterate.
EstimateResult lloyd(const PanelData& data, const GroupAssignment& g_init, int num_groups,
                     const FitOptions& opts, LloydTrace* trace = nullptr);

// Multi-start search: opts.restarts independent Lloyd runs, minimal
// objective wins, ties broken by the lowest restart index. Deterministic in
// (data, num_groups, opts, seed).
EstimateResult estimate(const PanelData& data, int num_groups, const FitOptions& opts,
                        std::uint64_t seed);

// Certification oracle: all G^N assignments (guarded at 1e7), each with its
// optimal means. First minimizer in odometer order wins.
EstimateResult exact_global_enumeration(const PanelData& data, int num_groups);

// Certification oracle: O(N^2 G) dynamic program over partitions of the
// sorted unit means into contiguous blocks; exact because the optimal
// partition for this objective is contiguous in sorted ybar.
EstimateResult exact_global_dp(const PanelData& data, int num_groups);

}  // namespace gpanel
