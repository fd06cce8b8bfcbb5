#pragma once

#include <vector>

#include "gpanel/estimator.hpp"

namespace gpanel {

// map[g] is the estimated label matched to true group g, i.e. the
// permutation pi with mu_hat[pi(g)] close to mu0[g]. A unit i is correctly
// classified when g_hat_i == pi(g0_i).
struct GroupPermutation {
    std::vector<int> map;
};

// Minimizer of max_g |mu_hat[pi(g)] - mu0[g]| over all G! permutations,
// ties broken to the lexicographically smallest map. Guarded at G <= 10.
GroupPermutation best_permutation(const GroupMeans& mu_hat, const GroupMeans& mu0);

struct ClassificationCounts {
    int total = 0;
    int in_i = 0;
    int in_ic = 0;
};

// Counts units whose estimated label differs from pi(g0_i), split by
// membership in i_set (0-based unit indices).
ClassificationCounts classification_errors(const GroupAssignment& g_hat,
                                           const std::vector<int>& g0,
                                           const GroupPermutation& perm,
                                           const std::vector<int>& i_set);

// sqrt(NT) * (mu_hat_aligned[g] - mu0[g]) per group, signed.
std::vector<double> scaled_mu_errors(const std::vector<double>& mu_hat_aligned,
                                     const std::vector<double>& mu0, int n, int t);

struct AlignmentReport {
    GroupPermutation perm;
    double max_mu_error = 0.0;
    std::vector<double> per_group_mu_error;  // |mu_hat[pi(g)] - mu0[g]|
    int misclassified_total = 0;
    int misclassified_in_i = 0;
    int misclassified_in_ic = 0;
};

AlignmentReport align(const GroupMeans& mu_hat, const GroupAssignment& g_hat,
                      const GroupMeans& mu0, const std::vector<int>& g0,
                      const std::vector<int>& i_set);

}  // namespace gpanel
