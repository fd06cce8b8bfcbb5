#include "gpanel/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gpanel/errors.hpp"

namespace gpanel {

GroupPermutation best_permutation(const GroupMeans& mu_hat, const GroupMeans& mu0) {
    const int num_groups = static_cast<int>(mu0.values.size());
    if (static_cast<int>(mu_hat.values.size()) != num_groups) {
        throw UsageError("best_permutation: mean vectors have different lengths");
    }
    if (num_groups > 10) {
        throw SizeError("best_permutation: G! enumeration is guarded at G <= 10");
    }
    if (num_groups == 0) throw UsageError("best_permutation: empty mean vectors");

    std::vector<int> perm(num_groups);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int g = 0; g < num_groups; ++g) {
            cost = std::max(cost, std::abs(mu_hat.values[perm[g]] - mu0.values[g]));
        }
        if (cost < best_cost) {  // lexicographic order of next_permutation breaks ties
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return GroupPermutation{std::move(best)};
}

ClassificationCounts classification_errors(const GroupAssignment& g_hat,
                                           const std::vector<int>& g0,
                                           const GroupPermutation& perm,
                                           const std::vector<int>& i_set) {
    if (g_hat.labels.size() != g0.size()) {
        throw UsageError("classification_errors: assignment lengths differ");
    }
    std::vector<char> in_i(g0.size(), 0);
    for (int i : i_set) {
        if (i < 0 || i >= static_cast<int>(g0.size())) {
            throw UsageError("classification_errors: I-set index out of range");
        }
        in_i[i] = 1;
    }
    ClassificationCounts counts;
    for (std::size_t i = 0; i < g0.size(); ++i) {
        if (g_hat.labels[i] != perm.map[g0[i]]) {
            ++counts.total;
            if (in_i[i]) {
                ++counts.in_i;
            } else {
                ++counts.in_ic;
            }
        }
    }
    return counts;
}

std::vector<double> scaled_mu_errors(const std::vector<double>& mu_hat_aligned,
                                     const std::vector<double>& mu0, int n, int t) {
    if (mu_hat_aligned.size() != mu0.size()) {
        throw UsageError("scaled_mu_errors: mean vectors have different lengths");
    }
    const double root_nt = std::sqrt(static_cast<double>(n) * static_cast<double>(t));
    std::vector<double> out(mu0.size());
    for (std::size_t g = 0; g < mu0.size(); ++g) {
        out[g] = root_nt * (mu_hat_aligned[g] - mu0[g]);
    }
    return out;
}

AlignmentReport align(const GroupMeans& mu_hat, const GroupAssignment& g_hat,
                      const GroupMeans& mu0, const std::vector<int>& g0,
                      const std::vector<int>& i_set) {
    AlignmentReport report;
    report.perm = best_permutation(mu_hat, mu0);
    report.per_group_mu_error.resize(mu0.values.size());
    for (std::size_t g = 0; g < mu0.values.size(); ++g) {
        report.per_group_mu_error[g] = std::abs(mu_hat.values[report.perm.map[g]] - mu0.values[g]);
        report.max_mu_error = std::max(report.max_mu_error, report.per_group_mu_error[g]);
    }
    const ClassificationCounts counts = classification_errors(g_hat, g0, report.perm, i_set);
    report.misclassified_total = counts.total;
    report.misclassified_in_i = counts.in_i;
    report.misclassified_in_ic = counts.in_ic;
    return report;
}

}  // namespace gpanel
