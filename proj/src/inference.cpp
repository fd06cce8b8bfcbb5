#include "gpanel/inference.hpp"

#include <cmath>
#include <string>

#include "gpanel/errors.hpp"
#include "gpanel/normal.hpp"
#include "gpanel/numeric.hpp"

namespace gpanel {

namespace {

// Within-unit sample variance s_i^2 = (T-1)^-1 sum_t (y_it - ybar_i)^2.
double unit_sample_variance(const PanelData& data, int unit) {
    NeumaierSum sum;
    for (int s = 0; s < data.t; ++s) sum.add(data.at(unit, s));
    const double ybar = sum.value() / static_cast<double>(data.t);
    NeumaierSum sq;
    for (int s = 0; s < data.t; ++s) {
        const double d = data.at(unit, s) - ybar;
        sq.add(d * d);
    }
    return sq.value() / static_cast<double>(data.t - 1);
}

}  // namespace

double estimate_delta(const PanelData& data, const GroupAssignment& g_hat, int group) {
    if (data.t < 2) {
        throw UsageError("estimate_delta: unsupported for T < 2 (within-unit variance undefined)");
    }
    if (static_cast<int>(g_hat.labels.size()) != data.n) {
        throw UsageError("estimate_delta: assignment length does not match N");
    }
    NeumaierSum acc;
    int count = 0;
    for (int i = 0; i < data.n; ++i) {
        if (g_hat.labels[i] != group) continue;
        acc.add(unit_sample_variance(data, i));
        ++count;
    }
    if (count == 0) {
        throw UsageError("estimate_delta: group " + std::to_string(group + 1) +
                         " has no assigned units");
    }
    return acc.value() / static_cast<double>(count);
}

std::pair<double, double> confidence_interval(double mu_hat_g, double delta_hat, double q_hat,
                                              int n, int t, double alpha) {
    if (!(delta_hat >= 0.0)) throw UsageError("confidence_interval: delta_hat must be >= 0");
    if (!(q_hat > 0.0)) throw UsageError("confidence_interval: q_hat must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw UsageError("confidence_interval: alpha must lie in (0,1)");
    }
    const double se = std::sqrt(delta_hat / (q_hat * static_cast<double>(n) * static_cast<double>(t)));
    const double z = normal_quantile(1.0 - alpha / 2.0);
    return {mu_hat_g - z * se, mu_hat_g + z * se};
}

std::vector<GroupInference> infer_groups(const PanelData& data, const GroupAssignment& g_hat,
                                         const GroupMeans& mu_hat, int num_groups, double alpha) {
    if (static_cast<int>(mu_hat.values.size()) != num_groups) {
        throw UsageError("infer_groups: mean vector length does not match num_groups");
    }
    std::vector<GroupInference> rows(num_groups);
    for (int g = 0; g < num_groups; ++g) {
        int count = 0;
        for (int lab : g_hat.labels) count += (lab == g);
        if (count == 0) {
            throw UsageError("infer_groups: estimated group " + std::to_string(g + 1) + " is empty");
        }
        GroupInference& row = rows[g];
        row.group = g;
        row.mu_hat = mu_hat.values[g];
        row.q_hat = static_cast<double>(count) / static_cast<double>(data.n);
        row.delta_hat = estimate_delta(data, g_hat, g);
        row.std_error = std::sqrt(row.delta_hat /
                                  (row.q_hat * static_cast<double>(data.n) * static_cast<double>(data.t)));
        const auto ci = confidence_interval(row.mu_hat, row.delta_hat, row.q_hat, data.n, data.t, alpha);
        row.ci_lower = ci.first;
        row.ci_upper = ci.second;
        row.alpha = alpha;
        row.degenerate = (row.delta_hat == 0.0);
    }
    return rows;
}

}  // namespace gpanel
