#pragma once

#include <utility>
#include <vector>

#include "gpanel/estimator.hpp"

namespace gpanel {

// Plug-in for the limit variance contribution of group g: the average
// within-unit sample variance s_i^2 over units assigned to g. Requires
// T >= 2 and a nonempty group.
double estimate_delta(const PanelData& data, const GroupAssignment& g_hat, int group);

// mu +- z_{1-alpha/2} * sqrt(delta / (q * N * T)). delta = 0 collapses the
// interval to the point {mu}.
std::pair<double, double> confidence_interval(double mu_hat_g, double delta_hat, double q_hat,
                                              int n, int t, double alpha);

struct GroupInference {
    int group = 0;  // 0-based estimated label
    double mu_hat = 0.0;
    double q_hat = 0.0;      // N_hat_g / N
    double delta_hat = 0.0;
    double std_error = 0.0;  // sqrt(delta / (q N T))
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double alpha = 0.05;
    bool degenerate = false;  // delta_hat == 0
};

// One row per estimated group. Throws UsageError for T < 2 or an empty
// group.
std::vector<GroupInference> infer_groups(const PanelData& data, const GroupAssignment& g_hat,
                                         const GroupMeans& mu_hat, int num_groups, double alpha);

}  // namespace gpanel
