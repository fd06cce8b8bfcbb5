#include "gpanel/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gpanel/errors.hpp"
#include "gpanel/numeric.hpp"

namespace gpanel {

namespace {

void check_assignment(const GroupAssignment& g, int n, int num_groups, const char* who) {
    if (static_cast<int>(g.labels.size()) != n) {
        throw UsageError(std::string(who) + ": assignment length does not match N");
    }
    for (int lab : g.labels) {
        if (lab < 0 || lab >= num_groups) {
            throw UsageError(std::string(who) + ": group label out of range");
        }
    }
}

double default_box_halfwidth(const std::vector<double>& ybar) {
    double m = 0.0;
    for (double v : ybar) m = std::max(m, std::abs(v));
    return 10.0 * m;
}

// Group means of ybar with empty-group reseeding and box clamping.
std::vector<double> means_core(const std::vector<double>& ybar, const std::vector<int>& labels,
                               int num_groups, double box_halfwidth, bool* clamped) {
    const int n = static_cast<int>(ybar.size());
    std::vector<NeumaierSum> sums(num_groups);
    std::vector<int> counts(num_groups, 0);
    for (int i = 0; i < n; ++i) {
        sums[labels[i]].add(ybar[i]);
        ++counts[labels[i]];
    }
    std::vector<double> mu(num_groups, 0.0);
    for (int g = 0; g < num_groups; ++g) {
        if (counts[g] > 0) mu[g] = sums[g].value() / counts[g];
    }

    // Empty groups grab the unit mean farthest from its current center.
    std::vector<char> consumed(n, 0);
    for (int g = 0; g < num_groups; ++g) {
        if (counts[g] > 0) continue;
        int pick = -1;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            if (consumed[i]) continue;
            const double d = ybar[i] - mu[labels[i]];
            if (d * d > best) {
                best = d * d;
                pick = i;
            }
        }
        if (pick < 0) {
            // more empty groups than units; fall back to the overall farthest
            for (int i = 0; i < n; ++i) {
                const double d = ybar[i] - mu[labels[i]];
                if (d * d > best) {
                    best = d * d;
                    pick = i;
                }
            }
        }
        mu[g] = ybar[pick];
        consumed[pick] = 1;
    }

    for (int g = 0; g < num_groups; ++g) {
        const double c = std::clamp(mu[g], -box_halfwidth, box_halfwidth);
        if (c != mu[g] && clamped != nullptr) *clamped = true;
        mu[g] = c;
    }
    return mu;
}

// Nearest mean on ybar, ties to the lowest group index.
std::vector<int> assign_core(const std::vector<double>& ybar, const std::vector<double>& mu) {
    const int n = static_cast<int>(ybar.size());
    const int num_groups = static_cast<int>(mu.size());
    std::vector<int> labels(n, 0);
    for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int g = 0; g < num_groups; ++g) {
            const double d = ybar[i] - mu[g];
            const double dist = d * d;
            if (dist < best) {
                best = dist;
                arg = g;
            }
        }
        labels[i] = arg;
    }
    return labels;
}

double between_core(const std::vector<double>& ybar, const std::vector<int>& labels,
                    const std::vector<double>& mu) {
    NeumaierSum acc;
    for (std::size_t i = 0; i < ybar.size(); ++i) {
        const double d = ybar[i] - mu[labels[i]];
        acc.add(d * d);
    }
    return acc.value() / static_cast<double>(ybar.size());
}

struct LloydCoreResult {
    std::vector<int> labels;
    std::vector<double> mu;
    double objective = 0.0;  // W + B, the value used for restart comparison
    int iterations = 0;
    bool converged = false;
    bool clamped = false;
};

LloydCoreResult lloyd_core(const std::vector<double>& ybar, double w, std::vector<int> labels,
                           int num_groups, int max_iterations, double box_halfwidth,
                           LloydTrace* trace) {
    LloydCoreResult res;
    res.labels = std::move(labels);
    res.mu = means_core(ybar, res.labels, num_groups, box_halfwidth, &res.clamped);
    if (trace != nullptr) {
        trace->objective_half_steps.push_back(w + between_core(ybar, res.labels, res.mu));
    }
    for (res.iterations = 1; res.iterations <= max_iterations; ++res.iterations) {
        std::vector<int> next = assign_core(ybar, res.mu);
        if (trace != nullptr) {
            trace->objective_half_steps.push_back(w + between_core(ybar, next, res.mu));
        }
        if (next == res.labels) {
            res.converged = true;
            break;
        }
        res.labels = std::move(next);
        res.mu = means_core(ybar, res.labels, num_groups, box_halfwidth, &res.clamped);
        if (trace != nullptr) {
            trace->objective_half_steps.push_back(w + between_core(ybar, res.labels, res.mu));
        }
    }
    res.iterations = std::min(res.iterations, max_iterations);
    res.objective = w + between_core(ybar, res.labels, res.mu);
    return res;
}

std::vector<int> random_labels(CounterRng& rng, int n, int num_groups) {
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(num_groups));
    }
    return labels;
}

// Greedy farthest-point centers on ybar, first center drawn uniformly, then
// nearest-center assignment.
std::vector<int> spread_labels(CounterRng& rng, const std::vector<double>& ybar, int num_groups) {
    const int n = static_cast<int>(ybar.size());
    std::vector<double> centers;
    std::vector<char> chosen(n, 0);
    const int first = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    centers.push_back(ybar[first]);
    chosen[first] = 1;
    while (static_cast<int>(centers.size()) < num_groups) {
        int pick = -1;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            if (chosen[i]) continue;
            double dist = std::numeric_limits<double>::infinity();
            for (double c : centers) {
                const double d = ybar[i] - c;
                dist = std::min(dist, d * d);
            }
            if (dist > best) {
                best = dist;
                pick = i;
            }
        }
        if (pick < 0) {
            centers.push_back(centers.back());  // fewer units than groups
            continue;
        }
        centers.push_back(ybar[pick]);
        chosen[pick] = 1;
    }
    return assign_core(ybar, centers);
}

EstimateResult finish_result(const PanelData& data, LloydCoreResult core) {
    EstimateResult res;
    res.g_hat.labels = std::move(core.labels);
    res.mu_hat.values = std::move(core.mu);
    res.objective = objective(data, res.g_hat, res.mu_hat);
    res.iterations_total = core.iterations;
    res.converged = core.converged;
    res.box_clamped = core.clamped;
    return res;
}

}  // namespace

void FitOptions::validate() const {
    if (restarts < 1) throw UsageError("FitOptions: restarts must be >= 1");
    if (max_iterations < 1) throw UsageError("FitOptions: max_iterations must be >= 1");
    if (box_halfwidth && !(*box_halfwidth > 0.0)) {
        throw UsageError("FitOptions: box_halfwidth must be positive");
    }
}

std::vector<double> unit_means(const PanelData& data) {
    std::vector<double> ybar(data.n);
    for (int i = 0; i < data.n; ++i) {
        NeumaierSum acc;
        for (int s = 0; s < data.t; ++s) acc.add(data.at(i, s));
        ybar[i] = acc.value() / static_cast<double>(data.t);
    }
    return ybar;
}

double objective(const PanelData& data, const GroupAssignment& g, const GroupMeans& mu) {
    const int num_groups = static_cast<int>(mu.values.size());
    check_assignment(g, data.n, num_groups, "objective");
    NeumaierSum acc;
    for (int i = 0; i < data.n; ++i) {
        const double m = mu.values[g.labels[i]];
        for (int s = 0; s < data.t; ++s) {
            const double d = data.at(i, s) - m;
            acc.add(d * d);
        }
    }
    return acc.value() / (static_cast<double>(data.n) * static_cast<double>(data.t));
}

double within_term(const PanelData& data, const std::vector<double>& ybar) {
    NeumaierSum acc;
    for (int i = 0; i < data.n; ++i) {
        for (int s = 0; s < data.t; ++s) {
            const double d = data.at(i, s) - ybar[i];
            acc.add(d * d);
        }
    }
    return acc.value() / (static_cast<double>(data.n) * static_cast<double>(data.t));
}

double within_term(const PanelData& data) {
    return within_term(data, unit_means(data));
}

double between_term(const std::vector<double>& ybar, const GroupAssignment& g,
                    const GroupMeans& mu) {
    if (g.labels.size() != ybar.size()) {
        throw UsageError("between_term: assignment length does not match unit means");
    }
    return between_core(ybar, g.labels, mu.values);
}

GroupMeans update_means(const PanelData& data, const GroupAssignment& g, int num_groups) {
    check_assignment(g, data.n, num_groups, "update_means");
    const std::vector<double> ybar = unit_means(data);
    GroupMeans mu;
    mu.values = means_core(ybar, g.labels, num_groups, default_box_halfwidth(ybar), nullptr);
    return mu;
}

GroupAssignment update_assignment(const PanelData& data, const GroupMeans& mu) {
    GroupAssignment g;
    g.labels = assign_core(unit_means(data), mu.values);
    return g;
}

EstimateResult lloyd(const PanelData& data, const GroupAssignment& g_init, int num_groups,
                     const FitOptions& opts, LloydTrace* trace) {
    opts.validate();
    check_assignment(g_init, data.n, num_groups, "lloyd");
    const std::vector<double> ybar = unit_means(data);
    const double w = within_term(data, ybar);
    const double box = opts.box_halfwidth.value_or(default_box_halfwidth(ybar));
    EstimateResult res = finish_result(
        data, lloyd_core(ybar, w, g_init.labels, num_groups, opts.max_iterations, box, trace));
    res.restarts_run = 1;
    return res;
}

EstimateResult estimate(const PanelData& data, int num_groups, const FitOptions& opts,
                        std::uint64_t seed) {
    opts.validate();
    if (num_groups < 1) throw UsageError("estimate: num_groups must be >= 1");
    if (data.n < 1) throw UsageError("estimate: panel has no units");

    const std::vector<double> ybar = unit_means(data);
    const double w = within_term(data, ybar);
    const double box = opts.box_halfwidth.value_or(default_box_halfwidth(ybar));

    LloydCoreResult best;
    int best_restart = -1;
    long long iterations_total = 0;
    bool clamped_any = false;

    for (int r = 0; r < opts.restarts; ++r) {
        CounterRng rng(combine(seed, static_cast<std::uint64_t>(r)));
        InitStrategy strategy = opts.init;
        if (strategy == InitStrategy::interleaved) {
            strategy = (r % 2 == 0) ? InitStrategy::random_assignment : InitStrategy::spread_seeding;
        }
        std::vector<int> init = (strategy == InitStrategy::random_assignment)
                                    ? random_labels(rng, data.n, num_groups)
                                    : spread_labels(rng, ybar, num_groups);
        LloydCoreResult run =
            lloyd_core(ybar, w, std::move(init), num_groups, opts.max_iterations, box, nullptr);
        iterations_total += run.iterations;
        clamped_any = clamped_any || run.clamped;
        if (best_restart < 0 || run.objective < best.objective) {
            best = std::move(run);
            best_restart = r;
        }
    }

    EstimateResult res = finish_result(data, std::move(best));
    res.restarts_run = opts.restarts;
    res.iterations_total = iterations_total;
    res.best_restart_index = best_restart;
    res.box_clamped = clamped_any;
    return res;
}

EstimateResult exact_global_enumeration(const PanelData& data, int num_groups) {
    if (num_groups < 1) throw UsageError("exact_global_enumeration: num_groups must be >= 1");
    if (data.n < 1) throw UsageError("exact_global_enumeration: panel has no units");
    double combos = 1.0;
    for (int i = 0; i < data.n; ++i) {
        combos *= static_cast<double>(num_groups);
        if (combos > 1e7) {
            throw SizeError("exact_global_enumeration: G^N exceeds 1e7; instance too large");
        }
    }

    const std::vector<double> ybar = unit_means(data);
    const int n = data.n;

    std::vector<int> labels(n, 0);
    std::vector<int> best_labels;
    long double best_b = std::numeric_limits<long double>::infinity();

    std::vector<long double> sums(num_groups);
    std::vector<int> counts(num_groups);
    while (true) {
        std::fill(sums.begin(), sums.end(), 0.0L);
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < n; ++i) {
            sums[labels[i]] += ybar[i];
            ++counts[labels[i]];
        }
        long double b = 0.0L;
        for (int i = 0; i < n; ++i) {
            const long double m = sums[labels[i]] / counts[labels[i]];
            const long double d = static_cast<long double>(ybar[i]) - m;
            b += d * d;
        }
        if (b < best_b) {
            best_b = b;
            best_labels = labels;
        }
        // odometer increment, first position fastest
        int pos = 0;
        while (pos < n) {
            if (++labels[pos] < num_groups) break;
            labels[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
    }

    GroupAssignment g{best_labels};
    GroupMeans mu = update_means(data, g, num_groups);
    EstimateResult res;
    res.g_hat = std::move(g);
    res.mu_hat = std::move(mu);
    res.objective = objective(data, res.g_hat, res.mu_hat);
    res.converged = true;
    return res;
}

EstimateResult exact_global_dp(const PanelData& data, int num_groups) {
    if (num_groups < 1) throw UsageError("exact_global_dp: num_groups must be >= 1");
    if (data.n < 1) throw UsageError("exact_global_dp: panel has no units");

    const std::vector<double> ybar = unit_means(data);
    const int n = data.n;
    const int blocks = std::min(num_groups, n);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ybar[a] < ybar[b]; });

    std::vector<long double> s1(n + 1, 0.0L), s2(n + 1, 0.0L);
    for (int i = 0; i < n; ++i) {
        const long double v = ybar[order[i]];
        s1[i + 1] = s1[i] + v;
        s2[i + 1] = s2[i] + v * v;
    }
    // within-block SSE of sorted positions [a, b]
    auto cost = [&](int a, int b) -> long double {
        const long double s = s1[b + 1] - s1[a];
        const long double q = s2[b + 1] - s2[a];
        const long double c = q - s * s / static_cast<long double>(b - a + 1);
        return c > 0.0L ? c : 0.0L;
    };

    const long double inf = std::numeric_limits<long double>::infinity();
    std::vector<std::vector<long double>> dp(blocks + 1, std::vector<long double>(n + 1, inf));
    std::vector<std::vector<int>> back(blocks + 1, std::vector<int>(n + 1, -1));
    dp[0][0] = 0.0L;
    for (int k = 1; k <= blocks; ++k) {
        for (int i = k; i <= n; ++i) {
            for (int j = k - 1; j <= i - 1; ++j) {
                if (dp[k - 1][j] == inf) continue;
                const long double cand = dp[k - 1][j] + cost(j, i - 1);
                if (cand < dp[k][i]) {
                    dp[k][i] = cand;
                    back[k][i] = j;
                }
            }
        }
    }

    std::vector<int> labels_sorted(n, 0);
    int i = n;
    for (int k = blocks; k >= 1; --k) {
        const int j = back[k][i];
        for (int p = j; p < i; ++p) labels_sorted[p] = k - 1;
        i = j;
    }

    GroupAssignment g;
    g.labels.assign(n, 0);
    for (int p = 0; p < n; ++p) g.labels[order[p]] = labels_sorted[p];

    GroupMeans mu = update_means(data, g, num_groups);
    EstimateResult res;
    res.g_hat = std::move(g);
    res.mu_hat = std::move(mu);
    res.objective = objective(data, res.g_hat, res.mu_hat);
    res.converged = true;
    return res;
}

}  // namespace gpanel
