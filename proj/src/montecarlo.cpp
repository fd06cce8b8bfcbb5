#include "gpanel/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "gpanel/alignment.hpp"
#include "gpanel/csv.hpp"
#include "gpanel/errors.hpp"
#include "gpanel/inference.hpp"
#include "gpanel/normal.hpp"
#include "gpanel/numeric.hpp"

namespace gpanel {

namespace {

constexpr std::uint64_t kGenStream = 0x67656eULL;  // "gen"
constexpr std::uint64_t kFitStream = 0x666974ULL;  // "fit"

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

std::vector<int> complement_set(int n, const std::vector<int>& subset) {
    std::vector<char> mark(n, 0);
    for (int i : subset) mark[i] = 1;
    std::vector<int> out;
    out.reserve(n - subset.size());
    for (int i = 0; i < n; ++i) {
        if (!mark[i]) out.push_back(i);
    }
    return out;
}

ReplicationRow run_one(const McConfig& cfg, int n, int t, int rep) {
    const int num_groups = cfg.design.num_groups;
    ReplicationRow row;
    row.n = n;
    row.t = t;
    row.rep = rep;
    row.seed = replication_seed(cfg.base_seed, n, t, rep);
    row.err.assign(num_groups, nan_value());
    row.scaled.assign(num_groups, nan_value());
    row.covered.assign(num_groups, -1);
    row.max_partial_sum = nan_value();

    DgpConfig design = cfg.design;
    design.n = n;
    design.t = t;
    design.validate();

    const PanelData panel = generate_panel(design, combine(row.seed, kGenStream));
    const EstimateResult fit =
        estimate(panel, num_groups, cfg.fit, combine(row.seed, kFitStream));
    row.flagged = !fit.converged;
    row.objective = fit.objective;

    const GroupMeans truth_means{design.mu0};
    const GroupPermutation perm = best_permutation(fit.mu_hat, truth_means);
    std::vector<double> aligned(num_groups);
    for (int g = 0; g < num_groups; ++g) aligned[g] = fit.mu_hat.values[perm.map[g]];
    for (int g = 0; g < num_groups; ++g) row.err[g] = aligned[g] - design.mu0[g];
    row.scaled = scaled_mu_errors(aligned, design.mu0, n, t);

    const std::vector<int> ic = bookkeeping_ic_set(design);
    const std::vector<int> i_set = complement_set(n, ic);
    const ClassificationCounts counts = classification_errors(fit.g_hat, *panel.g0, perm, i_set);
    row.misclassified_total = counts.total;
    row.misclassified_in_i = counts.in_i;
    row.misclassified_in_ic = counts.in_ic;

    row.eq3_lhs = eq3_lhs(n, t, *panel.sigma, ic);
    const double m_g = (cfg.mg_source == MgSource::truth) ? design.min_gap()
                                                          : min_pairwise_gap(fit.mu_hat.values);
    row.ic_eq2_count =
        static_cast<int>(classify_units(*panel.sigma, sigma_threshold(m_g, n, t)).ic_set.size());

    if (t >= 2) {
        for (int g = 0; g < num_groups; ++g) {
            const int est = perm.map[g];
            int count = 0;
            for (int lab : fit.g_hat.labels) count += (lab == est);
            if (count == 0) continue;  // covered stays -1
            const double q_hat = static_cast<double>(count) / static_cast<double>(n);
            const double delta_hat = estimate_delta(panel, fit.g_hat, est);
            if (delta_hat == 0.0) continue;  // degenerate interval
            const auto ci =
                confidence_interval(fit.mu_hat.values[est], delta_hat, q_hat, n, t, cfg.alpha);
            row.covered[g] =
                (ci.first <= design.mu0[g] && design.mu0[g] <= ci.second) ? 1 : 0;
        }
    }

    // Recover the standardized draws for the maximal-partial-sum diagnostic.
    bool recoverable = true;
    for (double s : *panel.sigma) recoverable = recoverable && (s > 0.0);
    if (recoverable) {
        double max_abs = 0.0;
        for (int i = 0; i < n; ++i) {
            NeumaierSum acc;
            const double mu = design.mu0[(*panel.g0)[i]];
            const double s_i = (*panel.sigma)[i];
            for (int s = 0; s < t; ++s) acc.add((panel.at(i, s) - mu) / s_i);
            max_abs = std::max(max_abs, std::abs(acc.value()) / std::sqrt(static_cast<double>(t)));
        }
        row.max_partial_sum = max_abs;
    }
    return row;
}

struct PointStats {
    int n_reps = 0;
    int n_flagged = 0;
    std::vector<NeumaierSum> err_sq, scaled_sum, scaled_sq;
    std::vector<int> covered_count, covered_rows;
    int any_misclass_in_i = 0;
    NeumaierSum misclass_rate;
};

PointSummary finalize_point(int n, int t, bool converged_only, int num_groups,
                            const PointStats& st) {
    PointSummary p;
    p.n = n;
    p.t = t;
    p.converged_only = converged_only;
    p.n_reps = st.n_reps;
    p.n_flagged = st.n_flagged;
    p.rmse.assign(num_groups, nan_value());
    p.mean_scaled.assign(num_groups, nan_value());
    p.var_scaled.assign(num_groups, nan_value());
    p.coverage_rate.assign(num_groups, nan_value());
    if (st.n_reps == 0) return p;
    const double r = static_cast<double>(st.n_reps);
    for (int g = 0; g < num_groups; ++g) {
        p.rmse[g] = std::sqrt(st.err_sq[g].value() / r);
        const double mean = st.scaled_sum[g].value() / r;
        p.mean_scaled[g] = mean;
        p.var_scaled[g] = st.scaled_sq[g].value() / r - mean * mean;
        if (st.covered_rows[g] > 0) {
            p.coverage_rate[g] =
                static_cast<double>(st.covered_count[g]) / static_cast<double>(st.covered_rows[g]);
        }
    }
    p.p_any_misclass_in_i = static_cast<double>(st.any_misclass_in_i) / r;
    p.mean_misclass_rate = st.misclass_rate.value() / r;
    p.asymptotic_seq_value = std::log(static_cast<double>(t)) *
                             std::sqrt(std::log(static_cast<double>(n))) /
                             std::sqrt(static_cast<double>(t));
    return p;
}

void accumulate(PointStats& st, const ReplicationRow& row, int num_groups) {
    if (st.err_sq.empty()) {
        st.err_sq.resize(num_groups);
        st.scaled_sum.resize(num_groups);
        st.scaled_sq.resize(num_groups);
        st.covered_count.assign(num_groups, 0);
        st.covered_rows.assign(num_groups, 0);
    }
    ++st.n_reps;
    if (row.flagged) ++st.n_flagged;
    for (int g = 0; g < num_groups; ++g) {
        st.err_sq[g].add(row.err[g] * row.err[g]);
        st.scaled_sum[g].add(row.scaled[g]);
        st.scaled_sq[g].add(row.scaled[g] * row.scaled[g]);
        if (row.covered[g] >= 0) {
            ++st.covered_rows[g];
            st.covered_count[g] += (row.covered[g] == 1);
        }
    }
    st.any_misclass_in_i += (row.misclassified_in_i > 0);
    st.misclass_rate.add(static_cast<double>(row.misclassified_total) / static_cast<double>(row.n));
}

std::string csv_int(long long v) { return std::to_string(v); }

}  // namespace

void McConfig::validate() const {
    if (replications < 1) throw ConfigError("McConfig: replications must be >= 1");
    if (grid.empty()) throw ConfigError("McConfig: grid must be nonempty");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("McConfig: alpha must lie in (0,1)");
    fit.validate();
    for (const auto& [n, t] : grid) {
        if (n < 2 || t < 1) throw ConfigError("McConfig: grid entries need N >= 2 and T >= 1");
    }
}

std::uint64_t replication_seed(std::uint64_t base_seed, int n, int t, int rep) {
    return combine(combine(combine(base_seed, static_cast<std::uint64_t>(n)),
                           static_cast<std::uint64_t>(t)),
                   static_cast<std::uint64_t>(rep));
}

std::vector<int> bookkeeping_ic_set(const DgpConfig& design) {
    std::vector<int> ic;
    if (const auto* div = std::get_if<SigmaDiverging>(&design.sigma)) {
        for (int i = design.n - div->divergent_count; i < design.n; ++i) ic.push_back(i);
    }
    return ic;
}

std::vector<ReplicationRow> run_mc(const McConfig& cfg, int threads) {
    cfg.validate();
    std::vector<std::pair<int, int>> grid = cfg.grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const int reps = cfg.replications;
    const std::size_t total = grid.size() * static_cast<std::size_t>(reps);
    std::vector<ReplicationRow> rows(total);

    auto work_one = [&](std::size_t k) {
        const auto [n, t] = grid[k / reps];
        const int rep = static_cast<int>(k % reps);
        try {
            rows[k] = run_one(cfg, n, t, rep);
        } catch (const std::exception&) {
            ReplicationRow row;
            row.n = n;
            row.t = t;
            row.rep = rep;
            row.seed = replication_seed(cfg.base_seed, n, t, rep);
            row.flagged = true;
            row.err.assign(cfg.design.num_groups, nan_value());
            row.scaled.assign(cfg.design.num_groups, nan_value());
            row.covered.assign(cfg.design.num_groups, -1);
            row.objective = nan_value();
            row.eq3_lhs = nan_value();
            row.max_partial_sum = nan_value();
            rows[k] = std::move(row);
        }
    };

    const int workers = std::max(1, threads);
    if (workers == 1) {
        for (std::size_t k = 0; k < total; ++k) work_one(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (std::size_t k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
                    work_one(k);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return rows;  // already ordered by (n, t, rep)
}

SlopeFit rate_regression(const std::vector<ReplicationRow>& rows, int group) {
    std::map<std::pair<int, int>, std::pair<NeumaierSum, int>> acc;
    for (const ReplicationRow& row : rows) {
        auto& slot = acc[{row.n, row.t}];
        slot.first.add(row.err[group] * row.err[group]);
        ++slot.second;
    }
    if (acc.size() < 3) {
        throw UsageError("rate_regression: needs at least 3 grid points");
    }
    std::vector<double> xs, ys;
    for (const auto& [nt, slot] : acc) {
        const double rmse = std::sqrt(slot.first.value() / slot.second);
        if (!(rmse > 0.0)) {
            throw UsageError("rate_regression: rmse must be positive to take logs");
        }
        xs.push_back(std::log(static_cast<double>(nt.first) * static_cast<double>(nt.second)));
        ys.push_back(std::log(rmse));
    }
    const int m = static_cast<int>(xs.size());
    double xm = 0.0, ym = 0.0;
    for (int k = 0; k < m; ++k) {
        xm += xs[k];
        ym += ys[k];
    }
    xm /= m;
    ym /= m;
    double sxx = 0.0, sxy = 0.0;
    for (int k = 0; k < m; ++k) {
        sxx += (xs[k] - xm) * (xs[k] - xm);
        sxy += (xs[k] - xm) * (ys[k] - ym);
    }
    SlopeFit fit;
    fit.points = m;
    fit.slope = sxy / sxx;
    double ssr = 0.0;
    for (int k = 0; k < m; ++k) {
        const double resid = ys[k] - ym - fit.slope * (xs[k] - xm);
        ssr += resid * resid;
    }
    fit.se = (m > 2) ? std::sqrt(ssr / (m - 2) / sxx) : 0.0;
    return fit;
}

double coverage(const std::vector<ReplicationRow>& rows, int group) {
    if (rows.empty()) throw UsageError("coverage: no rows");
    int hit = 0;
    for (const ReplicationRow& row : rows) hit += (row.covered[group] == 1);
    return static_cast<double>(hit) / static_cast<double>(rows.size());
}

MomentSummary normality_moments(const std::vector<ReplicationRow>& rows, int group) {
    if (rows.size() < 100) {
        throw UsageError("normality_moments: needs at least 100 rows");
    }
    const double r = static_cast<double>(rows.size());
    NeumaierSum sum;
    for (const ReplicationRow& row : rows) sum.add(row.scaled[group]);
    const double mean = sum.value() / r;
    NeumaierSum m2, m3, m4;
    for (const ReplicationRow& row : rows) {
        const double d = row.scaled[group] - mean;
        m2.add(d * d);
        m3.add(d * d * d);
        m4.add(d * d * d * d);
    }
    MomentSummary out;
    out.mean = mean;
    out.variance = m2.value() / r;
    const double sd = std::sqrt(out.variance);
    out.skewness = (sd > 0.0) ? (m3.value() / r) / (sd * sd * sd) : 0.0;
    out.excess_kurtosis =
        (out.variance > 0.0) ? (m4.value() / r) / (out.variance * out.variance) - 3.0 : 0.0;
    return out;
}

TailCheckResult tail_bound_check(int n, int t, int replications, const ErrorLaw& law,
                                 std::uint64_t seed) {
    if (n < 2) throw UsageError("tail_bound_check: N must be >= 2");
    if (t < 1 || replications < 1) {
        throw UsageError("tail_bound_check: T and replications must be positive");
    }
    TailCheckResult res;
    res.threshold = 14.0 * std::sqrt(std::log(static_cast<double>(n)));
    res.bound = 3.0 / static_cast<double>(n);
    const double root_t = std::sqrt(static_cast<double>(t));
    for (int rep = 0; rep < replications; ++rep) {
        const std::uint64_t rep_seed = combine(seed, static_cast<std::uint64_t>(rep));
        double max_abs = 0.0;
        for (int i = 0; i < n; ++i) {
            NeumaierSum acc;
            for (int s = 0; s < t; ++s) {
                CounterRng rng(cell_key(rep_seed, static_cast<std::uint64_t>(i),
                                        static_cast<std::uint64_t>(s)));
                acc.add(draw_standardized(law, rng));
            }
            max_abs = std::max(max_abs, std::abs(acc.value()) / root_t);
        }
        res.exceed_count += (max_abs > res.threshold);
    }
    res.frequency = static_cast<double>(res.exceed_count) / static_cast<double>(replications);
    return res;
}

std::vector<PointSummary> summarize_points(const std::vector<ReplicationRow>& rows,
                                           int num_groups) {
    std::map<std::pair<int, int>, std::pair<PointStats, PointStats>> acc;  // all, converged
    for (const ReplicationRow& row : rows) {
        auto& slot = acc[{row.n, row.t}];
        accumulate(slot.first, row, num_groups);
        if (!row.flagged) accumulate(slot.second, row, num_groups);
    }
    std::vector<PointSummary> out;
    for (const auto& [nt, slot] : acc) {
        out.push_back(finalize_point(nt.first, nt.second, false, num_groups, slot.first));
        out.push_back(finalize_point(nt.first, nt.second, true, num_groups, slot.second));
    }
    return out;
}

std::string rows_to_csv(const std::vector<ReplicationRow>& rows, int num_groups) {
    std::string out = "n,t,rep,seed,flagged";
    for (int g = 1; g <= num_groups; ++g) {
        out += ",err_g" + std::to_string(g) + ",scaled_g" + std::to_string(g) + ",covered_g" +
               std::to_string(g);
    }
    out += ",misclassified_in_i,misclassified_in_ic,misclassified_total,objective,eq3_lhs,"
           "ic_eq2_count,max_partial_sum\n";
    for (const ReplicationRow& row : rows) {
        out += csv_int(row.n);
        out += ',';
        out += csv_int(row.t);
        out += ',';
        out += csv_int(row.rep);
        out += ',';
        out += std::to_string(row.seed);
        out += ',';
        out += csv_int(row.flagged ? 1 : 0);
        for (int g = 0; g < num_groups; ++g) {
            out += ',';
            out += format_double(row.err[g]);
            out += ',';
            out += format_double(row.scaled[g]);
            out += ',';
            out += csv_int(row.covered[g]);
        }
        out += ',';
        out += csv_int(row.misclassified_in_i);
        out += ',';
        out += csv_int(row.misclassified_in_ic);
        out += ',';
        out += csv_int(row.misclassified_total);
        out += ',';
        out += format_double(row.objective);
        out += ',';
        out += format_double(row.eq3_lhs);
        out += ',';
        out += csv_int(row.ic_eq2_count);
        out += ',';
        out += format_double(row.max_partial_sum);
        out += '\n';
    }
    return out;
}

ParsedRows rows_from_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) throw DataError("rows CSV: empty input");
    int num_groups = 0;
    {
        std::stringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) {
            if (cell.rfind("err_g", 0) == 0) ++num_groups;
        }
    }
    if (num_groups == 0) throw DataError("rows CSV: header has no err_g columns");

    ParsedRows parsed;
    parsed.num_groups = num_groups;
    int line_no = 1;
    while (std::getline(ss, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        const std::string where = "rows CSV line " + std::to_string(line_no);
        const std::size_t expected = 5 + 3 * static_cast<std::size_t>(num_groups) + 7;
        if (cells.size() != expected) {
            throw DataError(where + ": unexpected cell count");
        }
        ReplicationRow row;
        std::size_t c = 0;
        row.n = static_cast<int>(parse_long(cells[c++], where));
        row.t = static_cast<int>(parse_long(cells[c++], where));
        row.rep = static_cast<int>(parse_long(cells[c++], where));
        {
            const std::string& s = cells[c++];
            unsigned long long v = 0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
                throw DataError(where + ": cannot parse seed '" + s + "'");
            }
            row.seed = v;
        }
        row.flagged = parse_long(cells[c++], where) != 0;
        row.err.resize(num_groups);
        row.scaled.resize(num_groups);
        row.covered.resize(num_groups);
        for (int g = 0; g < num_groups; ++g) {
            row.err[g] = parse_double(cells[c++], where);
            row.scaled[g] = parse_double(cells[c++], where);
            row.covered[g] = static_cast<int>(parse_long(cells[c++], where));
        }
        row.misclassified_in_i = static_cast<int>(parse_long(cells[c++], where));
        row.misclassified_in_ic = static_cast<int>(parse_long(cells[c++], where));
        row.misclassified_total = static_cast<int>(parse_long(cells[c++], where));
        row.objective = parse_double(cells[c++], where);
        row.eq3_lhs = parse_double(cells[c++], where);
        row.ic_eq2_count = static_cast<int>(parse_long(cells[c++], where));
        row.max_partial_sum = parse_double(cells[c++], where);
        parsed.rows.push_back(std::move(row));
    }
    return parsed;
}

std::string summary_to_csv(const std::vector<ReplicationRow>& rows, int num_groups) {
    const std::vector<PointSummary> points = summarize_points(rows, num_groups);

    std::string out = "kind,n,t,subset,n_reps,n_flagged";
    for (int g = 1; g <= num_groups; ++g) out += ",rmse_g" + std::to_string(g);
    for (int g = 1; g <= num_groups; ++g) out += ",mean_scaled_g" + std::to_string(g);
    for (int g = 1; g <= num_groups; ++g) out += ",var_scaled_g" + std::to_string(g);
    for (int g = 1; g <= num_groups; ++g) out += ",coverage_g" + std::to_string(g);
    out += ",p_any_misclass_in_i,mean_misclass_rate,asymptotic_seq_value";
    for (int g = 1; g <= num_groups; ++g) {
        out += ",slope_g" + std::to_string(g) + ",slope_se_g" + std::to_string(g);
    }
    out += '\n';

    for (const PointSummary& p : points) {
        out += "point,";
        out += csv_int(p.n);
        out += ',';
        out += csv_int(p.t);
        out += ',';
        out += p.converged_only ? "converged" : "all";
        out += ',';
        out += csv_int(p.n_reps);
        out += ',';
        out += csv_int(p.n_flagged);
        for (int g = 0; g < num_groups; ++g) out += ',' + format_double(p.rmse[g]);
        for (int g = 0; g < num_groups; ++g) out += ',' + format_double(p.mean_scaled[g]);
        for (int g = 0; g < num_groups; ++g) out += ',' + format_double(p.var_scaled[g]);
        for (int g = 0; g < num_groups; ++g) out += ',' + format_double(p.coverage_rate[g]);
        out += ',' + format_double(p.p_any_misclass_in_i);
        out += ',' + format_double(p.mean_misclass_rate);
        out += ',' + format_double(p.asymptotic_seq_value);
        for (int g = 0; g < num_groups; ++g) out += ",,";
        out += '\n';
    }

    // one slope row per subset when the grid supports a regression
    std::map<std::pair<int, int>, int> distinct;
    for (const ReplicationRow& row : rows) distinct[{row.n, row.t}] = 1;
    if (distinct.size() >= 3) {
        for (int pass = 0; pass < 2; ++pass) {
            const bool converged_only = (pass == 1);
            std::vector<ReplicationRow> subset;
            for (const ReplicationRow& row : rows) {
                if (!converged_only || !row.flagged) subset.push_back(row);
            }
            out += "slope,,,";
            out += converged_only ? "converged" : "all";
            out += ",";
            out += csv_int(static_cast<long long>(subset.size()));
            out += ",";
            for (int g = 0; g < num_groups; ++g) out += ",";
            for (int g = 0; g < num_groups; ++g) out += ",";
            for (int g = 0; g < num_groups; ++g) out += ",";
            for (int g = 0; g < num_groups; ++g) out += ",";
            out += ",,,";  // p_any, mean rate, asymptotic sequence value
            for (int g = 0; g < num_groups; ++g) {
                try {
                    const SlopeFit fit = rate_regression(subset, g);
                    out += ',' + format_double(fit.slope) + ',' + format_double(fit.se);
                } catch (const UsageError&) {
                    out += ",,";  // zero rmse or too few points
                }
            }
            out += '\n';
        }
    }
    return out;
}

std::string qq_to_csv(const std::vector<ReplicationRow>& rows, int num_groups) {
    std::string out = "group,rank,scaled_error,standardized,normal_quantile\n";
    for (int g = 0; g < num_groups; ++g) {
        std::vector<double> xs;
        xs.reserve(rows.size());
        for (const ReplicationRow& row : rows) {
            if (std::isfinite(row.scaled[g])) xs.push_back(row.scaled[g]);
        }
        std::sort(xs.begin(), xs.end());
        if (xs.empty()) continue;
        const double r = static_cast<double>(xs.size());
        NeumaierSum sum;
        for (double x : xs) sum.add(x);
        const double mean = sum.value() / r;
        NeumaierSum sq;
        for (double x : xs) sq.add((x - mean) * (x - mean));
        const double sd = std::sqrt(sq.value() / r);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double p = (static_cast<double>(k) + 0.5) / r;
            out += csv_int(g + 1);
            out += ',' + csv_int(static_cast<long long>(k + 1));
            out += ',' + format_double(xs[k]);
            out += ',' + format_double(sd > 0.0 ? (xs[k] - mean) / sd : 0.0);
            out += ',' + format_double(normal_quantile(p));
            out += '\n';
        }
    }
    return out;
}

std::vector<std::string> run_config_checks(const McConfig& cfg,
                                           const std::vector<ReplicationRow>& rows) {
    std::vector<std::string> failures;
    const int num_groups = cfg.design.num_groups;
    const McChecks& checks = cfg.checks;
    char buf[256];

    if (checks.slope_min || checks.slope_max) {
        for (int g = 0; g < num_groups; ++g) {
            const SlopeFit fit = rate_regression(rows, g);
            if (checks.slope_min && fit.slope < *checks.slope_min) {
                std::snprintf(buf, sizeof(buf), "slope group %d: %.6f < min %.6f", g + 1, fit.slope,
                              *checks.slope_min);
                failures.emplace_back(buf);
            }
            if (checks.slope_max && fit.slope > *checks.slope_max) {
                std::snprintf(buf, sizeof(buf), "slope group %d: %.6f > max %.6f", g + 1, fit.slope,
                              *checks.slope_max);
                failures.emplace_back(buf);
            }
        }
    }
    if (checks.coverage_min || checks.coverage_max) {
        for (int g = 0; g < num_groups; ++g) {
            const double cov = coverage(rows, g);
            if (checks.coverage_min && cov < *checks.coverage_min) {
                std::snprintf(buf, sizeof(buf), "coverage group %d: %.4f < min %.4f", g + 1, cov,
                              *checks.coverage_min);
                failures.emplace_back(buf);
            }
            if (checks.coverage_max && cov > *checks.coverage_max) {
                std::snprintf(buf, sizeof(buf), "coverage group %d: %.4f > max %.4f", g + 1, cov,
                              *checks.coverage_max);
                failures.emplace_back(buf);
            }
        }
    }
    if (checks.mean_scaled_zscore_max) {
        for (int g = 0; g < num_groups; ++g) {
            NeumaierSum sum, sq;
            for (const ReplicationRow& row : rows) {
                sum.add(row.scaled[g]);
                sq.add(row.scaled[g] * row.scaled[g]);
            }
            const double r = static_cast<double>(rows.size());
            const double mean = sum.value() / r;
            const double var = sq.value() / r - mean * mean;
            const double band = *checks.mean_scaled_zscore_max * std::sqrt(var / r);
            if (std::abs(mean) > band) {
                std::snprintf(buf, sizeof(buf), "mean scaled error group %d: |%.5f| > %.5f", g + 1,
                              mean, band);
                failures.emplace_back(buf);
            }
        }
    }
    if (checks.eq3_lhs_expected) {
        const double tol = checks.eq3_lhs_tol.value_or(1e-6);
        for (const ReplicationRow& row : rows) {
            if (std::abs(row.eq3_lhs - *checks.eq3_lhs_expected) > tol) {
                std::snprintf(buf, sizeof(buf), "eq3_lhs %.6f differs from expected %.6f by > %.6f",
                              row.eq3_lhs, *checks.eq3_lhs_expected, tol);
                failures.emplace_back(buf);
                break;
            }
        }
    }
    if (checks.p_any_misclass_nonincreasing || checks.misclass_in_i_zero_frac_min) {
        std::map<std::pair<int, int>, std::pair<int, int>> acc;  // (any-in-I count, zero-in-I count)
        std::map<std::pair<int, int>, int> tot;
        for (const ReplicationRow& row : rows) {
            auto key = std::make_pair(row.n, row.t);
            ++tot[key];
            if (row.misclassified_total > 0) ++acc[key].first;
            if (row.misclassified_in_i == 0) ++acc[key].second;
        }
        if (checks.p_any_misclass_nonincreasing) {
            double prev = std::numeric_limits<double>::infinity();
            for (const auto& [key, t] : tot) {
                const double p = static_cast<double>(acc[key].first) / t;
                const bool ok = (p < prev) || (p == prev && p == 0.0);
                if (!ok) {
                    std::snprintf(buf, sizeof(buf),
                                  "P(any misclassified) not decreasing at N=%d T=%d: %.5f after %.5f",
                                  key.first, key.second, p, prev);
                    failures.emplace_back(buf);
                }
                prev = p;
            }
        }
        if (checks.misclass_in_i_zero_frac_min && !tot.empty()) {
            const auto& key = tot.rbegin()->first;
            const double frac =
                static_cast<double>(acc[key].second) / static_cast<double>(tot[key]);
            if (frac < *checks.misclass_in_i_zero_frac_min) {
                std::snprintf(buf, sizeof(buf),
                              "zero-misclassification-in-I fraction at N=%d T=%d: %.4f < %.4f",
                              key.first, key.second, frac, *checks.misclass_in_i_zero_frac_min);
                failures.emplace_back(buf);
            }
        }
    }
    return failures;
}

}  // namespace gpanel
