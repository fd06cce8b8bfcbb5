// gpanel: generate grouped panels, fit the kmeans estimator, run Monte Carlo
// studies, and inspect design diagnostics. CSV in, CSV/JSON out; every source
// of randomness is an explicit seed.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpanel/alignment.hpp"
#include "gpanel/config_json.hpp"
#include "gpanel/csv.hpp"
#include "gpanel/errors.hpp"
#include "gpanel/estimator.hpp"
#include "gpanel/inference.hpp"
#include "gpanel/montecarlo.hpp"
#include "gpanel/numeric.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCheckFailed = 3;

struct GenArgs {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
};

struct FitArgs {
    std::string panel_path;
    int groups = 2;
    int restarts = 100;
    int max_iterations = 1000;
    std::uint64_t seed = 1;
    std::string init = "interleaved";
    std::optional<double> box;
    std::string means_out;
    std::string assign_out;
    std::string truth_config;
    std::optional<double> ci_alpha;
    std::string ci_out;
};

struct McArgs {
    std::string config_path;
    std::string rows_out;
    std::string summary_out;
    std::string qq_out;
    int threads = 1;
};

struct CheckDesignArgs {
    std::string config_path;
    std::optional<double> m_g;
};

gpanel::InitStrategy parse_init(const std::string& s) {
    if (s == "random") return gpanel::InitStrategy::random_assignment;
    if (s == "spread") return gpanel::InitStrategy::spread_seeding;
    if (s == "interleaved") return gpanel::InitStrategy::interleaved;
    throw gpanel::UsageError("--init must be random|spread|interleaved");
}

int run_gen(const GenArgs& args) {
    const gpanel::DgpConfig config = gpanel::load_dgp_config(args.config_path);
    const gpanel::PanelData panel = gpanel::generate_panel(config, args.seed);
    gpanel::write_panel_csv(panel, args.out_path);
    json out;
    out["n"] = panel.n;
    out["t"] = panel.t;
    out["out"] = args.out_path;
    out["seed"] = args.seed;
    std::cout << out.dump() << "\n";
    return kExitOk;
}

int run_fit(const FitArgs& args) {
    const gpanel::PanelData panel = gpanel::read_panel_csv(args.panel_path);
    if (args.groups < 1) throw gpanel::UsageError("--groups must be >= 1");

    gpanel::FitOptions opts;
    opts.restarts = args.restarts;
    opts.max_iterations = args.max_iterations;
    opts.init = parse_init(args.init);
    opts.box_halfwidth = args.box;

    const gpanel::EstimateResult res =
        gpanel::estimate(panel, args.groups, opts, args.seed);

    if (!args.means_out.empty()) {
        std::string csv = "group,mu_hat\n";
        for (int g = 0; g < args.groups; ++g) {
            csv += std::to_string(g + 1) + ',' + gpanel::format_double(res.mu_hat.values[g]) + '\n';
        }
        gpanel::write_text_file(args.means_out, csv);
    }
    if (!args.assign_out.empty()) {
        std::string csv = "unit,g_hat\n";
        for (int i = 0; i < panel.n; ++i) {
            csv += std::to_string(i + 1) + ',' + std::to_string(res.g_hat.labels[i] + 1) + '\n';
        }
        gpanel::write_text_file(args.assign_out, csv);
    }

    json out;
    out["n"] = panel.n;
    out["t"] = panel.t;
    out["groups"] = args.groups;
    out["objective"] = res.objective;
    out["restarts_run"] = res.restarts_run;
    out["iterations_total"] = res.iterations_total;
    out["best_restart_index"] = res.best_restart_index;
    out["converged"] = res.converged;
    out["box_clamped"] = res.box_clamped;
    out["mu_hat"] = res.mu_hat.values;

    if (!args.truth_config.empty()) {
        gpanel::DgpConfig truth = gpanel::load_dgp_config(args.truth_config);
        truth.n = panel.n;
        truth.t = panel.t;
        truth.validate();
        if (truth.num_groups != args.groups) {
            throw gpanel::DataError("truth config num_groups differs from --groups");
        }
        const std::vector<int> g0 =
            panel.g0 ? *panel.g0 : truth.quota_assignment();
        if (static_cast<int>(g0.size()) != panel.n) {
            throw gpanel::DataError("truth labels do not match panel size");
        }
        const std::vector<int> ic = gpanel::bookkeeping_ic_set(truth);
        std::vector<char> in_ic(panel.n, 0);
        for (int i : ic) in_ic[i] = 1;
        std::vector<int> i_set;
        for (int i = 0; i < panel.n; ++i) {
            if (!in_ic[i]) i_set.push_back(i);
        }
        const gpanel::AlignmentReport report = gpanel::align(
            res.mu_hat, res.g_hat, gpanel::GroupMeans{truth.mu0}, g0, i_set);
        json alignment;
        std::vector<int> perm1;
        for (int p : report.perm.map) perm1.push_back(p + 1);
        alignment["perm"] = perm1;
        alignment["max_mu_error"] = report.max_mu_error;
        alignment["per_group_mu_error"] = report.per_group_mu_error;
        alignment["misclassified_total"] = report.misclassified_total;
        alignment["misclassified_in_i"] = report.misclassified_in_i;
        alignment["misclassified_in_ic"] = report.misclassified_in_ic;
        out["alignment"] = alignment;
    }

    std::string ci_csv;
    if (args.ci_alpha) {
        const auto rows =
            gpanel::infer_groups(panel, res.g_hat, res.mu_hat, args.groups, *args.ci_alpha);
        ci_csv = "group,mu_hat,q_hat,delta_hat,std_error,ci_lower,ci_upper\n";
        for (const auto& row : rows) {
            ci_csv += std::to_string(row.group + 1);
            ci_csv += ',' + gpanel::format_double(row.mu_hat);
            ci_csv += ',' + gpanel::format_double(row.q_hat);
            ci_csv += ',' + gpanel::format_double(row.delta_hat);
            ci_csv += ',' + gpanel::format_double(row.std_error);
            ci_csv += ',' + gpanel::format_double(row.ci_lower);
            ci_csv += ',' + gpanel::format_double(row.ci_upper);
            ci_csv += '\n';
        }
        bool any_degenerate = false;
        for (const auto& row : rows) any_degenerate = any_degenerate || row.degenerate;
        out["ci_degenerate"] = any_degenerate;
        if (!args.ci_out.empty()) gpanel::write_text_file(args.ci_out, ci_csv);
    }

    std::cout << out.dump() << "\n";
    if (args.ci_alpha && args.ci_out.empty()) std::cout << ci_csv;
    return kExitOk;
}

int run_mc(const McArgs& args) {
    const gpanel::McConfig cfg = gpanel::load_mc_config(args.config_path);
    const auto rows = gpanel::run_mc(cfg, args.threads);
    gpanel::write_text_file(args.rows_out, gpanel::rows_to_csv(rows, cfg.design.num_groups));
    if (!args.summary_out.empty()) {
        gpanel::write_text_file(args.summary_out,
                                gpanel::summary_to_csv(rows, cfg.design.num_groups));
    }
    if (!args.qq_out.empty()) {
        gpanel::write_text_file(args.qq_out, gpanel::qq_to_csv(rows, cfg.design.num_groups));
    }
    const std::vector<std::string> failures = gpanel::run_config_checks(cfg, rows);
    json out;
    out["replications"] = rows.size();
    out["rows"] = args.rows_out;
    if (!args.summary_out.empty()) out["summary"] = args.summary_out;
    out["checks_failed"] = failures.size();
    std::cout << out.dump() << "\n";
    for (const std::string& f : failures) std::cerr << "check failed: " << f << "\n";
    return failures.empty() ? kExitOk : kExitCheckFailed;
}

int run_check_design(const CheckDesignArgs& args) {
    const gpanel::DgpConfig config = gpanel::load_dgp_config(args.config_path);
    const double m_g = args.m_g.value_or(config.min_gap());
    const gpanel::DesignDiagnostics diag = gpanel::design_diagnostics(config, m_g);
    json out;
    out["m_g"] = m_g;
    out["sigma_threshold"] = diag.sigma_threshold;
    out["i_count"] = diag.i_set.size();
    out["ic_count"] = diag.ic_set.size();
    std::vector<int> ic1;
    for (int i : diag.ic_set) ic1.push_back(i + 1);
    out["ic_set"] = ic1;
    out["eq3_lhs"] = diag.eq3_lhs;
    out["avg_variance_over_t"] = diag.avg_variance_over_t;
    out["min_group_gap"] = diag.min_group_gap;
    out["min_group_share"] = diag.min_group_share;
    out["asymptotic_seq_value"] = diag.asymptotic_seq_value;
    std::cout << out.dump() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grouped-panel kmeans estimation and Monte Carlo verification"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a panel CSV from a design config");
    gen_cmd->add_option("--config", gen.config_path, "DgpConfig JSON path")->required();
    gen_cmd->add_option("--out", gen.out_path, "output panel CSV path")->required();
    gen_cmd->add_option("--seed", gen.seed, "64-bit generation seed")->required();

    FitArgs fit;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit the kmeans estimator to a panel CSV");
    fit_cmd->add_option("--panel", fit.panel_path, "long-format panel CSV path")->required();
    fit_cmd->add_option("--groups", fit.groups, "number of groups G")->required();
    fit_cmd->add_option("--restarts", fit.restarts, "number of restarts (default 100)");
    fit_cmd->add_option("--max-iters", fit.max_iterations, "Lloyd iteration cap per restart");
    fit_cmd->add_option("--seed", fit.seed, "seed for restart initialization");
    fit_cmd->add_option("--init", fit.init, "init strategy: random|spread|interleaved");
    double box_value = 0.0;
    CLI::Option* box_opt =
        fit_cmd->add_option("--box", box_value, "parameter box half-width (default 10*max|ybar|)");
    fit_cmd->add_option("--means-out", fit.means_out, "write fitted means CSV here");
    fit_cmd->add_option("--assign-out", fit.assign_out, "write fitted assignment CSV here");
    fit_cmd->add_option("--truth", fit.truth_config,
                        "DgpConfig JSON with the true design, enables alignment report");
    double alpha_value = 0.0;
    CLI::Option* ci_opt =
        fit_cmd->add_option("--ci", alpha_value, "emit confidence intervals at level 1-alpha");
    fit_cmd->add_option("--ci-out", fit.ci_out, "write CI rows here instead of stdout");

    McArgs mc;
    CLI::App* mc_cmd = app.add_subcommand("mc", "run a Monte Carlo replication study");
    mc_cmd->add_option("--config", mc.config_path, "McConfig JSON path")->required();
    mc_cmd->add_option("--out", mc.rows_out, "replication rows CSV path")->required();
    mc_cmd->add_option("--summary", mc.summary_out, "per-grid-point summary CSV path");
    mc_cmd->add_option("--qq", mc.qq_out, "scaled-error quantile-quantile CSV path");
    mc_cmd->add_option("--threads", mc.threads, "worker threads (output is identical for any count)");

    CheckDesignArgs check;
    CLI::App* check_cmd =
        app.add_subcommand("check-design", "print design diagnostics for a config");
    check_cmd->add_option("--config", check.config_path, "DgpConfig JSON path")->required();
    double mg_value = 0.0;
    CLI::Option* mg_opt =
        check_cmd->add_option("--mg", mg_value, "group separation M_G (default: true minimal gap)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*box_opt) fit.box = box_value;
    if (*ci_opt) fit.ci_alpha = alpha_value;
    if (*mg_opt) check.m_g = mg_value;

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (fit_cmd->parsed()) return run_fit(fit);
        if (mc_cmd->parsed()) return run_mc(mc);
        if (check_cmd->parsed()) return run_check_design(check);
        std::cerr << "no subcommand selected\n";
        return kExitUsage;
    } catch (const gpanel::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const gpanel::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitData;
    } catch (const gpanel::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
