#include <doctest.h>

#include <cmath>
#include <vector>

#include "gpanel/dgp.hpp"
#include "gpanel/errors.hpp"
#include "gpanel/estimator.hpp"
#include "gpanel/inference.hpp"

using namespace gpanel;

namespace {

PanelData make_panel(int n, int t, const std::vector<double>& y) {
    PanelData data;
    data.n = n;
    data.t = t;
    data.y = y;
    return data;
}

DgpConfig two_group_config(int n, int t) {
    DgpConfig config;
    config.num_groups = 2;
    config.mu0 = {-1.0, 1.0};
    config.group_proportions = {0.5, 0.5};
    config.sigma = SigmaConstant{1.0};
    config.error_law = LawStandardNormal{};
    config.n = n;
    config.t = t;
    return config;
}

}  // namespace

TEST_CASE("estimate_delta: hand-computed and degenerate cases") {
    // single unit, row (0,2): s^2 = 2
    const PanelData single = make_panel(1, 2, {0.0, 2.0});
    CHECK(estimate_delta(single, GroupAssignment{{0}}, 0) == doctest::Approx(2.0).epsilon(1e-15));

    // noiseless data: delta = 0
    DgpConfig config = two_group_config(10, 5);
    config.sigma = SigmaConstant{0.0};
    const PanelData noiseless = generate_panel(config, 1);
    CHECK(estimate_delta(noiseless, GroupAssignment{*noiseless.g0}, 0) == 0.0);

    // guards
    const PanelData t1 = make_panel(2, 1, {0.0, 1.0});
    CHECK_THROWS_AS(estimate_delta(t1, GroupAssignment{{0, 0}}, 0), UsageError);
    CHECK_THROWS_AS(estimate_delta(single, GroupAssignment{{0}}, 1), UsageError);
}

TEST_CASE("estimate_delta: recovers sigma^2 = 4 under correct classification") {
    DgpConfig config = two_group_config(500, 200);
    config.sigma = SigmaConstant{2.0};
    const PanelData panel = generate_panel(config, 20240809);
    const GroupAssignment truth{*panel.g0};
    // chi-squared spread of s^2 around 4: tolerance 0.1 is ~5 sigma here
    CHECK(estimate_delta(panel, truth, 0) == doctest::Approx(4.0).epsilon(0.025));
    CHECK(estimate_delta(panel, truth, 1) == doctest::Approx(4.0).epsilon(0.025));
}

TEST_CASE("estimate_delta: converges to the group sigma average as T grows") {
    DgpConfig config = two_group_config(60, 2000);
    std::vector<double> sig(60);
    for (int i = 0; i < 60; ++i) sig[i] = 0.5 + 0.05 * i;  // ramp
    config.sigma = SigmaPerUnit{sig};
    const PanelData panel = generate_panel(config, 7);
    const GroupAssignment truth{*panel.g0};

    for (int g = 0; g < 2; ++g) {
        double target = 0.0;
        int count = 0;
        for (int i = 0; i < 60; ++i) {
            if ((*panel.g0)[i] == g) {
                target += sig[i] * sig[i];
                ++count;
            }
        }
        target /= count;
        CHECK(estimate_delta(panel, truth, g) == doctest::Approx(target).epsilon(0.02));
    }
}

TEST_CASE("confidence_interval: frozen half-width and quantile sanity") {
    // z_{0.975} * sqrt(1/(0.5*200*100)) computed with mpmath
    const auto ci = confidence_interval(0.0, 1.0, 0.5, 200, 100, 0.05);
    CHECK(ci.second == doctest::Approx(0.019599639845400542).epsilon(1e-12));
    CHECK(ci.first == doctest::Approx(-0.019599639845400542).epsilon(1e-12));

    // alpha = 0.3173: half-width equals the standard error to 3 digits
    const double se = std::sqrt(1.0 / (0.5 * 200 * 100));
    const auto ci2 = confidence_interval(0.0, 1.0, 0.5, 200, 100, 0.3173);
    CHECK(ci2.second == doctest::Approx(se).epsilon(1e-3));

    // degenerate: delta = 0 collapses to the point
    const auto ci3 = confidence_interval(1.5, 0.0, 0.5, 200, 100, 0.05);
    CHECK(ci3.first == 1.5);
    CHECK(ci3.second == 1.5);

    CHECK_THROWS_AS(confidence_interval(0.0, -1.0, 0.5, 10, 10, 0.05), UsageError);
    CHECK_THROWS_AS(confidence_interval(0.0, 1.0, 0.0, 10, 10, 0.05), UsageError);
    CHECK_THROWS_AS(confidence_interval(0.0, 1.0, 0.5, 10, 10, 0.0), UsageError);
    CHECK_THROWS_AS(confidence_interval(0.0, 1.0, 0.5, 10, 10, 1.0), UsageError);
}

TEST_CASE("infer_groups: shares sum to one and degenerate flags propagate") {
    DgpConfig config = two_group_config(100, 50);
    const PanelData panel = generate_panel(config, 5);
    FitOptions opts;
    opts.restarts = 20;
    const EstimateResult fit = estimate(panel, 2, opts, 6);
    const auto rows = infer_groups(panel, fit.g_hat, fit.mu_hat, 2, 0.05);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].q_hat + rows[1].q_hat == 1.0);
    for (const auto& row : rows) {
        CHECK(row.ci_lower < row.ci_upper);
        CHECK(row.std_error > 0.0);
        CHECK(!row.degenerate);
        CHECK(row.q_hat > 0.0);
        CHECK(row.q_hat <= 1.0);
    }

    // noiseless: degenerate intervals flagged
    config.sigma = SigmaConstant{0.0};
    const PanelData clean = generate_panel(config, 5);
    const EstimateResult fit2 = estimate(clean, 2, opts, 6);
    const auto rows2 = infer_groups(clean, fit2.g_hat, fit2.mu_hat, 2, 0.05);
    for (const auto& row : rows2) {
        CHECK(row.degenerate);
        CHECK(row.ci_lower == row.ci_upper);
    }

    // empty estimated group
    GroupAssignment all_zero{std::vector<int>(100, 0)};
    CHECK_THROWS_AS(infer_groups(panel, all_zero, fit.mu_hat, 2, 0.05), UsageError);
}

TEST_CASE("inference: scale equivariance of the whole pipeline") {
    DgpConfig config = two_group_config(80, 40);
    const PanelData panel = generate_panel(config, 11);
    PanelData scaled = panel;
    const double c = 3.0;
    for (auto& v : scaled.y) v *= c;

    FitOptions opts;
    opts.restarts = 20;
    const EstimateResult fit_a = estimate(panel, 2, opts, 13);
    const EstimateResult fit_b = estimate(scaled, 2, opts, 13);
    CHECK(fit_a.g_hat.labels == fit_b.g_hat.labels);

    const auto rows_a = infer_groups(panel, fit_a.g_hat, fit_a.mu_hat, 2, 0.05);
    const auto rows_b = infer_groups(scaled, fit_b.g_hat, fit_b.mu_hat, 2, 0.05);
    for (int g = 0; g < 2; ++g) {
        CHECK(rows_b[g].mu_hat == doctest::Approx(c * rows_a[g].mu_hat).epsilon(1e-12));
        CHECK(rows_b[g].std_error == doctest::Approx(c * rows_a[g].std_error).epsilon(1e-12));
        CHECK(rows_b[g].ci_lower == doctest::Approx(c * rows_a[g].ci_lower).epsilon(1e-12));
        CHECK(rows_b[g].ci_upper == doctest::Approx(c * rows_a[g].ci_upper).epsilon(1e-12));
        CHECK(rows_b[g].q_hat == rows_a[g].q_hat);
    }
}
