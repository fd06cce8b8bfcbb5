#include <doctest.h>

#include <cmath>
#include <vector>

#include "gpanel/dgp.hpp"
#include "gpanel/errors.hpp"

using namespace gpanel;

namespace {

DgpConfig baseline(int n, int t) {
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

TEST_CASE("generate_panel: zero noise reproduces the group means exactly") {
    DgpConfig config = baseline(4, 2);
    config.sigma = SigmaConstant{0.0};
    const PanelData panel = generate_panel(config, 99);
    const double expected[4] = {-1.0, -1.0, 1.0, 1.0};
    for (int i = 0; i < 4; ++i) {
        for (int s = 0; s < 2; ++s) CHECK(panel.at(i, s) == expected[i]);
    }
    REQUIRE(panel.g0.has_value());
    CHECK((*panel.g0) == std::vector<int>{0, 0, 1, 1});
    CHECK((*panel.mu0) == config.mu0);
}

TEST_CASE("generate_panel: rejects invalid configs naming the invariant") {
    DgpConfig config = baseline(4, 2);
    config.mu0 = {0.0, 0.0};
    CHECK_THROWS_AS(generate_panel(config, 1), ConfigError);

    config = baseline(4, 2);
    config.group_proportions = {0.6, 0.5};
    CHECK_THROWS_AS(generate_panel(config, 1), ConfigError);

    config = baseline(4, 2);
    config.num_groups = 1;
    config.mu0 = {0.0};
    config.group_proportions = {1.0};
    CHECK_THROWS_AS(generate_panel(config, 1), ConfigError);

    config = baseline(1, 2);
    CHECK_THROWS_AS(generate_panel(config, 1), ConfigError);

    config = baseline(4, 0);
    CHECK_THROWS_AS(generate_panel(config, 1), ConfigError);

    config = baseline(4, 2);
    config.sigma = SigmaConstant{-1.0};
    CHECK_THROWS_AS(generate_panel(config, 1), ConfigError);

    config = baseline(4, 2);
    config.sigma = SigmaDiverging{1.0, 5, 1.0};  // divergent_count > N
    CHECK_THROWS_AS(generate_panel(config, 1), ConfigError);

    // quota assignment would starve group 1
    config = baseline(4, 2);
    config.group_proportions = {0.05, 0.95};
    CHECK_THROWS_AS(generate_panel(config, 1), ConfigError);
}

TEST_CASE("generate_panel: law of large numbers at N=1000, T=100") {
    const DgpConfig config = baseline(1000, 100);
    const PanelData panel = generate_panel(config, 31337);
    double sum = 0.0;
    for (int i = 0; i < panel.n; ++i) {
        for (int s = 0; s < panel.t; ++s) sum += panel.at(i, s);
    }
    const double grand_mean = sum / (1000.0 * 100.0);
    // group means cancel by symmetry; noise mean has sd sqrt(1/(NT))
    CHECK(std::abs(grand_mean) <= 3.0 * std::sqrt(1.0 / (1000.0 * 100.0)));

    double var_sum = 0.0;
    for (int i = 0; i < panel.n; ++i) {
        double m = 0.0;
        for (int s = 0; s < panel.t; ++s) m += panel.at(i, s);
        m /= panel.t;
        double v = 0.0;
        for (int s = 0; s < panel.t; ++s) v += (panel.at(i, s) - m) * (panel.at(i, s) - m);
        var_sum += v / (panel.t - 1);
    }
    CHECK(var_sum / panel.n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("generate_panel: pure function of (config, seed)") {
    const DgpConfig config = baseline(50, 20);
    const PanelData a = generate_panel(config, 777);
    const PanelData b = generate_panel(config, 777);
    CHECK(a.y == b.y);
    const PanelData c = generate_panel(config, 778);
    CHECK(a.y != c.y);
}

TEST_CASE("generate_panel: draws are shared across panel sizes") {
    // counter-based per-cell streams: cell (i,t) does not depend on N or T
    const PanelData small = generate_panel(baseline(4, 3), 555);
    const PanelData longer = generate_panel(baseline(4, 5), 555);
    for (int i = 0; i < 4; ++i) {
        for (int s = 0; s < 3; ++s) CHECK(small.at(i, s) == longer.at(i, s));
    }
    const PanelData wide = generate_panel(baseline(8, 3), 555);
    for (int i = 0; i < 4; ++i) {
        // same group under both quotas -> identical outcomes
        if ((*small.g0)[i] == (*wide.g0)[i]) {
            for (int s = 0; s < 3; ++s) CHECK(small.at(i, s) == wide.at(i, s));
        }
    }
}

TEST_CASE("quota assignment: counts stay within 1 of the target") {
    DgpConfig config = baseline(10, 2);
    config.num_groups = 3;
    config.mu0 = {-1.0, 0.0, 1.0};
    for (const auto& props : std::vector<std::vector<double>>{
             {0.2, 0.3, 0.5}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.26, 0.33, 0.41}}) {
        config.group_proportions = props;
        for (int n : {7, 10, 53, 100, 997}) {
            config.n = n;
            const std::vector<int> labels = config.quota_assignment();
            std::vector<int> counts(3, 0);
            for (int lab : labels) ++counts[lab];
            for (int g = 0; g < 3; ++g) {
                CHECK(std::abs(counts[g] - n * props[g]) <= 1.0 + 1e-9);
            }
            // labels are sorted blocks
            for (int i = 1; i < n; ++i) CHECK(labels[i - 1] <= labels[i]);
        }
    }
}

TEST_CASE("sigma vector: diverging schedule pins the last units at c*sqrt(T)") {
    DgpConfig config = baseline(10, 16);
    config.sigma = SigmaDiverging{1.0, 3, 2.0};
    const std::vector<double> sig = config.sigma_vector();
    for (int i = 0; i < 7; ++i) CHECK(sig[i] == 1.0);
    for (int i = 7; i < 10; ++i) CHECK(sig[i] == 8.0);  // 2*sqrt(16)
}

TEST_CASE("sigma_threshold: frozen values and domain guards") {
    // (M_G/140)*sqrt(T/log N), references from 30-digit mpmath
    CHECK(sigma_threshold(140.0, 2, 100) == doctest::Approx(12.011224087864498).epsilon(1e-14));
    CHECK(sigma_threshold(1.0, 100, 400) == doctest::Approx(0.06657008596923658).epsilon(1e-14));
    CHECK_THROWS_AS(sigma_threshold(0.0, 100, 400), UsageError);
    CHECK_THROWS_AS(sigma_threshold(-1.0, 100, 400), UsageError);
    CHECK_THROWS_AS(sigma_threshold(1.0, 1, 400), UsageError);
}

TEST_CASE("classify_units: boundary is inclusive") {
    const std::vector<double> sigma = {0.1, 0.2, 5.0};
    UnitSplit split = classify_units(sigma, 1.0);
    CHECK(split.i_set == std::vector<int>{0, 1});
    CHECK(split.ic_set == std::vector<int>{2});

    split = classify_units({0.5, 0.5}, 1.0);
    CHECK(split.ic_set.empty());

    const double thr = 0.75;
    split = classify_units({thr, thr, thr}, thr);
    CHECK(split.i_set.size() == 3);  // sigma_i == threshold stays in I
    CHECK(split.ic_set.empty());
}

TEST_CASE("eq3_lhs: frozen values and the empty-complement convention") {
    std::vector<double> sigma(100, 0.01);
    CHECK(eq3_lhs(100, 100, sigma, {}) == 0.0);

    sigma[7] = 10.0;  // sigma^2 = 100
    CHECK(eq3_lhs(100, 100, sigma, {7}) == doctest::Approx(1.0).epsilon(1e-14));

    std::vector<double> sigma2(10000, 1.0);
    std::vector<int> ic;
    for (int i = 9990; i < 10000; ++i) {
        sigma2[i] = std::sqrt(10.0);
        ic.push_back(i);
    }
    CHECK(eq3_lhs(10000, 10, sigma2, ic) ==
          doctest::Approx(0.31622776601683794).epsilon(1e-14));
}

TEST_CASE("eq3_lhs: monotone non-decreasing in #Ic at common sigma") {
    std::vector<double> sigma(200, 3.0);
    std::vector<int> ic;
    double prev = 0.0;
    for (int i = 0; i < 200; ++i) {
        ic.push_back(i);
        const double cur = eq3_lhs(200, 50, sigma, ic);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("design_diagnostics: all fields on a diverging design") {
    DgpConfig config = baseline(100, 100);
    config.sigma = SigmaDiverging{0.01, 5, 1.0};
    const DesignDiagnostics diag = design_diagnostics(config, 2.0);

    CHECK(diag.sigma_threshold == doctest::Approx(sigma_threshold(2.0, 100, 100)));
    // base units (sigma=0.01) fall below the threshold ~0.0666; divergent
    // units (sigma=10) exceed it
    CHECK(diag.i_set.size() == 95);
    CHECK(diag.ic_set.size() == 5);
    CHECK(diag.eq3_lhs ==
          doctest::Approx((5.0 / 100.0) * std::sqrt(100.0 * 100.0)).epsilon(1e-12));
    const double avg_var = (95 * 0.0001 + 5 * 100.0) / 100.0;
    CHECK(diag.avg_variance_over_t == doctest::Approx(avg_var / 100.0).epsilon(1e-12));
    CHECK(diag.min_group_gap == 2.0);
    CHECK(diag.min_group_share == 0.5);
    // (log T) sqrt(log N) / sqrt(T) at N=T=100, mpmath reference
    CHECK(diag.asymptotic_seq_value == doctest::Approx(0.9882538764411039).epsilon(1e-14));

    // I and Ic partition the unit indices
    std::vector<char> seen(100, 0);
    for (int i : diag.i_set) seen[i] = 1;
    for (int i : diag.ic_set) {
        CHECK(!seen[i]);
        seen[i] = 1;
    }
    for (char s : seen) CHECK(s == 1);
}

TEST_CASE("design_diagnostics: empty complement gives eq3 = 0") {
    DgpConfig config = baseline(100, 100);
    config.sigma = SigmaConstant{0.01};
    const DesignDiagnostics diag = design_diagnostics(config, 2.0);
    CHECK(diag.ic_set.empty());
    CHECK(diag.eq3_lhs == 0.0);
}
