#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gpanel/alignment.hpp"
#include "gpanel/errors.hpp"
#include "gpanel/rng.hpp"

using namespace gpanel;

TEST_CASE("best_permutation: swap, identity, and stability") {
    GroupPermutation p = best_permutation(GroupMeans{{5.1, 0.9}}, GroupMeans{{1.0, 5.0}});
    CHECK(p.map == std::vector<int>{1, 0});

    p = best_permutation(GroupMeans{{1.0, 5.0}}, GroupMeans{{1.0, 5.0}});
    CHECK(p.map == std::vector<int>{0, 1});

    // aligning already-aligned means returns the identity
    GroupMeans aligned{{0.98, 5.03, -2.01}};
    GroupMeans truth{{1.0, 5.0, -2.0}};
    p = best_permutation(aligned, truth);
    CHECK(p.map == std::vector<int>{0, 1, 2});
}

TEST_CASE("best_permutation: matches an independent exhaustive minimizer") {
    CounterRng rng(71);
    for (int rep = 0; rep < 100; ++rep) {
        const int num_groups = 2 + static_cast<int>(rng.next_u64() % 3);
        GroupMeans truth;
        for (int g = 0; g < num_groups; ++g) truth.values.push_back(rng.next_uniform() * 10.0 - 5.0);
        // noisy permuted copy
        std::vector<int> shuffle(num_groups);
        std::iota(shuffle.begin(), shuffle.end(), 0);
        for (int k = num_groups - 1; k > 0; --k) {
            std::swap(shuffle[k], shuffle[rng.next_u64() % (k + 1)]);
        }
        GroupMeans est;
        est.values.resize(num_groups);
        for (int g = 0; g < num_groups; ++g) {
            est.values[shuffle[g]] = truth.values[g] + 0.05 * (rng.next_uniform() - 0.5);
        }

        const GroupPermutation got = best_permutation(est, truth);

        // independent enumeration of all permutations
        std::vector<int> perm(num_groups);
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> best_perm;
        do {
            double cost = 0.0;
            for (int g = 0; g < num_groups; ++g) {
                cost = std::max(cost, std::abs(est.values[perm[g]] - truth.values[g]));
            }
            if (cost < best) {
                best = cost;
                best_perm = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(got.map == best_perm);
    }
}

TEST_CASE("best_permutation: size guard at G > 10") {
    GroupMeans big;
    big.values.assign(11, 0.0);
    for (int g = 0; g < 11; ++g) big.values[g] = g;
    CHECK_THROWS_AS(best_permutation(big, big), SizeError);
    CHECK_THROWS_AS(best_permutation(GroupMeans{{1.0}}, GroupMeans{{1.0, 2.0}}), UsageError);
}

TEST_CASE("best_permutation: G=2 agrees with the sign test") {
    CounterRng rng(73);
    for (int rep = 0; rep < 500; ++rep) {
        GroupMeans truth{{rng.next_uniform() * 4 - 2, rng.next_uniform() * 4 - 2}};
        GroupMeans est{{rng.next_uniform() * 4 - 2, rng.next_uniform() * 4 - 2}};
        if (truth.values[0] == truth.values[1]) continue;
        const double keep = std::max(std::abs(est.values[0] - truth.values[0]),
                                     std::abs(est.values[1] - truth.values[1]));
        const double swap = std::max(std::abs(est.values[0] - truth.values[1]),
                                     std::abs(est.values[1] - truth.values[0]));
        const GroupPermutation p = best_permutation(est, truth);
        if (swap < keep) {
            CHECK(p.map == std::vector<int>{1, 0});
        } else {
            CHECK(p.map == std::vector<int>{0, 1});  // ties keep the identity
        }
    }
}

TEST_CASE("classification_errors: trivial counts and the I/Ic split") {
    const GroupAssignment g_hat{{0, 0, 1, 1}};
    const std::vector<int> g0 = {0, 0, 1, 1};
    const GroupPermutation identity{{0, 1}};

    ClassificationCounts counts = classification_errors(g_hat, g0, identity, {0, 1, 2, 3});
    CHECK(counts.total == 0);
    CHECK(counts.in_i == 0);
    CHECK(counts.in_ic == 0);

    // one flipped unit inside I
    const GroupAssignment flipped{{0, 1, 1, 1}};
    counts = classification_errors(flipped, g0, identity, {0, 1, 2, 3});
    CHECK(counts.total == 1);
    CHECK(counts.in_i == 1);
    CHECK(counts.in_ic == 0);

    // same flip with unit 1 outside I
    counts = classification_errors(flipped, g0, identity, {0, 2, 3});
    CHECK(counts.total == 1);
    CHECK(counts.in_i == 0);
    CHECK(counts.in_ic == 1);

    CHECK_THROWS_AS(classification_errors(GroupAssignment{{0}}, g0, identity, {}), UsageError);
}

TEST_CASE("classification_errors: random labels misclassify about half") {
    CounterRng rng(79);
    const int n = 1000;
    GroupAssignment g_hat;
    std::vector<int> g0;
    for (int i = 0; i < n; ++i) {
        g_hat.labels.push_back(static_cast<int>(rng.next_u64() % 2));
        g0.push_back(static_cast<int>(rng.next_u64() % 2));
    }
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    const ClassificationCounts counts =
        classification_errors(g_hat, g0, GroupPermutation{{0, 1}}, all);
    // binomial(1000, 1/2): 4 sigma is ~63
    CHECK(std::abs(counts.total - 500) <= 64);
    CHECK(counts.total == counts.in_i + counts.in_ic);
}

TEST_CASE("scaled_mu_errors: arithmetic") {
    CHECK(scaled_mu_errors({1.0, 5.0}, {1.0, 5.0}, 100, 100) == std::vector<double>{0.0, 0.0});
    const std::vector<double> scaled = scaled_mu_errors({1.01}, {1.0}, 100, 100);
    CHECK(scaled[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("alignment report: relabeling the truth leaves metrics unchanged") {
    CounterRng rng(83);
    for (int rep = 0; rep < 50; ++rep) {
        const int num_groups = 3;
        const int n = 30;
        GroupMeans truth{{-2.0, 0.5, 3.0}};
        GroupMeans est{{0.45, 3.2, -1.9}};
        std::vector<int> g0;
        GroupAssignment g_hat;
        for (int i = 0; i < n; ++i) {
            g0.push_back(static_cast<int>(rng.next_u64() % num_groups));
            g_hat.labels.push_back(static_cast<int>(rng.next_u64() % num_groups));
        }
        std::vector<int> i_set;
        for (int i = 0; i < n; ++i) {
            if (rng.next_uniform() < 0.7) i_set.push_back(i);
        }

        const AlignmentReport base = align(est, g_hat, truth, g0, i_set);

        // apply a fixed relabeling to the truth side
        const int relab[3] = {1, 2, 0};
        GroupMeans truth2;
        truth2.values.resize(num_groups);
        for (int g = 0; g < num_groups; ++g) truth2.values[relab[g]] = truth.values[g];
        std::vector<int> g0_2;
        for (int lab : g0) g0_2.push_back(relab[lab]);

        const AlignmentReport moved = align(est, g_hat, truth2, g0_2, i_set);
        CHECK(moved.max_mu_error == doctest::Approx(base.max_mu_error).epsilon(1e-15));
        CHECK(moved.misclassified_total == base.misclassified_total);
        CHECK(moved.misclassified_in_i == base.misclassified_in_i);
        CHECK(moved.misclassified_in_ic == base.misclassified_in_ic);
    }
}
