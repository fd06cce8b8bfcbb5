#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "gpanel/rng.hpp"

namespace gpanel {

// ---------------------------------------------------------------------------
// Error laws. Every variant is standardized to mean 0 and variance 1.

struct LawStandardNormal {};

// (X - lambda)/sqrt(lambda) with X ~ Poisson(lambda).
struct LawPoisson {
    double lambda = 1.0;
};

// (X - k)/sqrt(2k) with X ~ chi-squared(k).
struct LawChiSquared {
    int k = 1;
};

// -1 or +1 with equal probability.
struct LawRademacher {};

using ErrorLaw = std::variant<LawStandardNormal, LawPoisson, LawChiSquared, LawRademacher>;

// One standardized draw, consuming as many uniforms from rng as the law
// needs. Pure function of (law, rng key, rng position).
double draw_standardized(const ErrorLaw& law, CounterRng& rng);

// ---------------------------------------------------------------------------
// Noise-scale schedules.

struct SigmaConstant {
    double value = 1.0;
};

struct SigmaPerUnit {
    std::vector<double> values;
};

// First n - divergent_count units get `base`; the last divergent_count units
// get divergent_scale * sqrt(T), a rate that outruns the classification
// threshold for every N >= 3 once divergent_scale is at least gap/140.
struct SigmaDiverging {
    double base = 1.0;
    int divergent_count = 0;
    double divergent_scale = 1.0;
};

using SigmaSchedule = std::variant<SigmaConstant, SigmaPerUnit, SigmaDiverging>;

// ---------------------------------------------------------------------------

struct DgpConfig {
    int num_groups = 2;
    std::vector<double> mu0;                 // true group means, length num_groups
    std::vector<double> group_proportions;   // strictly positive, sums to 1
    SigmaSchedule sigma = SigmaConstant{};
    ErrorLaw error_law = LawStandardNormal{};
    int n = 0;
    int t = 0;

    // Throws ConfigError naming the violated invariant.
    void validate() const;

    // Deterministic quota assignment: unit i (0-based) gets the group whose
    // cumulative proportion boundary floor(N * sum_{h<=g} p_h) it falls
    // under. Guarantees |N_g - N*p_g| <= 1 in every panel.
    std::vector<int> quota_assignment() const;

    // Per-unit noise scales implied by the schedule.
    std::vector<double> sigma_vector() const;

    // Minimal pairwise gap between true group means.
    double min_gap() const;
};

struct PanelData {
    int n = 0;
    int t = 0;
    std::vector<double> y;  // row-major, y[i*t + s]

    std::optional<std::vector<int>> g0;        // true labels, 0-based
    std::optional<std::vector<double>> mu0;    // true group means
    std::optional<std::vector<double>> sigma;  // true per-unit scales

    double at(int unit, int time) const {
        return y[static_cast<std::size_t>(unit) * t + time];
    }
    bool has_truth() const { return g0.has_value(); }
};

// y_it = mu0[g0_i] + sigma_i * v_it. Bit-identical for identical
// (config, seed); the draw for cell (i,t) does not depend on N or T.
PanelData generate_panel(const DgpConfig& config, std::uint64_t seed);

// (M_G/140) * sqrt(T / log N). Throws UsageError for N < 2 or M_G <= 0.
double sigma_threshold(double m_g, int n, int t);

struct UnitSplit {
    std::vector<int> i_set;   // sigma_i <= threshold (boundary inclusive)
    std::vector<int> ic_set;  // complement
};

UnitSplit classify_units(const std::vector<double>& sigma, double threshold);

// Left side of the misclassification budget for a given complement set:
// (#Ic/N) * max{ sqrt(NT), sqrt(N * mean_{i in Ic} sigma_i^2) }, and 0 for
// an empty complement.
double eq3_lhs(int n, int t, const std::vector<double>& sigma, const std::vector<int>& ic_set);

struct DesignDiagnostics {
    double sigma_threshold = 0.0;
    std::vector<int> i_set;
    std::vector<int> ic_set;
    double eq3_lhs = 0.0;
    double avg_variance_over_t = 0.0;     // (N^-1 sum sigma_i^2) / T
    double min_group_gap = 0.0;
    double min_group_share = 0.0;         // min_g N_g / N under quota assignment
    double asymptotic_seq_value = 0.0;    // (log T) sqrt(log N) / sqrt(T)
};

DesignDiagnostics design_diagnostics(const DgpConfig& config, double m_g);

}  // namespace gpanel
