#include "gpanel/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpanel/errors.hpp"
#include "gpanel/normal.hpp"
#include "gpanel/numeric.hpp"

namespace gpanel {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Poisson inversion by sequential search; a single uniform per draw.
long long poisson_draw(double lambda, double u) {
    double prob = std::exp(-lambda);
    double cum = prob;
    long long k = 0;
    while (u > cum) {
        ++k;
        prob *= lambda / static_cast<double>(k);
        cum += prob;
        if (prob <= 0.0 || k > 100000000LL) break;  // cdf saturated in doubles
    }
    return k;
}

}  // namespace

double draw_standardized(const ErrorLaw& law, CounterRng& rng) {
    return std::visit(
        overloaded{
            [&](const LawStandardNormal&) { return normal_quantile(rng.next_uniform()); },
            [&](const LawPoisson& p) {
                const long long x = poisson_draw(p.lambda, rng.next_uniform());
                return (static_cast<double>(x) - p.lambda) / std::sqrt(p.lambda);
            },
            [&](const LawChiSquared& c) {
                double x = 0.0;
                for (int j = 0; j < c.k; ++j) {
                    const double z = normal_quantile(rng.next_uniform());
                    x += z * z;
                }
                return (x - c.k) / std::sqrt(2.0 * c.k);
            },
            [&](const LawRademacher&) { return rng.next_uniform() < 0.5 ? -1.0 : 1.0; },
        },
        law);
}

void DgpConfig::validate() const {
    if (num_groups < 2) throw ConfigError("DgpConfig: num_groups must be >= 2");
    if (n < 2) throw ConfigError("DgpConfig: N must be >= 2");
    if (t < 1) throw ConfigError("DgpConfig: T must be >= 1");
    if (static_cast<int>(mu0.size()) != num_groups) {
        throw ConfigError("DgpConfig: mu0 must have length num_groups");
    }
    if (static_cast<int>(group_proportions.size()) != num_groups) {
        throw ConfigError("DgpConfig: group_proportions must have length num_groups");
    }
    double sum = 0.0;
    for (double p : group_proportions) {
        if (!(p > 0.0)) throw ConfigError("DgpConfig: group proportions must be strictly positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ConfigError("DgpConfig: group proportions must sum to 1 within 1e-12");
    }
    for (int g = 0; g < num_groups; ++g) {
        if (!std::isfinite(mu0[g])) throw ConfigError("DgpConfig: mu0 entries must be finite");
        for (int h = g + 1; h < num_groups; ++h) {
            if (std::abs(mu0[g] - mu0[h]) <= 0.0) {
                throw ConfigError("DgpConfig: pairwise gap |mu0_g - mu0_h| must be positive (groups " +
                                  std::to_string(g + 1) + " and " + std::to_string(h + 1) + ")");
            }
        }
    }

    std::visit(overloaded{
                   [](const SigmaConstant& s) {
                       if (!(s.value >= 0.0)) throw ConfigError("DgpConfig: sigma must be >= 0");
                   },
                   [&](const SigmaPerUnit& s) {
                       if (static_cast<int>(s.values.size()) != n) {
                           throw ConfigError("DgpConfig: per-unit sigma must have length N");
                       }
                       for (double v : s.values) {
                           if (!(v >= 0.0)) throw ConfigError("DgpConfig: sigma entries must be >= 0");
                       }
                   },
                   [&](const SigmaDiverging& s) {
                       if (!(s.base >= 0.0)) throw ConfigError("DgpConfig: diverging sigma base must be >= 0");
                       if (s.divergent_count < 0 || s.divergent_count > n) {
                           throw ConfigError("DgpConfig: divergent_count must lie in [0, N]");
                       }
                       if (!(s.divergent_scale > 0.0)) {
                           throw ConfigError("DgpConfig: divergent_scale must be positive");
                       }
                   },
               },
               sigma);

    std::visit(overloaded{
                   [](const LawStandardNormal&) {},
                   [](const LawPoisson& p) {
                       if (!(p.lambda > 0.0)) throw ConfigError("DgpConfig: Poisson lambda must be positive");
                   },
                   [](const LawChiSquared& c) {
                       if (c.k < 1) throw ConfigError("DgpConfig: chi-squared k must be >= 1");
                   },
                   [](const LawRademacher&) {},
               },
               error_law);

    // Quota assignment must give every group at least one unit.
    const std::vector<int> labels = quota_assignment();
    std::vector<int> counts(num_groups, 0);
    for (int lab : labels) ++counts[lab];
    for (int g = 0; g < num_groups; ++g) {
        if (counts[g] == 0) {
            throw ConfigError("DgpConfig: group " + std::to_string(g + 1) +
                              " receives zero units under quota assignment; increase N or its proportion");
        }
    }
}

std::vector<int> DgpConfig::quota_assignment() const {
    std::vector<int> labels(n, num_groups - 1);
    double cum = 0.0;
    int prev = 0;
    for (int g = 0; g < num_groups; ++g) {
        cum += group_proportions[g];
        int boundary = (g == num_groups - 1)
                           ? n
                           : static_cast<int>(std::floor(static_cast<double>(n) * cum + 1e-9));
        boundary = std::clamp(boundary, prev, n);
        for (int i = prev; i < boundary; ++i) labels[i] = g;
        prev = boundary;
    }
    return labels;
}

std::vector<double> DgpConfig::sigma_vector() const {
    return std::visit(overloaded{
                          [&](const SigmaConstant& s) { return std::vector<double>(n, s.value); },
                          [&](const SigmaPerUnit& s) { return s.values; },
                          [&](const SigmaDiverging& s) {
                              std::vector<double> out(n, s.base);
                              const double diverging = s.divergent_scale * std::sqrt(static_cast<double>(t));
                              for (int i = n - s.divergent_count; i < n; ++i) out[i] = diverging;
                              return out;
                          },
                      },
                      sigma);
}

double DgpConfig::min_gap() const {
    return min_pairwise_gap(mu0);
}

PanelData generate_panel(const DgpConfig& config, std::uint64_t seed) {
    config.validate();
    const int n = config.n;
    const int t = config.t;

    PanelData out;
    out.n = n;
    out.t = t;
    out.y.resize(static_cast<std::size_t>(n) * t);
    const std::vector<int> g0 = config.quota_assignment();
    const std::vector<double> sig = config.sigma_vector();

    for (int i = 0; i < n; ++i) {
        const double mu = config.mu0[g0[i]];
        for (int s = 0; s < t; ++s) {
            CounterRng rng(cell_key(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(s)));
            const double v = draw_standardized(config.error_law, rng);
            out.y[static_cast<std::size_t>(i) * t + s] = mu + sig[i] * v;
        }
    }

    out.g0 = g0;
    out.mu0 = config.mu0;
    out.sigma = sig;
    return out;
}

double sigma_threshold(double m_g, int n, int t) {
    if (!(m_g > 0.0)) throw UsageError("sigma_threshold: M_G must be positive");
    if (n < 2) throw UsageError("sigma_threshold: N must be >= 2 so that log N > 0");
    if (t < 1) throw UsageError("sigma_threshold: T must be >= 1");
    return (m_g / 140.0) * std::sqrt(static_cast<double>(t) / std::log(static_cast<double>(n)));
}

UnitSplit classify_units(const std::vector<double>& sigma, double threshold) {
    UnitSplit split;
    for (int i = 0; i < static_cast<int>(sigma.size()); ++i) {
        if (sigma[i] <= threshold) {
            split.i_set.push_back(i);
        } else {
            split.ic_set.push_back(i);
        }
    }
    return split;
}

double eq3_lhs(int n, int t, const std::vector<double>& sigma, const std::vector<int>& ic_set) {
    if (ic_set.empty()) return 0.0;  // trivially satisfied
    NeumaierSum var;
    for (int i : ic_set) var.add(sigma[i] * sigma[i]);
    const double mean_var = var.value() / static_cast<double>(ic_set.size());
    const double nt = static_cast<double>(n) * static_cast<double>(t);
    const double term = std::max(std::sqrt(nt), std::sqrt(static_cast<double>(n) * mean_var));
    return (static_cast<double>(ic_set.size()) / static_cast<double>(n)) * term;
}

DesignDiagnostics design_diagnostics(const DgpConfig& config, double m_g) {
    config.validate();
    DesignDiagnostics d;
    const std::vector<double> sig = config.sigma_vector();

    d.sigma_threshold = sigma_threshold(m_g, config.n, config.t);
    UnitSplit split = classify_units(sig, d.sigma_threshold);
    d.eq3_lhs = eq3_lhs(config.n, config.t, sig, split.ic_set);
    d.i_set = std::move(split.i_set);
    d.ic_set = std::move(split.ic_set);

    NeumaierSum var;
    for (double s : sig) var.add(s * s);
    d.avg_variance_over_t = (var.value() / static_cast<double>(config.n)) / static_cast<double>(config.t);

    d.min_group_gap = config.min_gap();

    std::vector<int> counts(config.num_groups, 0);
    for (int lab : config.quota_assignment()) ++counts[lab];
    int min_count = counts[0];
    for (int c : counts) min_count = std::min(min_count, c);
    d.min_group_share = static_cast<double>(min_count) / static_cast<double>(config.n);

    d.asymptotic_seq_value = std::log(static_cast<double>(config.t)) *
                             std::sqrt(std::log(static_cast<double>(config.n))) /
                             std::sqrt(static_cast<double>(config.t));
    return d;
}

}  // namespace gpanel
