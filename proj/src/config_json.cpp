#include "gpanel/config_json.hpp"

#include <string>

#include "gpanel/csv.hpp"
#include "gpanel/errors.hpp"

namespace gpanel {

namespace {

using nlohmann::json;

const json& need(const json& j, const char* key, const char* what) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw ConfigError(std::string(what) + ": missing field '" + key + "'");
    }
    return *it;
}

SigmaSchedule sigma_from_json(const json& j) {
    const std::string type = need(j, "type", "sigma").get<std::string>();
    if (type == "constant") {
        return SigmaConstant{need(j, "value", "sigma").get<double>()};
    }
    if (type == "per_unit") {
        return SigmaPerUnit{need(j, "values", "sigma").get<std::vector<double>>()};
    }
    if (type == "diverging") {
        SigmaDiverging s;
        s.base = need(j, "base", "sigma").get<double>();
        s.divergent_count = need(j, "divergent_count", "sigma").get<int>();
        s.divergent_scale = need(j, "divergent_scale", "sigma").get<double>();
        return s;
    }
    throw ConfigError("sigma: unknown type '" + type + "'");
}

json sigma_to_json(const SigmaSchedule& sigma) {
    json j;
    if (const auto* c = std::get_if<SigmaConstant>(&sigma)) {
        j["type"] = "constant";
        j["value"] = c->value;
    } else if (const auto* p = std::get_if<SigmaPerUnit>(&sigma)) {
        j["type"] = "per_unit";
        j["values"] = p->values;
    } else if (const auto* d = std::get_if<SigmaDiverging>(&sigma)) {
        j["type"] = "diverging";
        j["base"] = d->base;
        j["divergent_count"] = d->divergent_count;
        j["divergent_scale"] = d->divergent_scale;
    }
    return j;
}

ErrorLaw law_from_json(const json& j) {
    const std::string type = need(j, "type", "error_law").get<std::string>();
    if (type == "standard_normal") return LawStandardNormal{};
    if (type == "poisson") return LawPoisson{need(j, "lambda", "error_law").get<double>()};
    if (type == "chi_squared") return LawChiSquared{need(j, "k", "error_law").get<int>()};
    if (type == "rademacher") return LawRademacher{};
    throw ConfigError("error_law: unknown type '" + type + "'");
}

json law_to_json(const ErrorLaw& law) {
    json j;
    if (std::holds_alternative<LawStandardNormal>(law)) {
        j["type"] = "standard_normal";
    } else if (const auto* p = std::get_if<LawPoisson>(&law)) {
        j["type"] = "poisson";
        j["lambda"] = p->lambda;
    } else if (const auto* c = std::get_if<LawChiSquared>(&law)) {
        j["type"] = "chi_squared";
        j["k"] = c->k;
    } else {
        j["type"] = "rademacher";
    }
    return j;
}

InitStrategy init_from_string(const std::string& s) {
    if (s == "random") return InitStrategy::random_assignment;
    if (s == "spread") return InitStrategy::spread_seeding;
    if (s == "interleaved") return InitStrategy::interleaved;
    throw ConfigError("fit.init: expected random|spread|interleaved, got '" + s + "'");
}

std::string init_to_string(InitStrategy s) {
    switch (s) {
        case InitStrategy::random_assignment: return "random";
        case InitStrategy::spread_seeding: return "spread";
        case InitStrategy::interleaved: return "interleaved";
    }
    return "interleaved";
}

FitOptions fit_from_json(const json& j) {
    FitOptions fit;
    if (j.contains("restarts")) fit.restarts = j.at("restarts").get<int>();
    if (j.contains("max_iterations")) fit.max_iterations = j.at("max_iterations").get<int>();
    if (j.contains("box_halfwidth")) fit.box_halfwidth = j.at("box_halfwidth").get<double>();
    if (j.contains("init")) fit.init = init_from_string(j.at("init").get<std::string>());
    return fit;
}

json fit_to_json(const FitOptions& fit) {
    json j;
    j["restarts"] = fit.restarts;
    j["max_iterations"] = fit.max_iterations;
    if (fit.box_halfwidth) j["box_halfwidth"] = *fit.box_halfwidth;
    j["init"] = init_to_string(fit.init);
    return j;
}

}  // namespace

DgpConfig dgp_config_from_json(const json& j) {
    try {
        DgpConfig config;
        config.num_groups = need(j, "num_groups", "DgpConfig").get<int>();
        config.mu0 = need(j, "mu0", "DgpConfig").get<std::vector<double>>();
        config.group_proportions =
            need(j, "group_proportions", "DgpConfig").get<std::vector<double>>();
        config.sigma = sigma_from_json(need(j, "sigma", "DgpConfig"));
        config.error_law = law_from_json(need(j, "error_law", "DgpConfig"));
        if (j.contains("n")) config.n = j.at("n").get<int>();
        if (j.contains("t")) config.t = j.at("t").get<int>();
        return config;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("DgpConfig: ") + e.what());
    }
}

json dgp_config_to_json(const DgpConfig& config) {
    json j;
    j["num_groups"] = config.num_groups;
    j["mu0"] = config.mu0;
    j["group_proportions"] = config.group_proportions;
    j["sigma"] = sigma_to_json(config.sigma);
    j["error_law"] = law_to_json(config.error_law);
    j["n"] = config.n;
    j["t"] = config.t;
    return j;
}

McConfig mc_config_from_json(const json& j) {
    try {
        McConfig cfg;
        cfg.design = dgp_config_from_json(need(j, "design", "McConfig"));
        for (const auto& point : need(j, "grid", "McConfig")) {
            if (!point.is_array() || point.size() != 2) {
                throw ConfigError("McConfig: grid entries must be [N, T] pairs");
            }
            cfg.grid.emplace_back(point[0].get<int>(), point[1].get<int>());
        }
        cfg.replications = need(j, "replications", "McConfig").get<int>();
        if (j.contains("fit")) cfg.fit = fit_from_json(j.at("fit"));
        if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
        cfg.base_seed = need(j, "base_seed", "McConfig").get<std::uint64_t>();
        if (j.contains("mg_source")) {
            const std::string src = j.at("mg_source").get<std::string>();
            if (src == "truth") {
                cfg.mg_source = MgSource::truth;
            } else if (src == "estimated") {
                cfg.mg_source = MgSource::estimated;
            } else {
                throw ConfigError("McConfig: mg_source must be truth|estimated");
            }
        }
        if (j.contains("checks")) {
            const json& c = j.at("checks");
            McChecks& out = cfg.checks;
            if (c.contains("slope_min")) out.slope_min = c.at("slope_min").get<double>();
            if (c.contains("slope_max")) out.slope_max = c.at("slope_max").get<double>();
            if (c.contains("coverage_min")) out.coverage_min = c.at("coverage_min").get<double>();
            if (c.contains("coverage_max")) out.coverage_max = c.at("coverage_max").get<double>();
            if (c.contains("mean_scaled_zscore_max")) {
                out.mean_scaled_zscore_max = c.at("mean_scaled_zscore_max").get<double>();
            }
            if (c.contains("eq3_lhs_expected")) {
                out.eq3_lhs_expected = c.at("eq3_lhs_expected").get<double>();
            }
            if (c.contains("eq3_lhs_tol")) out.eq3_lhs_tol = c.at("eq3_lhs_tol").get<double>();
            if (c.contains("misclass_in_i_zero_frac_min")) {
                out.misclass_in_i_zero_frac_min = c.at("misclass_in_i_zero_frac_min").get<double>();
            }
            if (c.contains("p_any_misclass_nonincreasing")) {
                out.p_any_misclass_nonincreasing =
                    c.at("p_any_misclass_nonincreasing").get<bool>();
            }
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("McConfig: ") + e.what());
    }
}

json mc_config_to_json(const McConfig& cfg) {
    json j;
    j["design"] = dgp_config_to_json(cfg.design);
    json grid = json::array();
    for (const auto& [n, t] : cfg.grid) grid.push_back(json::array({n, t}));
    j["grid"] = grid;
    j["replications"] = cfg.replications;
    j["fit"] = fit_to_json(cfg.fit);
    j["alpha"] = cfg.alpha;
    j["base_seed"] = cfg.base_seed;
    j["mg_source"] = (cfg.mg_source == MgSource::truth) ? "truth" : "estimated";
    return j;
}

namespace {

json parse_json_file(const std::string& path, const char* what) {
    const std::string text = read_text_file(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw ConfigError(std::string(what) + ": '" + path + "' is not valid JSON");
    }
    return j;
}

}  // namespace

DgpConfig load_dgp_config(const std::string& path) {
    return dgp_config_from_json(parse_json_file(path, "DgpConfig"));
}

McConfig load_mc_config(const std::string& path) {
    return mc_config_from_json(parse_json_file(path, "McConfig"));
}

}  // namespace gpanel
