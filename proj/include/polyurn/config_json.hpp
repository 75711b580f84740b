#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "polyurn/experiment.hpp"

namespace polyurn {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void reject_unknown_keys(const json& obj, const std::string& where,
                                std::initializer_list<const char*> accepted) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* k : accepted) known = known || key == k;
        if (!known) {
            std::string list;
            for (const char* k : accepted) {
                if (!list.empty()) list += ", ";
                list += k;
            }
            throw ConfigError("unknown key '" + key + "' in " + where + " (accepted: " + list +
                              ")");
        }
    }
}

template <typename T>
T require(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

template <typename T>
T optional_or(const json& obj, const std::string& where, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Growth families
// ---------------------------------------------------------------------------

inline json to_json(const GrowthFamily& f) {
    json j;
    switch (f.kind) {
        case GrowthKind::Power:
            j["family"] = "power";
            j["alpha"] = f.alpha;
            break;
        case GrowthKind::PowerLog:
            j["family"] = "power_log";
            j["alpha"] = f.alpha;
            j["beta"] = f.beta;
            break;
        case GrowthKind::Exp:
            j["family"] = "exp";
            j["gamma"] = f.gamma;
            break;
    }
    j["scale"] = f.scale;
    return j;
}

inline GrowthFamily growth_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::string family = detail::require<std::string>(j, where, "family");
    GrowthFamily f;
    if (family == "power") {
        detail::reject_unknown_keys(j, where, {"family", "alpha", "scale"});
        f = GrowthFamily::power(detail::require<double>(j, where, "alpha"),
                                detail::optional_or<double>(j, where, "scale", 1.0));
    } else if (family == "power_log") {
        detail::reject_unknown_keys(j, where, {"family", "alpha", "beta", "scale"});
        f = GrowthFamily::power_log(detail::require<double>(j, where, "alpha"),
                                    detail::require<double>(j, where, "beta"),
                                    detail::optional_or<double>(j, where, "scale", 1.0));
    } else if (family == "exp") {
        detail::reject_unknown_keys(j, where, {"family", "gamma", "scale"});
        f = GrowthFamily::exponential(detail::require<double>(j, where, "gamma"),
                                      detail::optional_or<double>(j, where, "scale", 1.0));
    } else {
        throw ConfigError(where + ".family: '" + family +
                          "' is not one of power, power_log, exp");
    }
    try {
        f.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return f;
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

inline json to_json(const KernelSpec& k) {
    json j;
    switch (k.variant) {
        case KernelVariant::Zero:
            j["variant"] = "zero";
            break;
        case KernelVariant::Recency:
            j["variant"] = "recency";
            break;
        case KernelVariant::ExpDiscount:
            j["variant"] = "exp_discount";
            if (k.per_particle_betas)
                j["betas"] = {(*k.per_particle_betas)[0], (*k.per_particle_betas)[1]};
            else
                j["beta"] = k.beta;
            if (k.base != kEulerE) j["base"] = k.base;
            break;
    }
    return j;
}

inline KernelSpec kernel_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::string variant = detail::require<std::string>(j, where, "variant");
    if (variant == "zero") {
        detail::reject_unknown_keys(j, where, {"variant"});
        return KernelSpec::zero();
    }
    if (variant == "recency") {
        detail::reject_unknown_keys(j, where, {"variant"});
        return KernelSpec::recency();
    }
    if (variant == "exp_discount") {
        detail::reject_unknown_keys(j, where, {"variant", "beta", "betas", "base"});
        const double base = detail::optional_or<double>(j, where, "base", kEulerE);
        if (j.contains("betas")) {
            const auto betas = detail::require<std::vector<double>>(j, where, "betas");
            if (betas.size() != 2)
                throw ConfigError(where + ".betas: expected exactly 2 rates");
            return KernelSpec::exp_discount_asymmetric(betas[0], betas[1], base);
        }
        return KernelSpec::exp_discount(detail::require<double>(j, where, "beta"), base);
    }
    throw ConfigError(where + ".variant: '" + variant +
                      "' is not one of zero, exp_discount, recency");
}

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

inline json to_json(const ReinforcementProvider& provider) {
    json j;
    if (const auto* f = std::get_if<FunctionUrnProvider>(&provider)) {
        j["type"] = "function";
        j["g_white"] = to_json(f->g_white);
        j["g_red"] = to_json(f->g_red);
    } else if (const auto* p = std::get_if<PsiUrnProvider>(&provider)) {
        j["type"] = "psi";
        j["psi"] = to_json(p->psi);
        j["transition"] = p->transition;
        j["initial_chain_state"] = p->initial_chain_state;
        j["g_white"] = p->g_white;
        j["g_red"] = p->g_red;
        j["theta_coeff"] = p->theta_coeff;
    } else if (const auto* l = std::get_if<LongestRunProvider>(&provider)) {
        j["type"] = "longest_run";
        j["alpha"] = l->alpha;
        j["lambda"] = l->run_bonus;
    }
    return j;
}

inline ReinforcementProvider provider_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::string type = detail::require<std::string>(j, where, "type");
    ReinforcementProvider provider;
    if (type == "function") {
        detail::reject_unknown_keys(j, where, {"type", "g_white", "g_red"});
        FunctionUrnProvider f;
        f.g_white = growth_from_json(detail::require<json>(j, where, "g_white"), where + ".g_white");
        f.g_red = j.contains("g_red")
                      ? growth_from_json(j.at("g_red"), where + ".g_red")
                      : f.g_white;
        provider = f;
    } else if (type == "psi") {
        detail::reject_unknown_keys(j, where,
                                    {"type", "psi", "transition", "initial_chain_state", "g_white",
                                     "g_red", "theta_coeff"});
        PsiUrnProvider p;
        p.psi = growth_from_json(detail::require<json>(j, where, "psi"), where + ".psi");
        p.transition = detail::require<std::vector<std::vector<double>>>(j, where, "transition");
        p.initial_chain_state = detail::optional_or<int>(j, where, "initial_chain_state", 0);
        p.chain_state = p.initial_chain_state;
        p.g_white = detail::require<std::vector<double>>(j, where, "g_white");
        p.g_red = detail::require<std::vector<double>>(j, where, "g_red");
        p.theta_coeff = detail::optional_or<double>(j, where, "theta_coeff", 0.45);
        provider = p;
    } else if (type == "longest_run") {
        detail::reject_unknown_keys(j, where, {"type", "alpha", "lambda"});
        LongestRunProvider l;
        l.alpha = detail::require<double>(j, where, "alpha");
        l.run_bonus = detail::optional_or<double>(j, where, "lambda", 1.0);
        provider = l;
    } else {
        throw ConfigError(where + ".type: '" + type +
                          "' is not one of function, psi, longest_run");
    }
    try {
        validate_provider(provider);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return provider;
}

// ---------------------------------------------------------------------------
// Experiment configs
// ---------------------------------------------------------------------------

inline json to_json(const WalkConfig& w) {
    json j;
    j["vertices"] = w.vertices;
    j["particles"] = w.particles;
    j["alpha"] = w.alpha;
    if (!w.initial_positions.empty()) j["initial_positions"] = w.initial_positions;
    if (w.initial_weights) {
        std::vector<std::vector<std::int64_t>> rows;
        for (int r = 0; r < w.initial_weights->rows(); ++r) {
            rows.emplace_back();
            for (int c = 0; c < w.initial_weights->cols(); ++c)
                rows.back().push_back((*w.initial_weights)(r, c));
        }
        j["initial_weights"] = rows;
    }
    j["kernel"] = to_json(w.kernel);
    return j;
}

inline WalkConfig walk_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    detail::reject_unknown_keys(j, where,
                                {"vertices", "particles", "alpha", "initial_positions",
                                 "initial_weights", "kernel"});
    WalkConfig w;
    w.vertices = detail::require<int>(j, where, "vertices");
    w.particles = detail::require<int>(j, where, "particles");
    w.alpha = detail::require<double>(j, where, "alpha");
    w.initial_positions =
        detail::optional_or<std::vector<int>>(j, where, "initial_positions", {});
    if (j.contains("initial_weights")) {
        const auto rows =
            detail::require<std::vector<std::vector<std::int64_t>>>(j, where, "initial_weights");
        Table<std::int64_t> t(static_cast<int>(rows.size()),
                              rows.empty() ? 0 : static_cast<int>(rows[0].size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<int>(rows[r].size()) != t.cols())
                throw ConfigError(where + ".initial_weights: ragged rows");
            for (std::size_t c = 0; c < rows[r].size(); ++c)
                t(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
        }
        w.initial_weights = t;
    }
    w.kernel = kernel_from_json(detail::require<json>(j, where, "kernel"), where + ".kernel");
    try {
        w.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return w;
}

inline json to_json(const ExperimentConfig& c) {
    json j;
    switch (c.kind) {
        case ExperimentKind::Walk:
            j["kind"] = "walk";
            j["walk"] = to_json(*c.walk);
            break;
        case ExperimentKind::Urn: {
            j["kind"] = "urn";
            json u;
            u["provider"] = to_json(c.urn->provider);
            u["start"] = {c.urn->start[0], c.urn->start[1]};
            j["urn"] = u;
            break;
        }
        case ExperimentKind::Verify:
            j["kind"] = "verify";
            break;
    }
    j["replicas"] = c.replicas;
    j["horizon"] = c.horizon;
    if (!c.windows.empty()) j["windows"] = c.windows;
    j["base_seed"] = c.base_seed;
    if (!c.output_path.empty() || c.format != OutputFormat::Csv) {
        json out;
        out["path"] = c.output_path;
        out["format"] = c.format == OutputFormat::Csv ? "csv" : "json";
        j["output"] = out;
    }
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    detail::reject_unknown_keys(j, "config",
                                {"kind", "walk", "urn", "replicas", "horizon", "windows",
                                 "base_seed", "output"});
    ExperimentConfig c;
    const std::string kind = detail::require<std::string>(j, "config", "kind");
    if (kind == "walk")
        c.kind = ExperimentKind::Walk;
    else if (kind == "urn")
        c.kind = ExperimentKind::Urn;
    else if (kind == "verify")
        c.kind = ExperimentKind::Verify;
    else
        throw ConfigError("config.kind: '" + kind + "' is not one of walk, urn, verify");

    c.replicas = detail::optional_or<std::int64_t>(j, "config", "replicas", 1);
    c.horizon = detail::optional_or<std::int64_t>(j, "config", "horizon", 0);
    c.windows = detail::optional_or<std::vector<std::int64_t>>(j, "config", "windows", {});
    c.base_seed = detail::optional_or<std::uint64_t>(j, "config", "base_seed", 0);

    if (j.contains("output")) {
        const json& out = j.at("output");
        detail::reject_unknown_keys(out, "config.output", {"path", "format"});
        c.output_path = detail::optional_or<std::string>(out, "config.output", "path", "");
        const std::string fmt =
            detail::optional_or<std::string>(out, "config.output", "format", "csv");
        if (fmt == "csv")
            c.format = OutputFormat::Csv;
        else if (fmt == "json")
            c.format = OutputFormat::Json;
        else
            throw ConfigError("config.output.format: '" + fmt + "' is not one of csv, json");
    }

    if (c.kind == ExperimentKind::Walk) {
        c.walk = walk_from_json(detail::require<json>(j, "config", "walk"), "walk");
        if (j.contains("urn")) throw ConfigError("config: kind=walk cannot carry an urn section");
    } else if (c.kind == ExperimentKind::Urn) {
        if (j.contains("walk")) throw ConfigError("config: kind=urn cannot carry a walk section");
        const json& u = detail::require<json>(j, "config", "urn");
        detail::reject_unknown_keys(u, "urn", {"provider", "start"});
        UrnExperimentConfig uc;
        uc.provider = provider_from_json(detail::require<json>(u, "urn", "provider"),
                                         "urn.provider");
        const auto start = detail::require<std::vector<std::int64_t>>(u, "urn", "start");
        if (start.size() != 2) throw ConfigError("urn.start: expected [white, red]");
        uc.start = {start[0], start[1]};
        c.urn = uc;
    }

    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

inline std::string serialize_config(const ExperimentConfig& c) {
    return to_json(c).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Result JSON
// ---------------------------------------------------------------------------

inline json result_to_json(const ExperimentResult& result) {
    json j;
    const ExperimentConfig& cfg = result.config;
    j["kind"] = cfg.kind == ExperimentKind::Walk ? "walk" : "urn";
    j["replicas"] = cfg.replicas;
    j["horizon"] = cfg.horizon;
    j["base_seed"] = cfg.base_seed;

    json rows = json::array();
    if (cfg.kind == ExperimentKind::Walk) {
        for (const auto& rep : result.walk_replicas)
            for (std::size_t wi = 0; wi < cfg.windows.size(); ++wi)
                for (std::size_t p = 0; p < rep.per_window[wi].particles.size(); ++p) {
                    const auto& loc = rep.per_window[wi].particles[p];
                    json row;
                    row["replica"] = rep.replica;
                    row["window"] = cfg.windows[wi];
                    row["particle"] = p;
                    row["localized"] = loc.localized;
                    row["edge"] = loc.edge;
                    row["onset"] = loc.onset;
                    row["max_kernel_value"] = rep.max_kernel_value;
                    rows.push_back(row);
                }
        json kernel;
        kernel["bound"] = result.kernel_bound;
        kernel["max_value"] = result.max_kernel_value;
        kernel["violations"] = result.kernel_bound_violations;
        j["kernel"] = kernel;
    } else {
        for (const auto& rep : result.urn_replicas)
            for (std::size_t wi = 0; wi < cfg.windows.size(); ++wi) {
                json row;
                row["replica"] = rep.replica;
                row["window"] = cfg.windows[wi];
                row["tail_color"] = color_name(rep.tail_per_window[wi]);
                row["tail_onset"] = rep.tail_onset;
                row["last_pick_white"] = rep.last_pick[0];
                row["last_pick_red"] = rep.last_pick[1];
                row["tail_sum_sq_white"] = rep.squared_weight_tail[0];
                row["tail_sum_sq_red"] = rep.squared_weight_tail[1];
                row["log_gap_crossings"] = rep.crossings;
                row["theta_clamps"] = rep.theta_clamps;
                rows.push_back(row);
            }
    }
    j["rows"] = rows;

    json aggregates = json::array();
    for (const auto& agg : result.aggregates) {
        json a;
        a["window"] = agg.window;
        a["particle"] = agg.particle < 0 ? json("all") : json(agg.particle);
        a["successes"] = agg.successes;
        a["replicas"] = agg.replicas;
        a["fraction"] = agg.ci.fraction;
        a["ci_lo"] = agg.ci.lo;
        a["ci_hi"] = agg.ci.hi;
        a["mean_onset"] = agg.mean_onset;
        aggregates.push_back(a);
    }
    j["aggregates"] = aggregates;
    return j;
}

inline void write_result(const ExperimentResult& result, std::ostream& os) {
    if (result.config.format == OutputFormat::Json)
        os << result_to_json(result).dump(2) << "\n";
    else
        write_result_csv(result, os);
}

}  // namespace polyurn
