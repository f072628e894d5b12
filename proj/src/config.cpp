#include "stochheat/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stochheat {

namespace {

enum class Kind { Number, Integer, String, Numbers, Array };

struct Key {
    const char* name;
    Kind kind;
    Json fallback;  // null: no default
};

const std::vector<Key>& key_table() {
    static const std::vector<Key> keys = {
        // walk
        {"dim", Kind::Integer, 1},
        {"family", Kind::String, "nearest_neighbor"},
        {"alpha", Kind::Number, nullptr},
        {"support_radius", Kind::Integer, 1000},
        {"component_weights", Kind::Numbers, Json::array({1.0})},
        {"mixture", Kind::Array, Json::array()},
        // kernel
        {"nu", Kind::Number, nullptr},
        {"times", Kind::Numbers, Json::array({1.0})},
        {"grid_radius", Kind::Number, 5.0},
        {"grid_points", Kind::Integer, 101},
        // noise
        {"correlation", Kind::String, "riesz"},
        {"beta", Kind::Number, nullptr},
        {"corr_length", Kind::Number, 1.0},
        {"max_clipped_mass", Kind::Number, 1e-6},
        // lattice and solver
        {"epsilon", Kind::Number, 0.25},
        {"torus_n", Kind::Integer, 16},
        {"origin", Kind::Number, 0.0},
        {"sigma", Kind::String, "linear"},
        {"lambda", Kind::Number, 1.0},
        {"cutoff_n", Kind::Number, 1.0},
        {"sigma_base", Kind::String, "linear"},
        {"sigma_table", Kind::Array, Json::array()},
        {"sigma2", Kind::String, "cutoff"},
        {"lambda2", Kind::Number, 1.0},
        {"cutoff_n2", Kind::Number, 1.0},
        {"sigma_base2", Kind::String, "linear"},
        {"sigma_table2", Kind::Array, Json::array()},
        {"u0", Kind::String, "constant"},
        {"u0_value", Kind::Number, 1.0},
        {"u0_slope", Kind::Number, 1.0},
        {"u0_threshold", Kind::Number, 0.0},
        {"u0_width", Kind::Number, 1.0},
        {"v0", Kind::String, "constant"},
        {"v0_value", Kind::Number, 1.0},
        {"v0_slope", Kind::Number, 1.0},
        {"v0_threshold", Kind::Number, 0.0},
        {"v0_width", Kind::Number, 1.0},
        {"dt", Kind::Number, 1e-3},
        {"t_end", Kind::Number, 1.0},
        {"scheme", Kind::String, "splitting"},
        {"sampler", Kind::String, "spectral"},
        {"seed", Kind::Integer, 1},
        {"output_times", Kind::Numbers, Json::array()},
        // studies
        {"replicas", Kind::Integer, 1000},
        {"t", Kind::Number, 1.0},
        {"epsilons", Kind::Numbers, Json::array({0.125, 0.0625, 0.03125, 0.015625})},
        {"window_radius", Kind::Number, 0.0},
        {"wrap_tol", Kind::Number, 1e-8},
        {"a", Kind::Number, -1.0},
        {"levels", Kind::Integer, 3},
        {"order", Kind::Integer, 2},
        {"orders", Kind::Numbers, Json::array({2, 3})},
        {"lambdas", Kind::Numbers, Json::array({0.5, 1.0, 2.0})},
        {"range", Kind::Number, 100.0},
    };
    return keys;
}

const char* kind_name(Kind k) {
    switch (k) {
    case Kind::Number: return "a number";
    case Kind::Integer: return "a nonnegative integer";
    case Kind::String: return "a string";
    case Kind::Numbers: return "an array of numbers";
    case Kind::Array: return "an array";
    }
    return "?";
}

bool matches(const Json& v, Kind k) {
    switch (k) {
    case Kind::Number: return v.is_number();
    case Kind::Integer:
        if (v.is_number_unsigned()) return true;
        if (v.is_number_integer()) return v.get<long long>() >= 0;
        if (v.is_number_float()) {
            const double d = v.get<double>();
            return d >= 0.0 && d == std::floor(d) && d < 9.0e15;
        }
        return false;
    case Kind::String: return v.is_string();
    case Kind::Numbers:
        return v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_number(); });
    case Kind::Array: return v.is_array();
    }
    return false;
}

[[noreturn]] void missing(const std::string& key, const std::string& why) {
    throw ConfigError("missing required key '" + key + "' (" + why + ")");
}

bool uses_noise(const std::string& sub) {
    return sub == "noise" || sub == "simulate" || sub == "oracle" || sub == "converge" || sub == "compare-path" ||
           sub == "compare-moment" || sub == "lyapunov";
}

bool uses_walk(const std::string& sub) { return sub != "kernel" && sub != "noise"; }

double num(const Json& cfg, const char* key) { return cfg.at(key).get<double>(); }

std::size_t count(const Json& cfg, const char* key) {
    return cfg.at(key).get<std::size_t>();
}

} // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> subs = {"kernel",   "walk",         "llt",
                                                  "noise",    "simulate",     "oracle",
                                                  "converge", "compare-path", "compare-moment",
                                                  "lyapunov"};
    return subs;
}

Json resolve_config(const Json& raw_in, const std::string& subcommand) {
    const auto& subs = subcommands();
    if (std::find(subs.begin(), subs.end(), subcommand) == subs.end())
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    if (!raw_in.is_object()) throw ConfigError("config must be a JSON object");
    Json raw = raw_in;
    if (raw.contains("subcommand") && raw.contains("config")) {
        if (raw.at("subcommand") != subcommand)
            throw ConfigError("manifest was written by '" + raw.at("subcommand").get<std::string>() +
                              "', not '" + subcommand + "'");
        raw = raw.at("config");
        if (!raw.is_object()) throw ConfigError("manifest key 'config' must be an object");
    }

    const auto& keys = key_table();
    for (auto it = raw.begin(); it != raw.end(); ++it) {
        const auto k = std::find_if(keys.begin(), keys.end(), [&](const Key& e) { return it.key() == e.name; });
        if (k == keys.end()) throw ConfigError("unknown key '" + it.key() + "'");
        if (!matches(it.value(), k->kind))
            throw ConfigError("key '" + it.key() + "' must be " + kind_name(k->kind));
    }

    Json cfg = Json::object();
    for (const auto& k : keys) {
        if (raw.contains(k.name)) cfg[k.name] = raw.at(k.name);
        else if (!k.fallback.is_null()) cfg[k.name] = k.fallback;
    }
    // Integers are stored as integers so manifests print them that way.
    for (const auto& k : keys)
        if (k.kind == Kind::Integer && cfg.contains(k.name) && cfg[k.name].is_number_float())
            cfg[k.name] = static_cast<std::uint64_t>(std::llround(cfg[k.name].get<double>()));

    const std::string family = cfg.at("family");
    (void)walk_family_from_string(family);
    const bool heavy = walk_family_from_string(family) == WalkFamily::HeavyTail;
    if (subcommand == "kernel" && !cfg.contains("alpha")) missing("alpha", "stability index of the kernel");
    if (uses_walk(subcommand) && heavy && !cfg.contains("alpha"))
        missing("alpha", "tail index of the heavy-tailed walk");
    if (uses_walk(subcommand) && walk_family_from_string(family) == WalkFamily::HeavyTailMixture &&
        cfg.at("mixture").empty())
        missing("mixture", "terms {alpha, weight} of the mixture walk");
    if (uses_noise(subcommand)) {
        const auto corr = correlation_from_string(cfg.at("correlation"));
        if (corr == CorrelationKind::Riesz && !cfg.contains("beta"))
            missing("beta", "Riesz exponent of the noise correlation");
    }
    if (cfg.at("dim").get<int>() < 1) throw ConfigError("key 'dim' must be at least 1");
    if (cfg.at("torus_n").get<std::size_t>() < 1) throw ConfigError("key 'torus_n' must be at least 1");
    if (cfg.at("replicas").get<std::size_t>() < 1) throw ConfigError("key 'replicas' must be at least 1");
    return cfg;
}

void apply_override(Json& raw, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "' must look like key=value");
    const std::string key = assignment.substr(0, eq), value = assignment.substr(eq + 1);
    Json parsed = Json::parse(value, nullptr, false);
    raw[key] = parsed.is_discarded() ? Json(value) : parsed;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

DislocationDistribution walk_from_config(const Json& cfg) {
    const int dim = cfg.at("dim").get<int>();
    const long radius = cfg.at("support_radius").get<long>();
    try {
        const std::string family = cfg.at("family");
        if (family == "nearest_neighbor") return DislocationDistribution::nearest_neighbor(dim);
        switch (walk_family_from_string(family)) {
        case WalkFamily::ProductMoment:
            return DislocationDistribution::product_moment(dim, cfg.at("component_weights").get<std::vector<double>>());
        case WalkFamily::HeavyTail: {
            if (!cfg.contains("alpha")) missing("alpha", "tail index of the heavy-tailed walk");
            const double alpha = num(cfg, "alpha");
            if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("key 'alpha' must lie in (0, 2) for heavy tails");
            return DislocationDistribution::heavy_tail(dim, alpha, radius);
        }
        case WalkFamily::HeavyTailMixture: {
            std::vector<MixtureTerm> terms;
            for (const auto& t : cfg.at("mixture")) {
                if (!t.is_object() || !t.contains("alpha") || !t.contains("weight") || !t.at("alpha").is_number() ||
                    !t.at("weight").is_number())
                    throw ConfigError("key 'mixture' entries must be objects {\"alpha\": x, \"weight\": w}");
                terms.push_back({t.at("alpha").get<double>(), t.at("weight").get<double>()});
            }
            return DislocationDistribution::heavy_tail_mixture(dim, terms, radius);
        }
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("walk: ") + e.what());
    }
    throw ConfigError("unsupported walk family");
}

CorrelationSpec correlation_from_config(const Json& cfg) {
    CorrelationSpec c;
    c.kind = correlation_from_string(cfg.at("correlation"));
    if (cfg.contains("beta")) c.beta = num(cfg, "beta");
    c.length = num(cfg, "corr_length");
    try {
        c.validate(cfg.at("dim").get<int>());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("correlation: ") + e.what());
    }
    return c;
}

SigmaSpec sigma_from_config(const Json& cfg, const std::string& suffix) {
    SigmaSpec s;
    s.kind = sigma_kind_from_string(cfg.at("sigma" + suffix));
    s.lambda = cfg.at("lambda" + suffix).get<double>();
    s.cutoff_n = cfg.at("cutoff_n" + suffix).get<double>();
    s.base = sigma_kind_from_string(cfg.at("sigma_base" + suffix));
    for (const auto& p : cfg.at("sigma_table" + suffix)) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ConfigError("key 'sigma_table" + suffix + "' entries must be [u, sigma] pairs");
        s.table.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    s.validate();
    return s;
}

InitialProfile initial_from_config(const Json& cfg, const std::string& key) {
    InitialProfile u;
    u.kind = initial_kind_from_string(cfg.at(key));
    if (u.kind == InitialKind::Custom) throw ConfigError("key '" + key + "': custom profiles need the library API");
    u.value = cfg.at(key + "_value").get<double>();
    u.slope = cfg.at(key + "_slope").get<double>();
    u.threshold = cfg.at(key + "_threshold").get<double>();
    u.width = cfg.at(key + "_width").get<double>();
    return u;
}

SimConfig sim_config_from(const Json& cfg) {
    SimConfig c;
    c.walk = walk_from_config(cfg);
    c.correlation = correlation_from_config(cfg);
    c.epsilon = num(cfg, "epsilon");
    c.torus_n = count(cfg, "torus_n");
    c.sigma = sigma_from_config(cfg);
    c.u0 = initial_from_config(cfg, "u0");
    c.dt = num(cfg, "dt");
    c.t_end = num(cfg, "t_end");
    c.scheme = scheme_from_string(cfg.at("scheme"));
    const std::string sampler = cfg.at("sampler");
    if (sampler == "spectral") c.sampler = SamplerMode::Spectral;
    else if (sampler == "cholesky") c.sampler = SamplerMode::Cholesky;
    else throw ConfigError("key 'sampler' must be spectral or cholesky");
    c.seed = cfg.at("seed").get<std::uint64_t>();
    c.origin = num(cfg, "origin");
    c.output_times = cfg.at("output_times").get<std::vector<double>>();
    c.validate();
    return c;
}

} // namespace stochheat
