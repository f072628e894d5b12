#pragma once

#include "stochheat/lattice_sde.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace stochheat {

using Json = nlohmann::json;

/// Subcommands understood by the runner, in help order.
const std::vector<std::string>& subcommands();

/// Type-checks a flat config against the key table, rejects unknown keys,
/// fills defaults and enforces the keys `subcommand` needs. A run manifest
/// (an object with "subcommand" and "config") is unwrapped first. Every
/// failure is a ConfigError that names the offending key.
Json resolve_config(const Json& raw, const std::string& subcommand);

/// Applies "key=value"; value is parsed as JSON when possible, else taken as
/// a string.
void apply_override(Json& raw, const std::string& assignment);

Json load_json_file(const std::string& path);

// Builders over a resolved config.
DislocationDistribution walk_from_config(const Json& cfg);
CorrelationSpec correlation_from_config(const Json& cfg);
/// Suffix "" reads sigma, lambda, cutoff_n, ...; suffix "2" reads sigma2, lambda2, ...
SigmaSpec sigma_from_config(const Json& cfg, const std::string& suffix = "");
InitialProfile initial_from_config(const Json& cfg, const std::string& key = "u0");
/// Full simulation config; runs SimConfig::validate().
SimConfig sim_config_from(const Json& cfg);

} // namespace stochheat
