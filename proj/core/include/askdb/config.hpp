#pragma once

#include <map>
#include <optional>
#include <string>

#include "askdb/clock.hpp"
#include "askdb/domain.hpp"
#include "askdb/executor.hpp"
#include "askdb/guardrail.hpp"
#include "askdb/schema.hpp"

namespace askdb {

struct ClockConfig {
    std::string kind = "system";  // "system" or "fixed"
    std::optional<Timestamp> instant;
};

struct ProviderConfig {
    std::string kind = "scripted";  // "scripted" or "live"
    std::string scenario_path;      // scripted
    std::string endpoint;           // live
    std::string model_name;         // live
    std::string api_key;            // live; ${ENV:THOR_LLM_API_KEY} interpolated
};

struct ServiceConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;
};

struct EngineConfig {
    std::map<std::string, DatasourceConfig> datasources;
    std::map<std::string, CatalogAnnotations> annotations;  // per datasource id
    ProviderConfig provider;
    GuardrailPolicy policy = GuardrailPolicy::defaults();
    EngineConstants constants;
    ServiceConfig service;
    ClockConfig clock;
    std::string audit_journal = "askdb_audit.jsonl";
    std::string verbosity = "concise";
};

// INI-style declarative file: "[section]" / "[section arg]" headers,
// "key = value" entries, full-line comments with '#' or ';'. Environment
// interpolation "${ENV:NAME}" is allowed for the provider api_key only.
// Violated invariants (scripted without scenario_path, live without endpoint
// and model, attempts/conversion constant overrides) throw ConfigError.
EngineConfig parse_config_text(const std::string& text, const std::string& source_name);
EngineConfig load_config_file(const std::string& path);

}  // namespace askdb
