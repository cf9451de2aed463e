#include "askdb/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "askdb/errors.hpp"

namespace askdb {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string current;
    for (char c : value) {
        if (c == ',') {
            std::string item = trim(current);
            if (!item.empty()) out.push_back(std::move(item));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    std::string item = trim(current);
    if (!item.empty()) out.push_back(std::move(item));
    return out;
}

bool parse_bool(const std::string& value, const std::string& key, const std::string& where) {
    if (value == "true" || value == "yes" || value == "on" || value == "1") return true;
    if (value == "false" || value == "no" || value == "off" || value == "0") return false;
    throw ConfigError(where + ": key '" + key + "' wants a boolean, got '" + value + "'");
}

int parse_int(const std::string& value, const std::string& key, const std::string& where) {
    try {
        return std::stoi(value);
    } catch (const std::exception&) {
        throw ConfigError(where + ": key '" + key + "' wants an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& value, const std::string& key,
                    const std::string& where) {
    try {
        return std::stod(value);
    } catch (const std::exception&) {
        throw ConfigError(where + ": key '" + key + "' wants a number, got '" + value + "'");
    }
}

bool has_env_interpolation(const std::string& value) {
    return value.find("${ENV:") != std::string::npos;
}

std::string interpolate_env(const std::string& value, const std::string& where) {
    const std::size_t start = value.find("${ENV:");
    if (start == std::string::npos) return value;
    const std::size_t end = value.find('}', start);
    if (end == std::string::npos) {
        throw ConfigError(where + ": unterminated ${ENV:...} interpolation");
    }
    const std::string name = value.substr(start + 6, end - start - 6);
    const char* env = std::getenv(name.c_str());
    return value.substr(0, start) + (env != nullptr ? env : "") + value.substr(end + 1);
}

}  // namespace

EngineConfig parse_config_text(const std::string& text, const std::string& source_name) {
    EngineConfig config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::string section;
    std::string section_arg;

    auto where = [&]() { return source_name + ":" + std::to_string(line_no); };

    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = trim(line);
        if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;

        if (trimmed.front() == '[') {
            if (trimmed.back() != ']') {
                throw ConfigError(where() + ": malformed section header");
            }
            const std::string inner = trim(trimmed.substr(1, trimmed.size() - 2));
            const std::size_t space = inner.find(' ');
            if (space == std::string::npos) {
                section = inner;
                section_arg.clear();
            } else {
                section = trim(inner.substr(0, space));
                section_arg = trim(inner.substr(space + 1));
            }
            if (section == "datasource") {
                if (section_arg.empty()) {
                    throw ConfigError(where() + ": [datasource <id>] needs an id");
                }
                DatasourceConfig& ds = config.datasources[section_arg];
                ds.id = section_arg;
                ds.row_limit = config.constants.row_limit;
            } else if (section == "annotations") {
                if (section_arg.empty()) {
                    throw ConfigError(where() + ": [annotations <datasource>] needs an id");
                }
                config.annotations[section_arg];
            }
            continue;
        }

        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where() + ": expected 'key = value'");
        }
        const std::string key = trim(trimmed.substr(0, eq));
        std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty()) throw ConfigError(where() + ": empty key");

        if (has_env_interpolation(value) && !(section == "provider" && key == "api_key")) {
            throw ConfigError(where() +
                              ": ${ENV:...} interpolation is allowed for secrets only "
                              "(provider api_key)");
        }

        if (section == "engine") {
            if (key == "audit_journal") {
                config.audit_journal = value;
            } else if (key == "verbosity") {
                config.verbosity = value;
            } else {
                throw ConfigError(where() + ": unknown [engine] key '" + key + "'");
            }
        } else if (section == "clock") {
            if (key == "kind") {
                if (value != "system" && value != "fixed") {
                    throw ConfigError(where() + ": clock kind must be system or fixed");
                }
                config.clock.kind = value;
            } else if (key == "instant") {
                const auto ts = parse_timestamp(value);
                if (!ts) throw ConfigError(where() + ": unreadable clock instant");
                config.clock.instant = ts;
            } else {
                throw ConfigError(where() + ": unknown [clock] key '" + key + "'");
            }
        } else if (section == "provider") {
            if (key == "kind") {
                if (value != "scripted" && value != "live") {
                    throw ConfigError(where() + ": provider kind must be scripted or live");
                }
                config.provider.kind = value;
            } else if (key == "scenario_path") {
                config.provider.scenario_path = value;
            } else if (key == "endpoint") {
                config.provider.endpoint = value;
            } else if (key == "model") {
                config.provider.model_name = value;
            } else if (key == "api_key") {
                config.provider.api_key = interpolate_env(value, where());
            } else {
                throw ConfigError(where() + ": unknown [provider] key '" + key + "'");
            }
        } else if (section == "policy") {
            if (key == "allow_ctes") {
                config.policy.allow_ctes = parse_bool(value, key, where());
            } else if (key == "allow_set_operations") {
                config.policy.allow_set_operations = parse_bool(value, key, where());
            } else if (key == "denied_columns") {
                for (std::string& name : split_list(value)) {
                    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) {
                        return static_cast<char>(std::tolower(c));
                    });
                    config.policy.denied_columns.insert(std::move(name));
                }
            } else if (key == "denied_functions") {
                for (std::string& name : split_list(value)) {
                    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) {
                        return static_cast<char>(std::tolower(c));
                    });
                    config.policy.denied_functions.insert(std::move(name));
                }
            } else if (key == "max_statement_length") {
                config.policy.max_statement_length =
                    static_cast<std::size_t>(parse_int(value, key, where()));
            } else {
                throw ConfigError(where() + ": unknown [policy] key '" + key + "'");
            }
        } else if (section == "constants") {
            if (key == "max_attempts" || key == "meters_per_mile") {
                throw ConfigError(where() + ": '" + key +
                                  "' is fixed and cannot be overridden");
            }
            if (key == "accept_threshold") {
                config.constants.accept_threshold = parse_double(value, key, where());
            } else if (key == "row_limit") {
                config.constants.row_limit = parse_int(value, key, where());
                for (auto& [id, ds] : config.datasources) {
                    ds.row_limit = config.constants.row_limit;
                }
            } else if (key == "sample_value_limit") {
                config.constants.sample_value_limit = parse_int(value, key, where());
            } else if (key == "prompt_schema_budget") {
                config.constants.prompt_schema_budget = parse_int(value, key, where());
            } else {
                throw ConfigError(where() + ": unknown [constants] key '" + key + "'");
            }
        } else if (section == "service") {
            if (key == "bind") {
                config.service.bind = value;
            } else if (key == "port") {
                config.service.port = parse_int(value, key, where());
            } else {
                throw ConfigError(where() + ": unknown [service] key '" + key + "'");
            }
        } else if (section == "datasource") {
            DatasourceConfig& ds = config.datasources[section_arg];
            if (key == "path") {
                ds.path = value;
            } else if (key == "statement_timeout_ms") {
                ds.statement_timeout_ms = parse_int(value, key, where());
            } else {
                throw ConfigError(where() + ": unknown [datasource] key '" + key + "'");
            }
        } else if (section == "annotations") {
            CatalogAnnotations& ann = config.annotations[section_arg];
            // "<table>.<column>.unit = meters" or "<table>.description = text"
            const std::size_t first_dot = key.find('.');
            if (first_dot == std::string::npos) {
                throw ConfigError(where() + ": annotation keys look like "
                                            "'table.column.unit' or 'table.description'");
            }
            const std::string rest = key.substr(first_dot + 1);
            if (rest == "description") {
                ann.table_descriptions[key.substr(0, first_dot)] = value;
            } else {
                const std::size_t second_dot = rest.rfind('.');
                if (second_dot == std::string::npos || rest.substr(second_dot + 1) != "unit") {
                    throw ConfigError(where() + ": unknown annotation key '" + key + "'");
                }
                const std::string column = key.substr(0, first_dot) + "." +
                                           rest.substr(0, second_dot);
                ann.column_unit_hints[column] = value;
            }
        } else if (section.empty()) {
            throw ConfigError(where() + ": key outside any [section]");
        } else {
            throw ConfigError(where() + ": unknown section [" + section + "]");
        }
    }

    // Invariants.
    if (config.provider.kind == "scripted" && config.provider.scenario_path.empty()) {
        throw ConfigError(source_name + ": scripted provider requires scenario_path");
    }
    if (config.provider.kind == "live" &&
        (config.provider.endpoint.empty() || config.provider.model_name.empty())) {
        throw ConfigError(source_name + ": live provider requires endpoint and model");
    }
    if (config.clock.kind == "fixed" && !config.clock.instant) {
        throw ConfigError(source_name + ": fixed clock requires an instant");
    }
    const auto violations = config.constants.validate();
    if (!violations.empty()) {
        throw ConfigError(source_name + ": " + violations.front());
    }
    return config;
}

EngineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

}  // namespace askdb
