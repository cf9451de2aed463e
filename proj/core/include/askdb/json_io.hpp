#pragma once

#include <nlohmann/json.hpp>

#include "askdb/domain.hpp"
#include "askdb/orchestrator.hpp"

namespace askdb {

// Engine -> consumer serialization (HTTP bodies, CLI --format json, scheduled
// report output). Objects serialize with sorted keys, so identical inputs
// produce identical bytes.
nlohmann::json to_json(const Value& value);
nlohmann::json to_json(const ExecutionOutcome& outcome);
nlohmann::json to_json(const RatingReport& report);
nlohmann::json to_json(const GuardrailVerdict& verdict);
nlohmann::json to_json(const SqlCandidate& candidate);
nlohmann::json to_json(const AttemptTrace& trace);
nlohmann::json to_json(const QueryAnswer& answer);
nlohmann::json to_json(const SchemaCatalog& catalog);
nlohmann::json to_json(const RouteResult& route);

}  // namespace askdb
