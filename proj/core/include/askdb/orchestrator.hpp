#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "askdb/audit.hpp"
#include "askdb/clock.hpp"
#include "askdb/domain.hpp"
#include "askdb/executor.hpp"
#include "askdb/guardrail.hpp"
#include "askdb/llm.hpp"
#include "askdb/schema.hpp"

namespace askdb {

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

enum class RouteDecision { t2s_lane, out_of_scope };

struct RouteResult {
    RouteDecision decision = RouteDecision::out_of_scope;
    std::string explanation;
};

// Deterministic router: data-query markers (interrogatives plus schema-term
// overlap) or aggregate/number/date vocabulary send the question to the T2S
// lane; everything else comes back out_of_scope with an explanation instead
// of being guessed into SQL.
RouteResult route(const Question& question, const SchemaCatalog& catalog);

// ---------------------------------------------------------------------------
// Sanity checks
// ---------------------------------------------------------------------------

struct SanityCheckResult {
    std::set<Flag> flags;
    std::map<Flag, std::string> evidence;  // one entry per raised flag
    // Extra context the hint builder needs:
    std::optional<std::pair<std::string, std::string>> exact_match_column;  // table, column
    std::optional<std::string> conversion_note;  // e.g. "1609.34 meters per mile"
};

SanityCheckResult sanity_check(const Question& question, const SqlCandidate& candidate,
                               const ExecutionOutcome& outcome, const SchemaCatalog& catalog,
                               Timestamp now);

// Deterministic hint text for the next attempt. Execution errors pass the
// engine message through verbatim.
std::string build_correction_hint(const AttemptTrace& trace, const SchemaCatalog& catalog,
                                  const SanityCheckResult& sanity, Timestamp now);

// Hard flags (empty result, execution error, any sanity flag) force
// regenerate without consulting the model; otherwise the rate_result role
// scores the attempt against ACCEPT_THRESHOLD.
RatingReport rate(const Question& question, const SqlCandidate& candidate,
                  const ExecutionOutcome& outcome, const SanityCheckResult& sanity,
                  Provider& provider, const EngineConstants& constants,
                  const std::vector<AttemptTrace>& history);

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

enum class PipelinePhase { routing, generating, validating, executing, rating, interpreting,
                           done };
std::string_view to_string(PipelinePhase phase);

struct TranscriptEvent {
    enum class Kind { phase_transition, provider_call, executor_call, introspection_call };
    Kind kind = Kind::phase_transition;
    PipelinePhase phase = PipelinePhase::routing;
    int attempt_number = 0;
    std::string detail;
};

using TranscriptSink = std::function<void(const TranscriptEvent&)>;

struct PipelineDeps {
    Provider* provider = nullptr;
    Executor* executor = nullptr;
    const Clock* clock = nullptr;
    AuditStore* audit = nullptr;
    GuardrailPolicy policy;
    EngineConstants constants;
    std::string verbosity = "concise";
    TranscriptSink transcript;  // optional
};

// Drives generate -> validate -> execute -> rate up to MAX_ATTEMPTS.
// unauthorized_column refusals terminate immediately (compliance is not
// retried); other refusals and regenerate verdicts consume an attempt with a
// correction hint. Exhaustion returns the best-rated attempt's data.
QueryAnswer run_pipeline(const Question& question, const SchemaCatalog& catalog,
                         PipelineDeps& deps);

}  // namespace askdb
