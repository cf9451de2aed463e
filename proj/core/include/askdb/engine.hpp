#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "askdb/audit.hpp"
#include "askdb/config.hpp"
#include "askdb/orchestrator.hpp"
#include "askdb/scenario.hpp"

namespace askdb {

struct AskOutcome {
    RouteResult route;                 // routing decision (always set)
    std::optional<QueryAnswer> answer;  // absent when routed out_of_scope
};

struct ReplayResult {
    std::string scenario_name;
    bool passed = false;
    std::vector<std::string> failures;  // expected-vs-actual mismatches
    AskOutcome outcome;
};

// Wires config, clock, audit journal, datasources, catalogs and providers
// into one entry point shared by the CLI and the HTTP service.
class Engine {
public:
    explicit Engine(EngineConfig config);

    // Routes and, for in-scope questions, runs the full pipeline. In scripted
    // mode the scenario is located by exact question text. Throws
    // DatasourceUnavailable / ProviderUnavailable / AuditError / ConfigError
    // for infrastructure problems.
    AskOutcome ask(const std::string& question_text, const std::string& datasource_id,
                   const std::string& session_id = "",
                   const std::optional<std::string>& verbosity = std::nullopt);

    // Runs one scenario end-to-end with a fresh scripted provider and checks
    // its #! expectations.
    ReplayResult replay(const Scenario& scenario);

    // Introspects (and read-only-probes) the datasource on first access; the
    // catalog is cached for the engine's lifetime.
    const SchemaCatalog& catalog(const std::string& datasource_id);

    const EngineConfig& config() const { return config_; }
    const Clock& clock() const { return *clock_; }
    AuditStore& audit() { return *audit_; }

    // Observability hook for tests and the acceptance suite.
    void set_transcript_sink(TranscriptSink sink) { transcript_ = std::move(sink); }

private:
    AskOutcome ask_with_provider(const Question& question, Provider& provider,
                                 const GuardrailPolicy& policy, const std::string& verbosity);
    Executor& executor_for(const std::string& datasource_id);

    EngineConfig config_;
    std::unique_ptr<Clock> clock_;
    std::unique_ptr<AuditStore> audit_;
    std::unique_ptr<Provider> live_provider_;
    std::map<std::string, std::unique_ptr<SqliteExecutor>> executors_;
    std::map<std::string, SchemaCatalog> catalogs_;
    std::vector<Scenario> scenarios_;  // scripted mode
    TranscriptSink transcript_;
};

}  // namespace askdb
