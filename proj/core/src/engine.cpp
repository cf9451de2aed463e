#include "askdb/engine.hpp"

#include <algorithm>

#include "askdb/errors.hpp"

namespace askdb {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
    if (config_.clock.kind == "fixed") {
        clock_ = std::make_unique<FixedClock>(*config_.clock.instant);
    } else {
        clock_ = std::make_unique<SystemClock>();
    }
    audit_ = std::make_unique<JournalAuditStore>(config_.audit_journal);
    if (config_.provider.kind == "live") {
        LiveProviderConfig live;
        live.endpoint = config_.provider.endpoint;
        live.model_name = config_.provider.model_name;
        live.api_key = config_.provider.api_key;
        live_provider_ = std::make_unique<HttpChatProvider>(std::move(live));
    } else {
        scenarios_ = load_scenario_directory(config_.provider.scenario_path);
    }
}

Executor& Engine::executor_for(const std::string& datasource_id) {
    auto it = executors_.find(datasource_id);
    if (it != executors_.end()) return *it->second;
    const auto cfg = config_.datasources.find(datasource_id);
    if (cfg == config_.datasources.end()) {
        throw ConfigError("datasource '" + datasource_id + "' is not registered");
    }
    DatasourceConfig ds = cfg->second;
    ds.row_limit = config_.constants.row_limit;
    auto executor = std::make_unique<SqliteExecutor>(std::move(ds), *clock_);
    auto [pos, ok] = executors_.emplace(datasource_id, std::move(executor));
    return *pos->second;
}

const SchemaCatalog& Engine::catalog(const std::string& datasource_id) {
    auto it = catalogs_.find(datasource_id);
    if (it != catalogs_.end()) return it->second;

    auto& executor = static_cast<SqliteExecutor&>(executor_for(datasource_id));
    const ReadOnlyProbe probe = executor.probe_readonly();
    if (!probe.writes_rejected) {
        throw ConfigError("datasource '" + datasource_id +
                          "' accepted a probe write; refusing to start (" + probe.detail + ")");
    }
    CatalogAnnotations annotations;
    const auto ann = config_.annotations.find(datasource_id);
    if (ann != config_.annotations.end()) annotations = ann->second;
    SchemaCatalog cat = introspect(executor.config(), *clock_, annotations);
    cat.denied_columns = config_.policy.denied_columns;
    auto [pos, ok] = catalogs_.emplace(datasource_id, std::move(cat));
    return pos->second;
}

AskOutcome Engine::ask_with_provider(const Question& question, Provider& provider,
                                     const GuardrailPolicy& policy,
                                     const std::string& verbosity) {
    const SchemaCatalog& cat = catalog(question.datasource_id);

    AskOutcome outcome;
    outcome.route = route(question, cat);
    if (outcome.route.decision == RouteDecision::out_of_scope) {
        return outcome;
    }

    SchemaCatalog effective = cat;
    effective.denied_columns = policy.denied_columns;

    PipelineDeps deps;
    deps.provider = &provider;
    deps.executor = &executor_for(question.datasource_id);
    deps.clock = clock_.get();
    deps.audit = audit_.get();
    deps.policy = policy;
    deps.constants = config_.constants;
    deps.verbosity = verbosity;
    deps.transcript = transcript_;
    outcome.answer = run_pipeline(question, effective, deps);
    return outcome;
}

AskOutcome Engine::ask(const std::string& question_text, const std::string& datasource_id,
                       const std::string& session_id,
                       const std::optional<std::string>& verbosity) {
    Question question;
    question.text = trim(question_text);
    question.datasource_id = datasource_id;
    question.asked_at = clock_->now();
    question.session_id = session_id.empty() ? "session-adhoc" : session_id;
    const std::string effective_verbosity = verbosity.value_or(config_.verbosity);

    if (config_.provider.kind == "live") {
        return ask_with_provider(question, *live_provider_, config_.policy,
                                 effective_verbosity);
    }

    // Scripted mode: the scenario is the model.
    const auto it = std::find_if(scenarios_.begin(), scenarios_.end(),
                                 [&](const Scenario& s) { return s.question == question.text; });
    if (it == scenarios_.end()) {
        throw ConfigError("no scripted scenario matches the question '" + question.text +
                          "' (scripted provider mode)");
    }
    if (it->datasource_id != datasource_id) {
        throw ConfigError("scenario '" + it->name + "' targets datasource '" +
                          it->datasource_id + "', not '" + datasource_id + "'");
    }
    ScriptedProvider provider(it->steps, it->name);
    GuardrailPolicy policy = config_.policy;
    for (std::string denied : it->denied_columns) {
        std::transform(denied.begin(), denied.end(), denied.begin(), [](unsigned char c) {
            return static_cast<char>(std::tolower(c));
        });
        policy.denied_columns.insert(std::move(denied));
    }
    return ask_with_provider(question, provider, policy,
                             it->verbosity.empty() ? effective_verbosity : it->verbosity);
}

ReplayResult Engine::replay(const Scenario& scenario) {
    ReplayResult result;
    result.scenario_name = scenario.name;

    Question question;
    question.text = scenario.question;
    question.datasource_id = scenario.datasource_id;
    question.asked_at = clock_->now();
    question.session_id = "replay-" + scenario.name;

    ScriptedProvider provider(scenario.steps, scenario.name);
    GuardrailPolicy policy = config_.policy;
    for (std::string denied : scenario.denied_columns) {
        std::transform(denied.begin(), denied.end(), denied.begin(), [](unsigned char c) {
            return static_cast<char>(std::tolower(c));
        });
        policy.denied_columns.insert(std::move(denied));
    }

    result.outcome = ask_with_provider(question, provider, policy, scenario.verbosity);

    if (scenario.expect_status) {
        if (!result.outcome.answer) {
            result.failures.push_back("expected final status " +
                                      std::string(to_string(*scenario.expect_status)) +
                                      " but the question routed out of scope");
        } else if (result.outcome.answer->final_status != *scenario.expect_status) {
            result.failures.push_back(
                "final status: expected " +
                std::string(to_string(*scenario.expect_status)) + ", got " +
                std::string(to_string(result.outcome.answer->final_status)));
        }
    }
    if (scenario.expect_attempts && result.outcome.answer) {
        const int actual = static_cast<int>(result.outcome.answer->attempts.size());
        if (actual != *scenario.expect_attempts) {
            result.failures.push_back("attempts: expected " +
                                      std::to_string(*scenario.expect_attempts) + ", got " +
                                      std::to_string(actual));
        }
    }
    if (provider.remaining() > 0) {
        result.failures.push_back(std::to_string(provider.remaining()) +
                                  " scripted step(s) were never consumed");
    }
    if (scenario.expect_narrative_fallback && result.outcome.answer) {
        const auto& attempts = result.outcome.answer->attempts;
        const AttemptTrace* accepted = nullptr;
        for (const AttemptTrace& trace : attempts) {
            if (trace.rating && trace.rating->verdict == RatingVerdict::accept) {
                accepted = &trace;
            }
        }
        if (accepted == nullptr || !accepted->outcome ||
            result.outcome.answer->narrative != fallback_narrative(*accepted->outcome)) {
            result.failures.push_back(
                "expected the anti-hallucination fallback narrative, got: " +
                result.outcome.answer->narrative);
        }
    }
    for (const AttemptTrace& trace : result.outcome.answer
                                          ? result.outcome.answer->attempts
                                          : std::vector<AttemptTrace>{}) {
        for (const std::string& violation : validate_trace(trace)) {
            result.failures.push_back("trace invariant: " + violation);
        }
    }
    result.passed = result.failures.empty();
    return result;
}

}  // namespace askdb
