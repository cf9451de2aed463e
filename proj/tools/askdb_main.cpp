#include <atomic>
#include <csignal>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "askdb/engine.hpp"
#include "askdb/errors.hpp"
#include "askdb/fixture.hpp"
#include "askdb/json_io.hpp"
#include "askdb/scheduler.hpp"
#include "askdb/service.hpp"

namespace {

using namespace askdb;

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

void print_table(const QueryAnswer& answer) {
    std::vector<std::size_t> widths(answer.column_names.size());
    for (std::size_t c = 0; c < answer.column_names.size(); ++c) {
        widths[c] = answer.column_names[c].size();
    }
    std::vector<std::vector<std::string>> cells;
    for (const Row& row : answer.rows) {
        std::vector<std::string> rendered;
        for (std::size_t c = 0; c < row.size(); ++c) {
            rendered.push_back(value_to_string(row[c]));
            if (c < widths.size()) widths[c] = std::max(widths[c], rendered.back().size());
        }
        cells.push_back(std::move(rendered));
    }
    auto print_row = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::cout << (c > 0 ? "  " : "") << row[c]
                      << std::string(widths[c] - row[c].size(), ' ');
        }
        std::cout << "\n";
    };
    if (!answer.column_names.empty()) {
        print_row(answer.column_names);
        std::string rule;
        for (std::size_t c = 0; c < widths.size(); ++c) {
            rule += (c > 0 ? "  " : "") + std::string(widths[c], '-');
        }
        std::cout << rule << "\n";
    }
    for (const auto& row : cells) print_row(row);
}

int run_ask(Engine& engine, const std::string& question, const std::string& db,
            const std::string& format, const std::string& verbosity) {
    const AskOutcome outcome = engine.ask(
        question, db, "", verbosity.empty() ? std::nullopt : std::optional(verbosity));
    if (!outcome.answer) {
        std::cerr << "out of scope: " << outcome.route.explanation << "\n";
        return 3;
    }
    const QueryAnswer& answer = *outcome.answer;
    if (format == "json") {
        std::cout << to_json(answer).dump(2) << "\n";
    } else {
        if (answer.final_status == FinalStatus::exhausted) {
            std::cout << "!! no attempt was accepted; best-rated attempt shown below\n";
        }
        print_table(answer);
        if (!answer.narrative.empty()) std::cout << "\n" << answer.narrative << "\n";
        if (!answer.key_values.empty()) {
            std::cout << "\n";
            for (const auto& [label, value] : answer.key_values) {
                std::cout << label << ": " << value << "\n";
            }
        }
        std::cout << "\nattempts: " << answer.attempts.size()
                  << "  status: " << to_string(answer.final_status) << "\n";
    }
    switch (answer.final_status) {
        case FinalStatus::answered: return 0;
        case FinalStatus::refused: return 3;
        case FinalStatus::exhausted: return 4;
    }
    return 4;
}

int run_lint(Engine& engine, const std::string& db) {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    const std::string sql = buffer.str();

    SchemaCatalog catalog;
    if (!db.empty()) catalog = engine.catalog(db);
    GuardrailPolicy policy = engine.config().policy;

    const SqlCandidate candidate = classify(sql);
    const GuardrailVerdict verdict = enforce(candidate, policy, catalog);

    nlohmann::json doc;
    doc["classification"] = to_string(candidate.classification);
    doc["verdict"] = to_json(verdict);
    std::cout << doc.dump(2) << "\n";
    return verdict.allowed() ? 0 : 2;
}

int run_schema(Engine& engine, const std::string& db, const std::string& rank_question) {
    const SchemaCatalog& catalog = engine.catalog(db);
    if (rank_question.empty()) {
        std::cout << to_json(catalog).dump(2) << "\n";
        return 0;
    }
    Question question;
    question.text = rank_question;
    question.datasource_id = db;
    question.asked_at = engine.clock().now();
    question.session_id = "schema-rank";
    const RelevanceRanking ranking =
        rank_relevance(question, catalog, engine.config().constants);
    nlohmann::json doc;
    nlohmann::json scored = nlohmann::json::array();
    for (const auto& [name, score] : ranking.scored_tables) {
        scored.push_back({{"table", name}, {"score", score}});
    }
    doc["scored_tables"] = std::move(scored);
    doc["selected"] = ranking.selected;
    doc["rendered_schema_text"] = ranking.rendered_schema_text;
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int run_audit(Engine& engine, const std::string& session, const std::string& since,
              const std::string& status) {
    AuditFilter filter;
    if (!session.empty()) filter.session_id = session;
    if (!since.empty()) {
        const auto ts = parse_timestamp(since);
        if (!ts) {
            std::cerr << "unreadable --since timestamp: " << since << "\n";
            return 5;
        }
        filter.since = ts;
    }
    if (!status.empty()) {
        const auto fs = final_status_from_string(status);
        if (!fs) {
            std::cerr << "unknown --status value: " << status << "\n";
            return 5;
        }
        filter.final_status = fs;
    }
    for (const AuditRecord& record : engine.audit().query(filter)) {
        std::cout << audit_record_to_json(record).dump() << "\n";
    }
    return 0;
}

int run_replay(Engine& engine, const std::string& dir) {
    const std::vector<Scenario> scenarios = load_scenario_directory(dir);
    if (scenarios.empty()) {
        std::cout << "0 scenarios\n";
        return 0;
    }
    int failures = 0;
    for (const Scenario& scenario : scenarios) {
        const ReplayResult result = engine.replay(scenario);
        std::string status = "routed out of scope";
        std::string attempts = "-";
        if (result.outcome.answer) {
            status = to_string(result.outcome.answer->final_status);
            attempts = std::to_string(result.outcome.answer->attempts.size());
        }
        std::cout << (result.passed ? "PASS" : "FAIL") << "  " << result.scenario_name
                  << "  status=" << status << " attempts=" << attempts << "\n";
        for (const std::string& failure : result.failures) {
            std::cout << "      " << failure << "\n";
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"natural-language questions to verified, read-only SQL answers"};
    app.require_subcommand(1);

    std::string config_path = "askdb.conf";
    app.add_option("--config", config_path, "engine config file")->capture_default_str();

    // ask
    auto* ask = app.add_subcommand("ask", "answer a natural-language question");
    std::string question, ask_db = "chinook", format = "table", verbosity;
    ask->add_option("question", question, "the question to answer")->required();
    ask->add_option("--db", ask_db, "datasource id")->capture_default_str();
    ask->add_option("--format", format, "table or json")
        ->check(CLI::IsMember({"table", "json"}));
    ask->add_option("--verbosity", verbosity, "concise or detailed")
        ->check(CLI::IsMember({"concise", "detailed"}));

    // lint
    auto* lint = app.add_subcommand("lint", "classify SQL from stdin; never executes");
    std::string lint_db;
    lint->add_option("--db", lint_db, "datasource id for column resolution (optional)");

    // schema
    auto* schema = app.add_subcommand("schema", "print the introspected catalog");
    std::string schema_db = "chinook", rank_question;
    schema->add_option("--db", schema_db, "datasource id")->capture_default_str();
    schema->add_option("--rank", rank_question, "print the relevance ranking for a question");

    // audit
    auto* audit = app.add_subcommand("audit", "query the audit journal");
    std::string audit_session, audit_since, audit_status;
    audit->add_option("--session", audit_session, "filter by session id");
    audit->add_option("--since", audit_since, "filter by timestamp lower bound");
    audit->add_option("--status", audit_status, "filter by final status");

    // replay
    auto* replay = app.add_subcommand("replay", "run every scripted scenario end-to-end");
    std::string replay_dir;
    replay->add_option("--scenarios", replay_dir,
                       "scenario directory (default: provider scenario_path)");

    // serve
    auto* serve = app.add_subcommand("serve", "start the HTTP service");
    std::string bind_override;
    int port_override = 0;
    serve->add_option("--bind", bind_override, "bind address override");
    serve->add_option("--port", port_override, "port override");

    // schedule
    auto* schedule = app.add_subcommand("schedule", "run a question on a schedule");
    std::string sched_question, sched_db = "chinook", sched_spec = "@daily", sched_out;
    schedule->add_option("--question", sched_question, "question to run")->required();
    schedule->add_option("--db", sched_db, "datasource id")->capture_default_str();
    schedule->add_option("--every", sched_spec,
                         "@hourly, @daily[ HH:MM] or @every N{s|m|h|d}")
        ->capture_default_str();
    schedule->add_option("--output", sched_out, "output document path")->required();

    // seed (fixture bootstrap; not a query surface)
    auto* seed = app.add_subcommand("seed", "build a fixture database from a SQL script");
    std::string seed_sql, seed_out;
    seed->add_option("--sql", seed_sql, "seed script path")->required();
    seed->add_option("--out", seed_out, "database file to create")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (seed->parsed()) {
            askdb::load_fixture_file(seed_out, seed_sql);
            std::cout << "seeded " << seed_out << " from " << seed_sql << "\n";
            return 0;
        }

        askdb::Engine engine(askdb::load_config_file(config_path));

        if (ask->parsed()) return run_ask(engine, question, ask_db, format, verbosity);
        if (lint->parsed()) return run_lint(engine, lint_db);
        if (schema->parsed()) return run_schema(engine, schema_db, rank_question);
        if (audit->parsed()) return run_audit(engine, audit_session, audit_since, audit_status);
        if (replay->parsed()) {
            const std::string dir = replay_dir.empty()
                                        ? engine.config().provider.scenario_path
                                        : replay_dir;
            return run_replay(engine, dir);
        }
        if (serve->parsed()) {
            std::signal(SIGINT, handle_signal);
            std::signal(SIGTERM, handle_signal);
            askdb::QueryService service(engine);
            const std::string bind =
                bind_override.empty() ? engine.config().service.bind : bind_override;
            const int port = port_override > 0 ? port_override : engine.config().service.port;
            std::cout << "listening on " << bind << ":" << port << "\n";
            service.listen(bind, port);
            return 0;
        }
        if (schedule->parsed()) {
            std::signal(SIGINT, handle_signal);
            std::signal(SIGTERM, handle_signal);
            askdb::ScheduledReporter reporter(engine, sched_question, sched_db,
                                              askdb::ScheduleSpec::parse(sched_spec),
                                              sched_out);
            std::cout << "next run at "
                      << askdb::format_iso8601(reporter.next_fire()) << "\n";
            reporter.run_blocking(g_stop);
            return 0;
        }
    } catch (const askdb::ScenarioViolation& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 5;
    } catch (const askdb::EngineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
