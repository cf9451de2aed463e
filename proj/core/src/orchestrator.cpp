#include "askdb/orchestrator.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "askdb/dialect.hpp"
#include "askdb/errors.hpp"
#include "askdb/interpreter.hpp"
#include "askdb/sql_lexer.hpp"

namespace askdb {

namespace {

const std::unordered_set<std::string> kQueryMarkers = {
    "what", "which", "how",  "who",    "when",    "where",  "show", "list",
    "give", "find",  "top",  "count",  "total",   "average", "sum", "many",
    "much", "highest", "lowest", "most", "least", "number", "rank", "compare",
    "per",  "breakdown",
};

const std::unordered_set<std::string> kAggregateDateVocab = {
    "count", "total",  "sum",   "average", "mean",    "max",     "min",
    "highest", "lowest", "top", "trend",   "day",     "week",    "month",
    "year",  "quarter", "date", "today",   "yesterday", "daily", "weekly",
    "monthly", "last",  "past", "recent",
};

bool all_digits(const std::string& token) {
    return !token.empty() && std::all_of(token.begin(), token.end(), [](unsigned char c) {
        return std::isdigit(c);
    });
}

// --- unit knowledge -------------------------------------------------------

std::string canonical_unit(const std::string& token) {
    if (token == "meter" || token == "metre") return "meter";
    if (token == "mile") return "mile";
    if (token == "kilometer" || token == "kilometre" || token == "km") return "kilometer";
    if (token == "second" || token == "sec") return "second";
    if (token == "minute" || token == "min") return "minute";
    if (token == "hour" || token == "hr") return "hour";
    return {};
}

std::string unit_dimension(const std::string& canonical) {
    if (canonical == "meter" || canonical == "mile" || canonical == "kilometer") {
        return "distance";
    }
    if (canonical == "second" || canonical == "minute" || canonical == "hour") {
        return "time";
    }
    return {};
}

std::string conversion_note(const std::string& a, const std::string& b) {
    auto pair_is = [&](const char* x, const char* y) {
        return (a == x && b == y) || (a == y && b == x);
    };
    if (pair_is("meter", "mile")) return "1609.34 meters per mile";
    if (pair_is("meter", "kilometer")) return "1000 meters per kilometer";
    if (pair_is("kilometer", "mile")) return "1.60934 kilometers per mile";
    if (pair_is("second", "minute")) return "60 seconds per minute";
    if (pair_is("second", "hour")) return "3600 seconds per hour";
    if (pair_is("minute", "hour")) return "60 minutes per hour";
    return {};
}

std::string lower_copy(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// True when the SQL applies multiplicative arithmetic with a numeric literal
// to the named column (e.g. "distance / 1609.34", "SUM(distance) / 1609.34").
bool has_conversion_arithmetic(const std::string& sql, const std::string& column) {
    const sql::LexResult lexed = sql::lex(sql);
    if (!lexed.ok) return false;
    const auto& toks = lexed.tokens;
    const std::string col = lower_copy(column);
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind != sql::Token::Kind::word) continue;
        if (lower_copy(toks[i].text) != col) continue;
        // Forward: col [)]* (/|*) number
        std::size_t j = i + 1;
        while (j < toks.size() && toks[j].is_symbol(")")) ++j;
        if (j + 1 < toks.size() && (toks[j].is_symbol("/") || toks[j].is_symbol("*")) &&
            toks[j + 1].kind == sql::Token::Kind::number) {
            return true;
        }
        // Backward: number * [(]* col
        if (i >= 1) {
            std::size_t k = i - 1;
            while (k > 0 && toks[k].is_symbol("(")) --k;
            if (k >= 1 && toks[k].is_symbol("*") &&
                toks[k - 1].kind == sql::Token::Kind::number) {
                return true;
            }
        }
    }
    return false;
}

// --- exact-match predicate detection --------------------------------------

struct ExactMatchPredicate {
    std::string table;
    std::string column;
    std::string literal;
    bool is_like = false;
};

// Finds "column = 'literal'" / "column LIKE 'literal-without-wildcards'"
// (LOWER()/UPPER() wrapping tolerated) where the column is a text column of a
// FROM-set table.
std::optional<ExactMatchPredicate> find_exact_text_predicate(const std::string& sql_text,
                                                             const SchemaCatalog& catalog) {
    const sql::ParsedStatement parsed = sql::parse_statement(sql_text);
    const sql::LexResult lexed = sql::lex(sql_text);
    if (!lexed.ok) return std::nullopt;
    const auto& toks = lexed.tokens;

    auto column_before = [&](std::size_t op) -> std::string {
        if (op == 0) return {};
        std::size_t i = op - 1;
        if (toks[i].is_symbol(")")) {
            // Wrapped: fn( ... col ) — take the last word inside the group.
            int depth = 0;
            std::size_t open = i;
            while (true) {
                if (toks[open].is_symbol(")")) ++depth;
                if (toks[open].is_symbol("(")) {
                    --depth;
                    if (depth == 0) break;
                }
                if (open == 0) return {};
                --open;
            }
            for (std::size_t j = i; j > open; --j) {
                if (toks[j - 1].kind == sql::Token::Kind::word &&
                    !(j < toks.size() && toks[j].is_symbol("("))) {
                    return lower_copy(toks[j - 1].text);
                }
            }
            return {};
        }
        if (toks[i].kind == sql::Token::Kind::word) return lower_copy(toks[i].text);
        return {};
    };

    auto literal_after = [&](std::size_t op) -> std::optional<std::string> {
        std::size_t i = op + 1;
        if (i < toks.size() && toks[i].kind == sql::Token::Kind::word &&
            i + 1 < toks.size() && toks[i + 1].is_symbol("(")) {
            // LOWER('x')
            i += 2;
        }
        if (i < toks.size() && toks[i].kind == sql::Token::Kind::string) {
            return toks[i].text;
        }
        return std::nullopt;
    };

    for (std::size_t i = 0; i < toks.size(); ++i) {
        const bool equals = toks[i].is_symbol("=");
        const bool like = toks[i].is_word("LIKE") || toks[i].is_word("ILIKE");
        if (!equals && !like) continue;
        if (i > 0 && toks[i - 1].is_word("NOT")) continue;
        const std::string column = column_before(i);
        const auto literal = literal_after(i);
        if (column.empty() || !literal) continue;
        if (like && (literal->find('%') != std::string::npos ||
                     literal->find('_') != std::string::npos)) {
            continue;  // real pattern, not an exact match
        }
        for (const std::string& table : parsed.from_tables) {
            const TableMeta* meta = catalog.find_table(table);
            if (meta == nullptr) continue;
            const ColumnMeta* col = meta->find_column(column);
            if (col != nullptr && col->data_kind == DataKind::text) {
                ExactMatchPredicate predicate;
                predicate.table = table;
                predicate.column = column;
                predicate.literal = *literal;
                predicate.is_like = like;
                return predicate;
            }
        }
    }
    return std::nullopt;
}

bool question_has_past_window(const std::vector<std::string>& tokens) {
    static const std::unordered_set<std::string> kUnits = {"day",  "week",    "month",
                                                           "year", "quarter", "hour"};
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] != "last" && tokens[i] != "past") continue;
        for (std::size_t j = i + 1; j < tokens.size() && j <= i + 2; ++j) {
            if (kUnits.count(tokens[j]) > 0) return true;
        }
    }
    return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

RouteResult route(const Question& question, const SchemaCatalog& catalog) {
    const std::vector<std::string> token_list = split_tokens(question.text);
    if (token_list.empty()) {
        return {RouteDecision::out_of_scope, "the question has no analyzable content"};
    }
    const std::set<std::string> tokens(token_list.begin(), token_list.end());

    bool marker = false;
    for (const std::string& tok : tokens) {
        if (kQueryMarkers.count(tok) > 0) {
            marker = true;
            break;
        }
    }

    bool overlap = false;
    for (const TableMeta& table : catalog.tables) {
        for (const std::string& tok : split_tokens(table.name)) {
            if (tokens.count(tok) > 0) overlap = true;
        }
        for (const ColumnMeta& col : table.columns) {
            for (const std::string& tok : split_tokens(col.name)) {
                if (tokens.count(tok) > 0) overlap = true;
            }
        }
        if (table.description) {
            for (const std::string& tok : split_tokens(*table.description)) {
                if (tokens.count(tok) > 0) overlap = true;
            }
        }
    }

    bool vocab = false;
    for (const std::string& tok : tokens) {
        if (all_digits(tok) || kAggregateDateVocab.count(tok) > 0) {
            vocab = true;
            break;
        }
    }

    if (marker && overlap) {
        return {RouteDecision::t2s_lane, "data-query markers with schema-term overlap"};
    }
    if (vocab) {
        return {RouteDecision::t2s_lane, "aggregate, number or date vocabulary"};
    }
    return {RouteDecision::out_of_scope,
            "no data-analysis intent: the question matches neither the schema nor "
            "aggregate/date vocabulary"};
}

// ---------------------------------------------------------------------------
// Sanity checks
// ---------------------------------------------------------------------------

SanityCheckResult sanity_check(const Question& question, const SqlCandidate& candidate,
                               const ExecutionOutcome& outcome, const SchemaCatalog& catalog,
                               Timestamp now) {
    if (outcome.status == OutcomeStatus::error) {
        throw PreconditionViolation("sanity_check requires an executed (non-error) outcome");
    }
    SanityCheckResult result;
    const std::vector<std::string> tokens = split_tokens(question.text);

    // future_dates_present: past-window phrasing plus any returned timestamp
    // beyond now.
    if (question_has_past_window(tokens)) {
        bool flagged = false;
        for (const Row& row : outcome.rows) {
            for (std::size_t c = 0; c < row.size() && !flagged; ++c) {
                const auto* text = std::get_if<std::string>(&row[c]);
                if (text == nullptr) continue;
                const auto ts = parse_timestamp(*text);
                if (ts && *ts > now) {
                    result.flags.insert(Flag::future_dates_present);
                    const std::string column =
                        c < outcome.column_names.size() ? outcome.column_names[c] : "?";
                    result.evidence[Flag::future_dates_present] =
                        "value '" + *text + "' in column " + column + " is after now (" +
                        format_timestamp(now) + ")";
                    flagged = true;
                }
            }
            if (flagged) break;
        }
    }

    // unit_mismatch: the question names a unit, a referenced column is hinted
    // in a different unit of the same dimension, and the SQL never converts.
    {
        std::vector<std::string> question_units;
        for (const std::string& tok : tokens) {
            const std::string canon = canonical_unit(tok);
            if (!canon.empty()) question_units.push_back(canon);
        }
        if (!question_units.empty()) {
            for (const std::string& ref : candidate.referenced_columns) {
                const auto dot = ref.find('.');
                if (dot == std::string::npos) continue;
                const std::string table = ref.substr(0, dot);
                const std::string column = ref.substr(dot + 1);
                const TableMeta* meta = catalog.find_table(table);
                if (meta == nullptr) continue;
                std::vector<const ColumnMeta*> columns;
                if (column == "*") {
                    for (const ColumnMeta& c : meta->columns) columns.push_back(&c);
                } else if (const ColumnMeta* c = meta->find_column(column)) {
                    columns.push_back(c);
                }
                for (const ColumnMeta* col : columns) {
                    if (!col->unit_hint) continue;
                    const std::string hinted = canonical_unit(fold_plural(
                        lower_copy(*col->unit_hint)));
                    if (hinted.empty()) continue;
                    for (const std::string& asked : question_units) {
                        if (asked == hinted) continue;
                        if (unit_dimension(asked) != unit_dimension(hinted)) continue;
                        if (has_conversion_arithmetic(candidate.sql_text, col->name)) continue;
                        result.flags.insert(Flag::unit_mismatch);
                        result.evidence[Flag::unit_mismatch] =
                            "column " + table + "." + col->name + " is measured in " +
                            *col->unit_hint + " but the question asks per " + asked +
                            " and the SQL applies no conversion";
                        result.conversion_note = conversion_note(hinted, asked);
                        break;
                    }
                    if (result.flags.count(Flag::unit_mismatch) > 0) break;
                }
                if (result.flags.count(Flag::unit_mismatch) > 0) break;
            }
        }
    }

    // exact_match_zero_rows: empty outcome plus an equality / wildcard-free
    // LIKE on a text column.
    if (outcome.status == OutcomeStatus::empty) {
        const auto predicate = find_exact_text_predicate(candidate.sql_text, catalog);
        if (predicate) {
            result.flags.insert(Flag::exact_match_zero_rows);
            result.evidence[Flag::exact_match_zero_rows] =
                "predicate " + predicate->table + "." + predicate->column +
                (predicate->is_like ? " LIKE '" : " = '") + predicate->literal +
                "' matched no rows";
            result.exact_match_column = {predicate->table, predicate->column};
        }
    }

    // suspicious_aggregate_truncation: a capped result cannot answer a
    // total/count question.
    if (outcome.status == OutcomeStatus::truncated) {
        static const std::unordered_set<std::string> kTotalVocab = {"total", "count", "sum",
                                                                    "average", "overall"};
        bool total_question = false;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (kTotalVocab.count(tokens[i]) > 0) total_question = true;
            if (tokens[i] == "how" && i + 1 < tokens.size() && tokens[i + 1] == "many") {
                total_question = true;
            }
        }
        if (total_question) {
            result.flags.insert(Flag::suspicious_aggregate_truncation);
            result.evidence[Flag::suspicious_aggregate_truncation] =
                "result truncated at " +
                std::to_string(outcome.row_limit_applied.value_or(0)) +
                " rows while the question asks for a total";
        }
    }

    return result;
}

// ---------------------------------------------------------------------------
// Correction hints
// ---------------------------------------------------------------------------

std::string build_correction_hint(const AttemptTrace& trace, const SchemaCatalog& catalog,
                                  const SanityCheckResult& sanity, Timestamp now) {
    if (!trace.guardrail_verdict.allowed()) {
        std::string reason(to_string(trace.guardrail_verdict.refusal_reason.value_or(
            RefusalReason::unparseable)));
        return "The previous statement was refused by the read-only guardrail (" + reason +
               "). Reply with exactly one read-only SELECT statement and nothing else.";
    }
    if (!trace.outcome) {
        return "Reply with exactly one read-only SELECT statement.";
    }
    const ExecutionOutcome& outcome = *trace.outcome;

    if (outcome.status == OutcomeStatus::error) {
        return outcome.error_message + ". Fix the SQL.";
    }
    if (outcome.status == OutcomeStatus::empty &&
        sanity.flags.count(Flag::exact_match_zero_rows) > 0 && sanity.exact_match_column) {
        const auto& [table, column] = *sanity.exact_match_column;
        std::string hint = "The predicate on " + table + "." + column +
                           " matched no rows as written.";
        const TableMeta* meta = catalog.find_table(table);
        const ColumnMeta* col = meta != nullptr ? meta->find_column(column) : nullptr;
        if (col != nullptr && col->sampled_values && !col->sampled_values->empty()) {
            hint += " Known values of " + table + "." + column + ": ";
            for (std::size_t i = 0; i < col->sampled_values->size(); ++i) {
                if (i > 0) hint += ", ";
                hint += (*col->sampled_values)[i];
            }
            hint += ".";
        }
        hint += " Prefer pattern matching over exact equality.";
        return hint;
    }
    if (outcome.status == OutcomeStatus::empty) {
        return "The query returned no rows. Reconsider the filter conditions.";
    }
    if (sanity.flags.count(Flag::future_dates_present) > 0) {
        return "Some returned dates lie in the future. Add a strict upper date bound of now "
               "(<= '" +
               format_timestamp(now) + "').";
    }
    if (sanity.flags.count(Flag::unit_mismatch) > 0) {
        const std::string note =
            sanity.conversion_note.value_or("the appropriate unit conversion factor");
        return "Apply conversion factor " + note + " inside the SQL (" +
               sanity.evidence.at(Flag::unit_mismatch) + ").";
    }
    if (sanity.flags.count(Flag::suspicious_aggregate_truncation) > 0) {
        return "The result was truncated before it could answer a total/count question. "
               "Aggregate inside the SQL instead of returning raw rows.";
    }
    std::string hint = "The result was rated below the acceptance threshold.";
    if (trace.rating && !trace.rating->rationale.empty()) {
        hint += " Rater feedback: " + trace.rating->rationale;
    }
    hint += " Produce a better-targeted query.";
    return hint;
}

// ---------------------------------------------------------------------------
// Rating
// ---------------------------------------------------------------------------

RatingReport rate(const Question& question, const SqlCandidate& candidate,
                  const ExecutionOutcome& outcome, const SanityCheckResult& sanity,
                  Provider& provider, const EngineConstants& constants,
                  const std::vector<AttemptTrace>& history) {
    (void)candidate;
    RatingReport report;
    report.flags = sanity.flags;
    if (outcome.status == OutcomeStatus::error) report.flags.insert(Flag::execution_error);
    if (outcome.status == OutcomeStatus::empty) report.flags.insert(Flag::empty_result);

    if (!report.flags.empty()) {
        report.score = 0.0;
        report.verdict = RatingVerdict::regenerate;
        report.rationale = "hard flags:";
        for (Flag flag : report.flags) {
            report.rationale += " ";
            report.rationale += to_string(flag);
        }
        return report;
    }

    ProviderRequest request;
    request.role = PromptRole::rate_result;
    request.rendered_prompt =
        render_prompt(PromptRole::rate_result, question, "", history);
    const ProviderResponse response = provider.complete(request);
    const ParsedRating parsed = parse_rating(response.text);
    report.score = parsed.parsed ? parsed.score : 0.0;
    report.rationale = parsed.parsed
                           ? parsed.reason
                           : "rating response was unparseable; conservative score 0";
    if (report.score < constants.accept_threshold) {
        report.flags.insert(Flag::low_llm_score);
    }
    report.verdict = rating_verdict_for(report.score, report.flags,
                                        constants.accept_threshold);
    return report;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

std::string_view to_string(PipelinePhase phase) {
    switch (phase) {
        case PipelinePhase::routing: return "routing";
        case PipelinePhase::generating: return "generating";
        case PipelinePhase::validating: return "validating";
        case PipelinePhase::executing: return "executing";
        case PipelinePhase::rating: return "rating";
        case PipelinePhase::interpreting: return "interpreting";
        case PipelinePhase::done: return "done";
    }
    return "done";
}

QueryAnswer run_pipeline(const Question& question, const SchemaCatalog& initial_catalog,
                         PipelineDeps& deps) {
    if (deps.provider == nullptr || deps.executor == nullptr || deps.clock == nullptr ||
        deps.audit == nullptr) {
        throw PreconditionViolation("run_pipeline needs provider, executor, clock and audit");
    }
    const Clock& clock = *deps.clock;
    const Timestamp pipeline_start = clock.now();

    auto emit = [&](TranscriptEvent::Kind kind, PipelinePhase phase, int attempt,
                    std::string detail) {
        if (!deps.transcript) return;
        TranscriptEvent event;
        event.kind = kind;
        event.phase = phase;
        event.attempt_number = attempt;
        event.detail = std::move(detail);
        deps.transcript(event);
    };
    auto emit_phase = [&](PipelinePhase phase, int attempt, std::string detail = "") {
        emit(TranscriptEvent::Kind::phase_transition, phase, attempt, std::move(detail));
    };

    emit_phase(PipelinePhase::routing, 0, "pre-routed to t2s_lane");

    SchemaCatalog catalog = initial_catalog;
    RelevanceRanking ranking = rank_relevance(question, catalog, deps.constants);
    std::string schema_text = ranking.rendered_schema_text;

    QueryAnswer answer;
    std::vector<AttemptTrace> attempts;
    std::set<std::pair<std::string, std::string>> introspected;
    std::optional<FinalStatus> terminal;

    auto audit_attempt = [&](const AttemptTrace& trace) {
        AuditRecord record;
        record.timestamp = clock.now();
        record.session_id = question.session_id;
        record.question_text = question.text;
        record.attempt_number = trace.candidate.attempt_number;
        record.sql_text = trace.candidate.sql_text;
        record.guardrail_decision = std::string(to_string(trace.guardrail_verdict.decision));
        if (trace.guardrail_verdict.refusal_reason) {
            record.guardrail_reason =
                std::string(to_string(*trace.guardrail_verdict.refusal_reason));
        }
        if (trace.outcome) {
            record.outcome_status = std::string(to_string(trace.outcome->status));
            record.duration_ms = trace.outcome->elapsed_ms;
        }
        if (trace.rating) record.rating_score = trace.rating->score;
        deps.audit->append(std::move(record));
    };

    for (int attempt = 1; attempt <= deps.constants.max_attempts && !terminal; ++attempt) {
        emit_phase(PipelinePhase::generating, attempt);
        const PromptRole role =
            attempt == 1 ? PromptRole::generate_sql : PromptRole::correct_sql;
        ProviderRequest request;
        request.role = role;
        request.rendered_prompt = render_prompt(role, question, schema_text, attempts);
        emit(TranscriptEvent::Kind::provider_call, PipelinePhase::generating, attempt,
             std::string(to_string(role)));
        const ProviderResponse response = deps.provider->complete(request);

        emit_phase(PipelinePhase::validating, attempt);
        AttemptTrace trace;
        const auto extracted = extract_sql(response.text);
        if (!extracted) {
            // Refusal text or chatter with no SQL: treat like an unparseable
            // candidate so the loop regenerates with clear guidance.
            trace.candidate.sql_text = response.text;
            trace.candidate.attempt_number = attempt;
            trace.candidate.classification = SqlClass::unparseable;
            trace.guardrail_verdict = GuardrailVerdict::refuse(
                RefusalReason::unparseable, {"no SQL-like content in the model reply"});
            trace.correction_hint =
                "The previous reply contained no SQL. Reply with exactly one read-only "
                "SELECT statement and nothing else.";
            audit_attempt(trace);
            attempts.push_back(std::move(trace));
            continue;
        }

        trace.candidate = classify(*extracted, attempt);
        trace.guardrail_verdict = enforce(trace.candidate, deps.policy, catalog);

        if (!trace.guardrail_verdict.allowed()) {
            const RefusalReason reason = *trace.guardrail_verdict.refusal_reason;
            if (reason == RefusalReason::unauthorized_column) {
                // Compliance refusal: terminal, never retried.
                audit_attempt(trace);
                attempts.push_back(std::move(trace));
                terminal = FinalStatus::refused;
                std::string names;
                for (const std::string& n : attempts.back().guardrail_verdict.offending) {
                    if (!names.empty()) names += ", ";
                    names += n;
                }
                answer.narrative =
                    "Refused: the question requires access to an unauthorized column (" +
                    names + ").";
                break;
            }
            trace.correction_hint =
                build_correction_hint(trace, catalog, SanityCheckResult{}, clock.now());
            audit_attempt(trace);
            attempts.push_back(std::move(trace));
            continue;
        }

        emit_phase(PipelinePhase::executing, attempt);
        emit(TranscriptEvent::Kind::executor_call, PipelinePhase::executing, attempt,
             "execute");
        const std::string execution_sql =
            sql::normalize_for_sqlite(trace.candidate.sql_text, clock.now());
        trace.outcome = deps.executor->execute(execution_sql);

        emit_phase(PipelinePhase::rating, attempt);
        SanityCheckResult sanity;
        if (trace.outcome->status != OutcomeStatus::error) {
            sanity = sanity_check(question, trace.candidate, *trace.outcome, catalog,
                                  clock.now());
        }

        // Value introspection: once per (table, column) per pipeline.
        bool legitimate_empty = false;
        if (sanity.flags.count(Flag::exact_match_zero_rows) > 0 && sanity.exact_match_column) {
            const auto key = *sanity.exact_match_column;
            if (introspected.count(key) == 0) {
                introspected.insert(key);
                emit(TranscriptEvent::Kind::introspection_call, PipelinePhase::rating, attempt,
                     key.first + "." + key.second);
                catalog = introspect_values(catalog, key.first, key.second, *deps.executor,
                                            deps.policy, deps.constants);
                ranking = rank_relevance(question, catalog, deps.constants);
                schema_text = ranking.rendered_schema_text;
            } else {
                legitimate_empty = true;
            }
        }

        if (legitimate_empty) {
            // The predicate was already repaired against live values; a second
            // empty result is a real answer, not a defect.
            RatingReport report;
            report.score = deps.constants.accept_threshold;
            report.verdict = RatingVerdict::accept;
            report.rationale =
                "empty result accepted: predicate values already verified against live data";
            trace.rating = report;
            audit_attempt(trace);
            attempts.push_back(std::move(trace));
            terminal = FinalStatus::answered;
            answer.column_names = attempts.back().outcome->column_names;
            answer.narrative = "No matching rows for the requested filter.";
            answer.key_values = {{"total_rows", "0"}};
            break;
        }

        std::vector<AttemptTrace> history = attempts;
        history.push_back(trace);
        const bool will_call_rater = sanity.flags.empty() &&
                                     trace.outcome->status != OutcomeStatus::error &&
                                     trace.outcome->status != OutcomeStatus::empty;
        if (will_call_rater) {
            emit(TranscriptEvent::Kind::provider_call, PipelinePhase::rating, attempt,
                 "rate_result");
        }
        trace.rating = rate(question, trace.candidate, *trace.outcome, sanity,
                            *deps.provider, deps.constants, history);

        if (trace.rating->verdict == RatingVerdict::accept) {
            audit_attempt(trace);
            attempts.push_back(std::move(trace));
            emit_phase(PipelinePhase::interpreting, attempt);
            const AttemptTrace& accepted = attempts.back();
            const KeyValueExtract extract = extract_key_values(*accepted.outcome);
            emit(TranscriptEvent::Kind::provider_call, PipelinePhase::interpreting, attempt,
                 "interpret_result");
            const NarrativeResult narrative = narrate(question, extract, *accepted.outcome,
                                                      *deps.provider, deps.verbosity);
            terminal = FinalStatus::answered;
            answer.column_names = accepted.outcome->column_names;
            answer.rows = accepted.outcome->rows;
            answer.narrative = narrative.text;
            answer.key_values = extract.as_key_values();
            break;
        }

        trace.correction_hint = build_correction_hint(trace, catalog, sanity, clock.now());
        audit_attempt(trace);
        attempts.push_back(std::move(trace));
    }

    if (!terminal) {
        terminal = FinalStatus::exhausted;
        const AttemptTrace* best = nullptr;
        for (const AttemptTrace& trace : attempts) {
            if (!trace.rating) continue;
            if (best == nullptr || trace.rating->score > best->rating->score) {
                best = &trace;
            }
        }
        if (best != nullptr && best->outcome) {
            answer.column_names = best->outcome->column_names;
            answer.rows = best->outcome->rows;
        }
        answer.narrative =
            "No acceptable result after the maximum number of attempts; showing the "
            "best-rated attempt.";
    }

    answer.final_status = *terminal;
    answer.attempts = std::move(attempts);

    AuditRecord terminal_record;
    terminal_record.timestamp = clock.now();
    terminal_record.session_id = question.session_id;
    terminal_record.question_text = question.text;
    terminal_record.attempt_number = 0;
    terminal_record.final_status = std::string(to_string(*terminal));
    terminal_record.duration_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(clock.now() - pipeline_start)
            .count();
    deps.audit->append(std::move(terminal_record));

    emit_phase(PipelinePhase::done, 0, std::string(to_string(*terminal)));
    return answer;
}

}  // namespace askdb
