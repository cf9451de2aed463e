#include "askdb/json_io.hpp"

namespace askdb {

nlohmann::json to_json(const Value& value) {
    if (std::holds_alternative<std::monostate>(value)) return nullptr;
    if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
    if (const auto* d = std::get_if<double>(&value)) return *d;
    return std::get<std::string>(value);
}

nlohmann::json to_json(const ExecutionOutcome& outcome) {
    nlohmann::json doc;
    doc["status"] = to_string(outcome.status);
    doc["column_names"] = outcome.column_names;
    nlohmann::json rows = nlohmann::json::array();
    for (const Row& row : outcome.rows) {
        nlohmann::json cells = nlohmann::json::array();
        for (const Value& v : row) cells.push_back(to_json(v));
        rows.push_back(std::move(cells));
    }
    doc["rows"] = std::move(rows);
    if (outcome.status == OutcomeStatus::error) {
        doc["error_message"] = outcome.error_message;
    }
    doc["elapsed_ms"] = outcome.elapsed_ms;
    if (outcome.row_limit_applied) {
        doc["row_limit_applied"] = *outcome.row_limit_applied;
    }
    return doc;
}

nlohmann::json to_json(const RatingReport& report) {
    nlohmann::json doc;
    doc["score"] = report.score;
    doc["verdict"] = to_string(report.verdict);
    nlohmann::json flags = nlohmann::json::array();
    for (Flag flag : report.flags) flags.push_back(std::string(to_string(flag)));
    doc["flags"] = std::move(flags);
    doc["rationale"] = report.rationale;
    return doc;
}

nlohmann::json to_json(const GuardrailVerdict& verdict) {
    nlohmann::json doc;
    doc["decision"] = to_string(verdict.decision);
    if (verdict.refusal_reason) {
        doc["refusal_reason"] = to_string(*verdict.refusal_reason);
    }
    if (!verdict.offending.empty()) {
        doc["offending"] = verdict.offending;
    }
    if (verdict.referenced_columns) {
        doc["referenced_columns"] = *verdict.referenced_columns;
    }
    return doc;
}

nlohmann::json to_json(const SqlCandidate& candidate) {
    nlohmann::json doc;
    doc["sql_text"] = candidate.sql_text;
    doc["attempt_number"] = candidate.attempt_number;
    doc["classification"] = to_string(candidate.classification);
    doc["referenced_columns"] = candidate.referenced_columns;
    return doc;
}

nlohmann::json to_json(const AttemptTrace& trace) {
    nlohmann::json doc;
    doc["candidate"] = to_json(trace.candidate);
    doc["guardrail_verdict"] = to_json(trace.guardrail_verdict);
    if (trace.outcome) {
        nlohmann::json outcome = to_json(*trace.outcome);
        outcome.erase("rows");  // traces summarize; rows live on the answer
        outcome["row_count"] = trace.outcome->rows.size();
        doc["outcome"] = std::move(outcome);
    }
    if (trace.rating) doc["rating"] = to_json(*trace.rating);
    if (trace.correction_hint) doc["correction_hint"] = *trace.correction_hint;
    return doc;
}

nlohmann::json to_json(const QueryAnswer& answer) {
    nlohmann::json doc;
    doc["final_status"] = to_string(answer.final_status);
    doc["column_names"] = answer.column_names;
    nlohmann::json rows = nlohmann::json::array();
    for (const Row& row : answer.rows) {
        nlohmann::json cells = nlohmann::json::array();
        for (const Value& v : row) cells.push_back(to_json(v));
        rows.push_back(std::move(cells));
    }
    doc["rows"] = std::move(rows);
    doc["narrative"] = answer.narrative;
    nlohmann::json key_values = nlohmann::json::array();
    for (const auto& [label, value] : answer.key_values) {
        key_values.push_back({{"label", label}, {"value", value}});
    }
    doc["key_values"] = std::move(key_values);
    nlohmann::json attempts = nlohmann::json::array();
    for (const AttemptTrace& trace : answer.attempts) {
        attempts.push_back(to_json(trace));
    }
    doc["attempts"] = std::move(attempts);
    return doc;
}

nlohmann::json to_json(const SchemaCatalog& catalog) {
    nlohmann::json doc;
    doc["datasource_id"] = catalog.datasource_id;
    doc["snapshot_at"] = format_iso8601(catalog.snapshot_at);
    nlohmann::json tables = nlohmann::json::array();
    for (const TableMeta& table : catalog.tables) {
        nlohmann::json t;
        t["name"] = table.name;
        if (table.row_count_estimate) t["row_count_estimate"] = *table.row_count_estimate;
        if (table.description) t["description"] = *table.description;
        nlohmann::json columns = nlohmann::json::array();
        for (const ColumnMeta& col : table.columns) {
            nlohmann::json c;
            c["name"] = col.name;
            c["data_kind"] = to_string(col.data_kind);
            c["nullable"] = col.nullable;
            if (col.unit_hint) c["unit_hint"] = *col.unit_hint;
            if (col.sampled_values) c["sampled_values"] = *col.sampled_values;
            columns.push_back(std::move(c));
        }
        t["columns"] = std::move(columns);
        tables.push_back(std::move(t));
    }
    doc["tables"] = std::move(tables);
    nlohmann::json fks = nlohmann::json::array();
    for (const ForeignKey& fk : catalog.foreign_keys) {
        fks.push_back({{"from", fk.from_table + "." + fk.from_column},
                       {"to", fk.to_table + "." + fk.to_column}});
    }
    doc["foreign_keys"] = std::move(fks);
    if (!catalog.denied_columns.empty()) {
        doc["denied_columns"] = catalog.denied_columns;
    }
    return doc;
}

nlohmann::json to_json(const RouteResult& route) {
    nlohmann::json doc;
    doc["decision"] =
        route.decision == RouteDecision::t2s_lane ? "t2s_lane" : "out_of_scope";
    doc["explanation"] = route.explanation;
    return doc;
}

}  // namespace askdb
