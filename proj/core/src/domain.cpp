#include "askdb/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace askdb {

std::vector<std::string> EngineConstants::validate() const {
    std::vector<std::string> violations;
    if (max_attempts != 5) {
        violations.push_back("MAX_ATTEMPTS must equal 5 exactly (retry cap is fixed)");
    }
    if (meters_per_mile != 1609.34) {
        violations.push_back("METERS_PER_MILE must equal 1609.34 exactly");
    }
    if (accept_threshold < 0.0 || accept_threshold > 1.0) {
        violations.push_back("ACCEPT_THRESHOLD must lie in [0,1]");
    }
    if (row_limit <= 0) {
        violations.push_back("ROW_LIMIT must be positive");
    }
    if (sample_value_limit <= 0) {
        violations.push_back("SAMPLE_VALUE_LIMIT must be positive");
    }
    if (prompt_schema_budget <= 0) {
        violations.push_back("PROMPT_SCHEMA_BUDGET must be positive");
    }
    return violations;
}

const ColumnMeta* TableMeta::find_column(std::string_view column_name) const {
    for (const auto& col : columns) {
        if (col.name == column_name) return &col;
    }
    return nullptr;
}

const TableMeta* SchemaCatalog::find_table(std::string_view table_name) const {
    for (const auto& table : tables) {
        if (table.name == table_name) return &table;
    }
    return nullptr;
}

bool SchemaCatalog::has_column(std::string_view fully_qualified) const {
    const auto dot = fully_qualified.find('.');
    if (dot == std::string_view::npos) return false;
    const TableMeta* table = find_table(fully_qualified.substr(0, dot));
    return table != nullptr && table->find_column(fully_qualified.substr(dot + 1)) != nullptr;
}

std::vector<std::string> SchemaCatalog::validate() const {
    std::vector<std::string> violations;
    std::unordered_set<std::string> seen_tables;
    for (const auto& table : tables) {
        if (!seen_tables.insert(table.name).second) {
            violations.push_back("duplicate table name: " + table.name);
        }
        std::unordered_set<std::string> seen_columns;
        for (const auto& col : table.columns) {
            if (!seen_columns.insert(col.name).second) {
                violations.push_back("duplicate column " + table.name + "." + col.name);
            }
            if (col.sampled_values) {
                std::unordered_set<std::string> distinct(col.sampled_values->begin(),
                                                         col.sampled_values->end());
                if (distinct.size() != col.sampled_values->size()) {
                    violations.push_back("sampled_values not distinct for " + table.name +
                                         "." + col.name);
                }
            }
        }
    }
    for (const auto& fk : foreign_keys) {
        if (!has_column(fk.from_table + "." + fk.from_column)) {
            violations.push_back("foreign key source missing: " + fk.from_table + "." +
                                 fk.from_column);
        }
        if (!has_column(fk.to_table + "." + fk.to_column)) {
            violations.push_back("foreign key target missing: " + fk.to_table + "." +
                                 fk.to_column);
        }
    }
    for (const auto& denied : denied_columns) {
        if (!has_column(denied)) {
            violations.push_back("denied column does not resolve: " + denied);
        }
    }
    return violations;
}

bool value_is_null(const Value& v) {
    return std::holds_alternative<std::monostate>(v);
}

std::string value_to_string(const Value& v) {
    if (std::holds_alternative<std::monostate>(v)) return "NULL";
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) {
        // Shortest representation that round-trips; trailing zeros trimmed.
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", *d);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        for (int prec = 1; prec < 17; ++prec) {
            char probe[32];
            std::snprintf(probe, sizeof(probe), "%.*g", prec, *d);
            std::sscanf(probe, "%lf", &back);
            if (back == *d) {
                return probe;
            }
        }
        return buf;
    }
    return std::get<std::string>(v);
}

RatingVerdict rating_verdict_for(double score, const std::set<Flag>& flags,
                                 double accept_threshold) {
    if (!flags.empty()) return RatingVerdict::regenerate;
    if (score < accept_threshold) return RatingVerdict::regenerate;
    return RatingVerdict::accept;
}

GuardrailVerdict GuardrailVerdict::allow(std::set<std::string> columns) {
    GuardrailVerdict v;
    v.decision = GuardrailDecision::allowed;
    v.referenced_columns = std::move(columns);
    return v;
}

GuardrailVerdict GuardrailVerdict::refuse(RefusalReason reason,
                                          std::vector<std::string> offending,
                                          std::optional<std::set<std::string>> columns) {
    GuardrailVerdict v;
    v.decision = GuardrailDecision::refused;
    v.refusal_reason = reason;
    std::sort(offending.begin(), offending.end());
    v.offending = std::move(offending);
    v.referenced_columns = std::move(columns);
    return v;
}

std::vector<std::string> validate_trace(const AttemptTrace& trace) {
    std::vector<std::string> violations;
    if (!trace.guardrail_verdict.allowed() && trace.outcome.has_value()) {
        violations.push_back("outcome present despite refused guardrail verdict");
    }
    if (!trace.outcome.has_value() && trace.rating.has_value()) {
        violations.push_back("rating present without an outcome");
    }
    if (trace.rating) {
        if (trace.rating->score < 0.0 || trace.rating->score > 1.0) {
            violations.push_back("rating score outside [0,1]");
        }
    }
    return violations;
}

std::string_view to_string(DataKind k) {
    switch (k) {
        case DataKind::integer: return "integer";
        case DataKind::decimal: return "decimal";
        case DataKind::text: return "text";
        case DataKind::timestamp: return "timestamp";
        case DataKind::boolean: return "boolean";
        case DataKind::other: return "other";
    }
    return "other";
}

std::string_view to_string(SqlClass c) {
    switch (c) {
        case SqlClass::single_select: return "single_select";
        case SqlClass::write: return "write";
        case SqlClass::ddl: return "ddl";
        case SqlClass::multi_statement: return "multi_statement";
        case SqlClass::locking_select: return "locking_select";
        case SqlClass::unparseable: return "unparseable";
    }
    return "unparseable";
}

std::string_view to_string(OutcomeStatus s) {
    switch (s) {
        case OutcomeStatus::rows: return "rows";
        case OutcomeStatus::empty: return "empty";
        case OutcomeStatus::error: return "error";
        case OutcomeStatus::truncated: return "truncated";
    }
    return "error";
}

std::string_view to_string(Flag f) {
    switch (f) {
        case Flag::empty_result: return "empty_result";
        case Flag::execution_error: return "execution_error";
        case Flag::future_dates_present: return "future_dates_present";
        case Flag::unit_mismatch: return "unit_mismatch";
        case Flag::exact_match_zero_rows: return "exact_match_zero_rows";
        case Flag::low_llm_score: return "low_llm_score";
        case Flag::suspicious_aggregate_truncation: return "suspicious_aggregate_truncation";
    }
    return "low_llm_score";
}

std::string_view to_string(RatingVerdict v) {
    return v == RatingVerdict::accept ? "accept" : "regenerate";
}

std::string_view to_string(GuardrailDecision d) {
    return d == GuardrailDecision::allowed ? "allowed" : "refused";
}

std::string_view to_string(RefusalReason r) {
    switch (r) {
        case RefusalReason::not_select: return "not_select";
        case RefusalReason::multi_statement: return "multi_statement";
        case RefusalReason::locking_clause: return "locking_clause";
        case RefusalReason::write_detected: return "write_detected";
        case RefusalReason::ddl_detected: return "ddl_detected";
        case RefusalReason::unauthorized_column: return "unauthorized_column";
        case RefusalReason::denied_function: return "denied_function";
        case RefusalReason::unparseable: return "unparseable";
        case RefusalReason::too_long: return "too_long";
    }
    return "unparseable";
}

std::string_view to_string(FinalStatus s) {
    switch (s) {
        case FinalStatus::answered: return "answered";
        case FinalStatus::refused: return "refused";
        case FinalStatus::exhausted: return "exhausted";
    }
    return "exhausted";
}

std::optional<DataKind> data_kind_from_string(std::string_view s) {
    if (s == "integer") return DataKind::integer;
    if (s == "decimal") return DataKind::decimal;
    if (s == "text") return DataKind::text;
    if (s == "timestamp") return DataKind::timestamp;
    if (s == "boolean") return DataKind::boolean;
    if (s == "other") return DataKind::other;
    return std::nullopt;
}

std::optional<FinalStatus> final_status_from_string(std::string_view s) {
    if (s == "answered") return FinalStatus::answered;
    if (s == "refused") return FinalStatus::refused;
    if (s == "exhausted") return FinalStatus::exhausted;
    return std::nullopt;
}

}  // namespace askdb
