#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "askdb/clock.hpp"

namespace askdb {

// ---------------------------------------------------------------------------
// Engine constants
// ---------------------------------------------------------------------------

struct EngineConstants {
    int max_attempts = 5;
    double meters_per_mile = 1609.34;
    double accept_threshold = 0.6;
    int row_limit = 1000;
    int sample_value_limit = 20;
    int prompt_schema_budget = 4000;

    // Reports invariant violations instead of throwing; empty means valid.
    std::vector<std::string> validate() const;
};

// ---------------------------------------------------------------------------
// Questions and schema metadata
// ---------------------------------------------------------------------------

struct Question {
    std::string text;
    std::string datasource_id;
    Timestamp asked_at{};
    std::string session_id;
};

enum class DataKind { integer, decimal, text, timestamp, boolean, other };

struct ColumnMeta {
    std::string name;
    DataKind data_kind = DataKind::other;
    bool nullable = true;
    std::optional<std::string> unit_hint;
    std::optional<std::vector<std::string>> sampled_values;  // <= SAMPLE_VALUE_LIMIT, distinct
};

struct TableMeta {
    std::string name;
    std::vector<ColumnMeta> columns;
    std::optional<std::int64_t> row_count_estimate;
    std::optional<std::string> description;

    const ColumnMeta* find_column(std::string_view column_name) const;
};

struct ForeignKey {
    std::string from_table;
    std::string from_column;
    std::string to_table;
    std::string to_column;
};

struct SchemaCatalog {
    std::string datasource_id;
    std::vector<TableMeta> tables;
    std::vector<ForeignKey> foreign_keys;
    std::set<std::string> denied_columns;  // fully-qualified "table.column"
    Timestamp snapshot_at{};

    const TableMeta* find_table(std::string_view table_name) const;
    bool has_column(std::string_view fully_qualified) const;
    // Checks catalog invariants (unique tables, FK endpoints exist, denied
    // columns resolve). Empty means valid.
    std::vector<std::string> validate() const;
};

// ---------------------------------------------------------------------------
// SQL candidates and execution outcomes
// ---------------------------------------------------------------------------

enum class SqlClass {
    single_select,
    write,
    ddl,
    multi_statement,
    locking_select,
    unparseable,
};

struct SqlCandidate {
    std::string sql_text;
    int attempt_number = 1;
    SqlClass classification = SqlClass::unparseable;
    // Possibly-qualified column names; "table.*" entries mark wildcards.
    std::set<std::string> referenced_columns;
};

enum class OutcomeStatus { rows, empty, error, truncated };

// One result cell. Nulls are monostate; integers and reals keep their engine
// types so numeric checks do not round-trip through strings.
using Value = std::variant<std::monostate, std::int64_t, double, std::string>;
using Row = std::vector<Value>;

bool value_is_null(const Value& v);
std::string value_to_string(const Value& v);

struct ExecutionOutcome {
    OutcomeStatus status = OutcomeStatus::error;
    std::vector<std::string> column_names;
    std::vector<Row> rows;
    std::string error_message;  // engine text, byte-exact; set iff status == error
    std::int64_t elapsed_ms = 0;
    std::optional<int> row_limit_applied;
};

// ---------------------------------------------------------------------------
// Ratings and guardrail verdicts
// ---------------------------------------------------------------------------

enum class Flag {
    empty_result,
    execution_error,
    future_dates_present,
    unit_mismatch,
    exact_match_zero_rows,
    low_llm_score,
    suspicious_aggregate_truncation,
};

enum class RatingVerdict { accept, regenerate };

struct RatingReport {
    double score = 0.0;  // in [0,1]
    RatingVerdict verdict = RatingVerdict::regenerate;
    std::set<Flag> flags;
    std::string rationale;
};

// The one rule relating scores, flags and verdicts; rate() and the tests both
// go through it so they cannot drift apart.
RatingVerdict rating_verdict_for(double score, const std::set<Flag>& flags,
                                 double accept_threshold);

enum class GuardrailDecision { allowed, refused };

enum class RefusalReason {
    not_select,
    multi_statement,
    locking_clause,
    write_detected,
    ddl_detected,
    unauthorized_column,
    denied_function,
    unparseable,
    too_long,
};

struct GuardrailVerdict {
    GuardrailDecision decision = GuardrailDecision::refused;
    std::optional<RefusalReason> refusal_reason;  // present iff refused
    std::vector<std::string> offending;           // column/function names, sorted
    std::optional<std::set<std::string>> referenced_columns;  // present iff parse succeeded

    static GuardrailVerdict allow(std::set<std::string> columns);
    static GuardrailVerdict refuse(RefusalReason reason,
                                   std::vector<std::string> offending = {},
                                   std::optional<std::set<std::string>> columns = std::nullopt);
    bool allowed() const { return decision == GuardrailDecision::allowed; }
};

// ---------------------------------------------------------------------------
// Attempt traces and the final answer
// ---------------------------------------------------------------------------

struct AttemptTrace {
    SqlCandidate candidate;
    GuardrailVerdict guardrail_verdict;
    std::optional<ExecutionOutcome> outcome;  // present only if allowed
    std::optional<RatingReport> rating;       // present only if outcome present
    std::optional<std::string> correction_hint;  // fed to the next attempt
};

// Structural implications every trace must satisfy; empty means valid.
std::vector<std::string> validate_trace(const AttemptTrace& trace);

enum class FinalStatus { answered, refused, exhausted };

struct QueryAnswer {
    FinalStatus final_status = FinalStatus::exhausted;
    std::vector<std::string> column_names;
    std::vector<Row> rows;
    std::string narrative;
    std::vector<std::pair<std::string, std::string>> key_values;
    std::vector<AttemptTrace> attempts;  // length in [1, MAX_ATTEMPTS]
};

// ---------------------------------------------------------------------------
// Enum names (serialization, audit records, CLI output)
// ---------------------------------------------------------------------------

std::string_view to_string(DataKind k);
std::string_view to_string(SqlClass c);
std::string_view to_string(OutcomeStatus s);
std::string_view to_string(Flag f);
std::string_view to_string(RatingVerdict v);
std::string_view to_string(GuardrailDecision d);
std::string_view to_string(RefusalReason r);
std::string_view to_string(FinalStatus s);

std::optional<DataKind> data_kind_from_string(std::string_view s);
std::optional<FinalStatus> final_status_from_string(std::string_view s);

}  // namespace askdb
