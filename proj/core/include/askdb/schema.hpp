#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "askdb/clock.hpp"
#include "askdb/domain.hpp"
#include "askdb/executor.hpp"
#include "askdb/guardrail.hpp"

namespace askdb {

// Units and prose are not visible to database introspection; they ride in
// from the engine config and are layered onto the catalog here.
struct CatalogAnnotations {
    std::map<std::string, std::string> column_unit_hints;   // "table.column" -> unit
    std::map<std::string, std::string> table_descriptions;  // "table" -> text
};

// Snapshots every user table with columns, kinds, nullability and declared
// foreign keys. Empty databases yield a valid catalog with zero tables;
// unreachable ones throw DatasourceUnavailable.
SchemaCatalog introspect(const DatasourceConfig& config, const Clock& clock,
                         const CatalogAnnotations& annotations = {});

struct RelevanceRanking {
    // Sorted by score descending, table name ascending on ties.
    std::vector<std::pair<std::string, double>> scored_tables;
    std::vector<std::string> selected;  // greedy prefix that fits the budget
    std::string rendered_schema_text;   // <= PROMPT_SCHEMA_BUDGET bytes
};

// Lexical relevance: a question token scores 3.0 when it hits the table
// name, 2.0 for any column name, 1.0 for the description (all three can add
// for one token). Zero-score tables that are foreign-key neighbors of a
// scoring table get 0.5. Deterministic for identical inputs.
RelevanceRanking rank_relevance(const Question& question, const SchemaCatalog& catalog,
                                const EngineConstants& constants);

// Deterministic text block for the selection: one header line per table, one
// line per column, foreign-key lines between selected tables.
std::string render_schema_prompt(const SchemaCatalog& catalog,
                                 const std::vector<std::string>& selected);

// Samples up to SAMPLE_VALUE_LIMIT distinct non-null values of one column
// through a guardrail-approved read-only query, returning an updated catalog
// value. Throws PreconditionViolation for unknown columns or unsupported
// kinds, EngineError if the guardrail refuses the probe.
SchemaCatalog introspect_values(const SchemaCatalog& catalog, const std::string& table,
                                const std::string& column, Executor& executor,
                                const GuardrailPolicy& policy,
                                const EngineConstants& constants);

// Shared tokenization: lowercase, snake/camel splitting, plural folding.
std::vector<std::string> split_tokens(std::string_view text);
std::string fold_plural(std::string token);

}  // namespace askdb
