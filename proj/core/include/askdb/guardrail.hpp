#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "askdb/domain.hpp"
#include "askdb/sql_parse.hpp"

namespace askdb {

struct GuardrailPolicy {
    bool allow_ctes = true;
    bool allow_set_operations = true;
    std::set<std::string> denied_columns;    // lowercase fully-qualified names
    std::set<std::string> denied_functions;  // lowercase function names
    std::size_t max_statement_length = 20000;

    // Default deny-list: file and extension access of the embedded engine.
    static GuardrailPolicy defaults();
};

// Full parse classification of one candidate. Never throws: garbage input
// classifies as unparseable.
SqlCandidate classify(std::string_view sql_text, int attempt_number = 1);

// Policy decision for a classified candidate. Re-parses the statement so the
// scope-aware column resolution and function list are available regardless of
// how the candidate was built. Refusal reasons follow a fixed precedence:
// too_long, unparseable, multi_statement, write/ddl, locking_clause,
// not_select, denied_function, unauthorized_column.
GuardrailVerdict enforce(const SqlCandidate& candidate, const GuardrailPolicy& policy,
                         const SchemaCatalog& catalog);

struct ColumnResolution {
    std::set<std::string> resolved;        // fully-qualified "table.column"
    std::vector<std::string> unresolved;   // ambiguous or unknown names, sorted
};

// Resolves a flat reference set against the catalog. Unqualified names bind
// to the unique FROM-set table containing them; names present in two or more
// FROM-set tables stay unresolved; "table.*" (and bare "*") expand to every
// column of the named (or all FROM-set) tables.
ColumnResolution resolve_columns(const std::set<std::string>& referenced,
                                 const std::vector<std::string>& from_tables,
                                 const SchemaCatalog& catalog);

}  // namespace askdb
