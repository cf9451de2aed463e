#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace askdb::sql {

enum class StatementKind {
    select,          // exactly one plain SELECT / WITH..SELECT
    locking_select,  // select family carrying FOR UPDATE/SHARE or LOCK IN SHARE MODE
    write,           // DML or anything else that can modify data, wherever nested
    ddl,             // schema or session control
    other,           // parses as a single statement but is none of the above
    multi,           // more than one statement
    unparseable,     // lexical failure, empty/comment-only input, unknown verb
};

// One column usage found in the statement. Qualified references resolve
// through FROM/JOIN aliases at parse time; unqualified ones carry the scope
// chain (innermost first) so the guardrail can finish resolution against the
// catalog.
struct ColumnRef {
    std::string column;  // "*" for wildcards
    std::string table;   // set when alias-resolved or explicitly qualified
    std::vector<std::vector<std::string>> scope_tables;  // per scope level, innermost first
    bool wildcard = false;

    bool qualified() const { return !table.empty(); }
};

struct ParsedStatement {
    StatementKind kind = StatementKind::unparseable;
    std::string detail;  // human-readable classification note or lex error
    std::vector<ColumnRef> column_refs;
    std::set<std::string> functions;       // lowercase function names
    std::vector<std::string> from_tables;  // physical tables across all scopes, deduped
    bool has_cte = false;
    bool has_set_operation = false;

    // The SqlCandidate view: qualified refs as "table.column", wildcards as
    // "table.*", unqualified names passed through bare.
    std::set<std::string> flat_columns() const;
};

ParsedStatement parse_statement(std::string_view sql);

}  // namespace askdb::sql
