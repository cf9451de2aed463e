#include "askdb/guardrail.hpp"

#include <algorithm>

namespace askdb {

namespace {

SqlClass to_sql_class(sql::StatementKind kind) {
    switch (kind) {
        case sql::StatementKind::select: return SqlClass::single_select;
        case sql::StatementKind::locking_select: return SqlClass::locking_select;
        case sql::StatementKind::write: return SqlClass::write;
        case sql::StatementKind::ddl: return SqlClass::ddl;
        case sql::StatementKind::multi: return SqlClass::multi_statement;
        // Statements outside the supported language (EXPLAIN, SHOW, ...) sit
        // with unparseable in the candidate taxonomy; enforce() still reports
        // them as not_select.
        case sql::StatementKind::other: return SqlClass::unparseable;
        case sql::StatementKind::unparseable: return SqlClass::unparseable;
    }
    return SqlClass::unparseable;
}

// Resolves one unqualified reference through its scope chain (innermost
// first), falling back to the statement-wide FROM set. Returns the qualified
// name, or empty when the reference is ambiguous or unknown.
std::string resolve_scoped(const sql::ColumnRef& ref,
                           const std::vector<std::string>& from_tables,
                           const SchemaCatalog& catalog) {
    auto resolve_level = [&](const std::vector<std::string>& tables) -> std::string {
        std::string found;
        int matches = 0;
        for (const std::string& table : tables) {
            const TableMeta* meta = catalog.find_table(table);
            if (meta != nullptr && meta->find_column(ref.column) != nullptr) {
                ++matches;
                found = table + "." + ref.column;
            }
        }
        if (matches == 1) return found;
        if (matches > 1) return {};  // ambiguous at this level; the engine would reject it
        return {};
    };
    for (const auto& level : ref.scope_tables) {
        std::string hit = resolve_level(level);
        if (!hit.empty()) return hit;
        // A multi-match level is terminal: the reference is ambiguous.
        int matches = 0;
        for (const std::string& table : level) {
            const TableMeta* meta = catalog.find_table(table);
            if (meta != nullptr && meta->find_column(ref.column) != nullptr) ++matches;
        }
        if (matches > 1) return {};
    }
    if (ref.scope_tables.empty()) {
        return resolve_level(from_tables);
    }
    return {};
}

}  // namespace

GuardrailPolicy GuardrailPolicy::defaults() {
    GuardrailPolicy policy;
    policy.denied_functions = {"load_extension", "readfile", "writefile",
                               "fsdir", "zipfile", "edit"};
    return policy;
}

SqlCandidate classify(std::string_view sql_text, int attempt_number) {
    SqlCandidate candidate;
    candidate.sql_text = std::string(sql_text);
    candidate.attempt_number = attempt_number;
    const sql::ParsedStatement parsed = sql::parse_statement(sql_text);
    candidate.classification = to_sql_class(parsed.kind);
    if (parsed.kind == sql::StatementKind::select ||
        parsed.kind == sql::StatementKind::locking_select) {
        candidate.referenced_columns = parsed.flat_columns();
    }
    return candidate;
}

GuardrailVerdict enforce(const SqlCandidate& candidate, const GuardrailPolicy& policy,
                         const SchemaCatalog& catalog) {
    if (candidate.sql_text.size() > policy.max_statement_length) {
        return GuardrailVerdict::refuse(RefusalReason::too_long);
    }

    const sql::ParsedStatement parsed = sql::parse_statement(candidate.sql_text);
    switch (parsed.kind) {
        case sql::StatementKind::unparseable:
            return GuardrailVerdict::refuse(RefusalReason::unparseable, {parsed.detail});
        case sql::StatementKind::multi:
            return GuardrailVerdict::refuse(RefusalReason::multi_statement);
        case sql::StatementKind::write:
            return GuardrailVerdict::refuse(RefusalReason::write_detected, {parsed.detail});
        case sql::StatementKind::ddl:
            return GuardrailVerdict::refuse(RefusalReason::ddl_detected, {parsed.detail});
        case sql::StatementKind::locking_select:
            return GuardrailVerdict::refuse(RefusalReason::locking_clause);
        case sql::StatementKind::other:
            return GuardrailVerdict::refuse(RefusalReason::not_select, {parsed.detail});
        case sql::StatementKind::select:
            break;
    }

    std::set<std::string> referenced = parsed.flat_columns();

    if (!policy.allow_ctes && parsed.has_cte) {
        return GuardrailVerdict::refuse(RefusalReason::not_select,
                                        {"common table expressions disabled by policy"},
                                        referenced);
    }
    if (!policy.allow_set_operations && parsed.has_set_operation) {
        return GuardrailVerdict::refuse(RefusalReason::not_select,
                                        {"set operations disabled by policy"}, referenced);
    }

    std::vector<std::string> function_hits;
    for (const std::string& fn : parsed.functions) {
        if (policy.denied_functions.count(fn) > 0) function_hits.push_back(fn);
    }
    if (!function_hits.empty()) {
        return GuardrailVerdict::refuse(RefusalReason::denied_function, function_hits,
                                        referenced);
    }

    std::set<std::string> denied = policy.denied_columns;
    denied.insert(catalog.denied_columns.begin(), catalog.denied_columns.end());
    if (!denied.empty()) {
        std::set<std::string> hits;
        for (const sql::ColumnRef& ref : parsed.column_refs) {
            if (ref.wildcard) {
                if (const TableMeta* meta = catalog.find_table(ref.table)) {
                    for (const ColumnMeta& col : meta->columns) {
                        const std::string fq = meta->name + "." + col.name;
                        if (denied.count(fq) > 0) hits.insert(fq);
                    }
                }
                continue;
            }
            if (ref.qualified()) {
                const std::string fq = ref.table + "." + ref.column;
                if (denied.count(fq) > 0) hits.insert(fq);
                continue;
            }
            const std::string fq = resolve_scoped(ref, parsed.from_tables, catalog);
            if (!fq.empty() && denied.count(fq) > 0) hits.insert(fq);
        }
        if (!hits.empty()) {
            return GuardrailVerdict::refuse(
                RefusalReason::unauthorized_column,
                std::vector<std::string>(hits.begin(), hits.end()), referenced);
        }
    }

    return GuardrailVerdict::allow(std::move(referenced));
}

ColumnResolution resolve_columns(const std::set<std::string>& referenced,
                                 const std::vector<std::string>& from_tables,
                                 const SchemaCatalog& catalog) {
    ColumnResolution result;
    auto expand_table = [&](const std::string& table) {
        const TableMeta* meta = catalog.find_table(table);
        if (meta == nullptr) return false;
        for (const ColumnMeta& col : meta->columns) {
            result.resolved.insert(meta->name + "." + col.name);
        }
        return true;
    };

    for (const std::string& name : referenced) {
        if (name == "*") {
            bool any = false;
            for (const std::string& table : from_tables) {
                any = expand_table(table) || any;
            }
            if (!any) result.unresolved.push_back(name);
            continue;
        }
        const auto dot = name.find('.');
        if (dot != std::string::npos) {
            const std::string table = name.substr(0, dot);
            const std::string column = name.substr(dot + 1);
            if (column == "*") {
                if (!expand_table(table)) result.unresolved.push_back(name);
                continue;
            }
            if (catalog.has_column(name)) {
                result.resolved.insert(name);
            } else {
                result.unresolved.push_back(name);
            }
            continue;
        }
        // Unqualified: unique FROM-set table wins; anything else is reported.
        std::string hit;
        int matches = 0;
        for (const std::string& table : from_tables) {
            const TableMeta* meta = catalog.find_table(table);
            if (meta != nullptr && meta->find_column(name) != nullptr) {
                ++matches;
                hit = table + "." + name;
            }
        }
        if (matches == 1) {
            result.resolved.insert(hit);
        } else {
            result.unresolved.push_back(name);
        }
    }
    std::sort(result.unresolved.begin(), result.unresolved.end());
    return result;
}

}  // namespace askdb
