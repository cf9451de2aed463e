#include "askdb/sql_parse.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "askdb/sql_lexer.hpp"

namespace askdb::sql {

namespace {

using Tokens = std::vector<Token>;

const std::unordered_set<std::string_view> kWriteVerbs = {
    "INSERT", "UPDATE", "DELETE", "MERGE", "REPLACE", "UPSERT",
    "COPY",   "IMPORT", "LOAD",   "CALL",  "EXEC",    "EXECUTE", "DO",
};

const std::unordered_set<std::string_view> kDdlVerbs = {
    "CREATE", "ALTER",    "DROP",   "TRUNCATE", "RENAME",   "GRANT",
    "REVOKE", "COMMENT",  "VACUUM", "REINDEX",  "ANALYZE",  "ATTACH",
    "DETACH", "PRAGMA",   "SET",    "RESET",    "BEGIN",    "START",
    "COMMIT", "END",      "ROLLBACK", "SAVEPOINT", "RELEASE", "LOCK",
    "USE",    "DECLARE",  "REFRESH", "CLUSTER", "CHECKPOINT",
};

// Parseable single statements that are neither SELECT nor write nor DDL.
const std::unordered_set<std::string_view> kOtherVerbs = {
    "EXPLAIN", "SHOW", "DESCRIBE", "DESC", "VALUES", "TABLE", "FETCH",
};

// Words never collected as bare column references. Qualified references
// ("t.key") bypass this list, so a denied column that happens to share a
// keyword spelling is still caught when qualified or quoted.
const std::unordered_set<std::string_view> kSkipWords = {
    "SELECT", "ALL", "DISTINCT", "AS", "FROM", "WHERE", "GROUP", "BY",
    "HAVING", "ORDER", "LIMIT", "OFFSET", "FETCH", "ON", "USING", "JOIN",
    "INNER", "LEFT", "RIGHT", "FULL", "OUTER", "CROSS", "NATURAL", "LATERAL",
    "UNION", "EXCEPT", "INTERSECT", "WITH", "RECURSIVE", "MATERIALIZED",
    "NOT", "AND", "OR", "IN", "IS", "NULL", "LIKE", "ILIKE", "SIMILAR", "TO",
    "BETWEEN", "EXISTS", "ANY", "SOME", "CASE", "WHEN", "THEN", "ELSE", "END",
    "CAST", "ASC", "DESC", "NULLS", "COLLATE", "INTERVAL", "TRUE", "FALSE",
    "UNKNOWN", "OVER", "PARTITION", "WINDOW", "RANGE", "PRECEDING",
    "FOLLOWING", "UNBOUNDED", "ESCAPE", "FILTER", "GROUPS", "TIES", "INTO",
    "FOR", "CURRENT", "CURRENT_DATE", "CURRENT_TIME", "CURRENT_TIMESTAMP",
    "CURRENT_USER", "SESSION_USER", "LOCALTIME", "LOCALTIMESTAMP",
    "ISNULL", "NOTNULL", "GLOB", "REGEXP", "ROW", "ROWS", "ONLY", "FIRST",
    "NEXT", "LAST", "KEY", "NO", "OF", "SKIP", "LOCKED", "UPDATE", "SHARE",
    "INDEXED",
};

// Words that may directly follow a table reference without being its alias.
const std::unordered_set<std::string_view> kRefStopWords = {
    "ON", "USING", "JOIN", "INNER", "LEFT", "RIGHT", "FULL", "OUTER", "CROSS",
    "NATURAL", "LATERAL", "WHERE", "GROUP", "HAVING", "ORDER", "WINDOW",
    "LIMIT", "OFFSET", "FETCH", "UNION", "EXCEPT", "INTERSECT", "FOR", "NOT",
    "INDEXED", "TABLESAMPLE", "INTO",
};

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Unquoted identifiers fold to lowercase; quoted ones keep their spelling.
std::string norm_ident(const Token& t) {
    return t.quoted ? t.text : to_lower(t.text);
}

bool is_plain_word(const Token& t) {
    return t.kind == Token::Kind::word && !t.quoted;
}

class Analyzer {
public:
    explicit Analyzer(const Tokens& toks) : toks_(toks) {}

    ParsedStatement run() {
        classify(0, toks_.size());
        if (!poisoned_ && select_seen_) {
            out_.kind = has_locking_clause(0, toks_.size()) ? StatementKind::locking_select
                                                            : StatementKind::select;
        }
        return std::move(out_);
    }

private:
    struct Scope {
        std::vector<std::string> tables;  // physical tables at this level
        std::vector<std::pair<std::string, std::string>> aliases;  // alias -> table
        std::unordered_set<std::string> nonphysical;  // cte / subquery / function aliases
        const Scope* parent = nullptr;

        const std::string* lookup_alias(const std::string& name) const {
            for (const auto& [alias, table] : aliases) {
                if (alias == name) return &table;
            }
            return nullptr;
        }
    };

    using Ranges = std::vector<std::pair<std::size_t, std::size_t>>;

    const Tokens& toks_;
    ParsedStatement out_;
    std::unordered_set<std::string> cte_names_;
    bool poisoned_ = false;
    bool select_seen_ = false;

    void poison(StatementKind kind, std::string detail) {
        if (poisoned_) return;
        poisoned_ = true;
        out_.kind = kind;
        out_.detail = std::move(detail);
    }

    std::size_t match_paren(std::size_t open, std::size_t end) {
        int depth = 0;
        for (std::size_t i = open; i < end; ++i) {
            if (toks_[i].is_symbol("(")) ++depth;
            if (toks_[i].is_symbol(")")) {
                --depth;
                if (depth == 0) return i;
            }
        }
        poison(StatementKind::unparseable, "unbalanced parentheses");
        return end;
    }

    // ------------------------------------------------------------------
    // Statement-level classification
    // ------------------------------------------------------------------

    void classify(std::size_t begin, std::size_t end) {
        std::vector<std::pair<std::size_t, std::size_t>> parts;
        std::size_t start = begin;
        int depth = 0;
        for (std::size_t i = begin; i < end; ++i) {
            if (toks_[i].is_symbol("(")) ++depth;
            if (toks_[i].is_symbol(")")) --depth;
            if (depth == 0 && toks_[i].is_symbol(";")) {
                if (i > start) parts.emplace_back(start, i);
                start = i + 1;
            }
        }
        if (start < end) parts.emplace_back(start, end);

        if (parts.empty()) {
            poison(StatementKind::unparseable, "statement is empty or only comments");
            return;
        }
        if (parts.size() > 1) {
            poison(StatementKind::multi, "multiple statements separated by ';'");
            return;
        }
        classify_single(parts[0].first, parts[0].second);
    }

    void classify_single(std::size_t begin, std::size_t end) {
        if (begin >= end) {
            poison(StatementKind::unparseable, "statement is empty");
            return;
        }
        // Peel a fully wrapping parenthesis pair.
        while (begin < end && toks_[begin].is_symbol("(")) {
            const std::size_t m = match_paren(begin, end);
            if (poisoned_) return;
            if (m != end - 1) break;  // "(...) UNION ..." — not fully wrapping
            ++begin;
            end = m;
        }
        if (begin >= end) {
            poison(StatementKind::unparseable, "statement is empty");
            return;
        }

        const Token& first = toks_[begin];
        if (first.kind != Token::Kind::word || first.quoted) {
            poison(StatementKind::unparseable, "statement must begin with a keyword");
            return;
        }
        const std::string_view verb = first.upper;
        if (verb == "WITH") {
            out_.has_cte = true;
            const std::size_t main_begin = parse_with_list(begin, end, nullptr);
            if (poisoned_) return;
            if (main_begin >= end) {
                poison(StatementKind::unparseable, "WITH clause without a main statement");
                return;
            }
            const Token& main = toks_[main_begin];
            if (main.is_symbol("(") || main.is_word("SELECT")) {
                process_select_family(main_begin, end, nullptr);
            } else if (is_plain_word(main) && kWriteVerbs.count(main.upper) > 0) {
                poison(StatementKind::write, "WITH-wrapped " + to_lower(main.upper));
            } else if (is_plain_word(main) && kDdlVerbs.count(main.upper) > 0) {
                poison(StatementKind::ddl, "WITH-wrapped " + to_lower(main.upper));
            } else {
                poison(StatementKind::unparseable,
                       "unsupported statement after WITH clause");
            }
            return;
        }
        if (verb == "SELECT") {
            process_select_family(begin, end, nullptr);
            return;
        }
        if (kWriteVerbs.count(verb) > 0) {
            poison(StatementKind::write, to_lower(verb) + " statement");
            return;
        }
        if (kDdlVerbs.count(verb) > 0) {
            poison(StatementKind::ddl, to_lower(verb) + " statement");
            return;
        }
        if (kOtherVerbs.count(verb) > 0) {
            poison(StatementKind::other, to_lower(verb) + " statement");
            return;
        }
        poison(StatementKind::unparseable,
               "unrecognized statement verb '" + first.text + "'");
    }

    // Parses "WITH [RECURSIVE] name [(cols)] AS [NOT] [MATERIALIZED] (body), ..."
    // starting at the WITH token; returns the index where the main statement
    // begins. Write verbs inside any CTE body poison the whole statement.
    std::size_t parse_with_list(std::size_t begin, std::size_t end, const Scope* parent) {
        std::size_t i = begin + 1;
        if (i < end && toks_[i].is_word("RECURSIVE")) ++i;
        while (i < end) {
            if (toks_[i].kind != Token::Kind::word) {
                poison(StatementKind::unparseable, "expected CTE name in WITH clause");
                return end;
            }
            cte_names_.insert(norm_ident(toks_[i]));
            ++i;
            if (i < end && toks_[i].is_symbol("(")) {
                i = match_paren(i, end) + 1;  // column alias list
                if (poisoned_) return end;
            }
            if (i >= end || !toks_[i].is_word("AS")) {
                poison(StatementKind::unparseable, "expected AS in WITH clause");
                return end;
            }
            ++i;
            if (i < end && toks_[i].is_word("NOT")) ++i;
            if (i < end && toks_[i].is_word("MATERIALIZED")) ++i;
            if (i >= end || !toks_[i].is_symbol("(")) {
                poison(StatementKind::unparseable, "expected ( after AS in WITH clause");
                return end;
            }
            const std::size_t close = match_paren(i, end);
            if (poisoned_) return end;
            const std::size_t body_begin = i + 1;
            if (body_begin < close) {
                const Token& bv = toks_[body_begin];
                if (is_plain_word(bv) && kWriteVerbs.count(bv.upper) > 0) {
                    poison(StatementKind::write, "data-modifying CTE (" + to_lower(bv.upper) + ")");
                    return end;
                }
                if (bv.is_word("SELECT") || bv.is_word("WITH") || bv.is_symbol("(")) {
                    process_select_family(body_begin, close, parent);
                    if (poisoned_) return end;
                } else if (bv.is_word("VALUES")) {
                    // Inline literal table; nothing to collect.
                } else {
                    poison(StatementKind::unparseable, "unsupported CTE body");
                    return end;
                }
            }
            i = close + 1;
            if (i < end && toks_[i].is_symbol(",")) {
                ++i;
                continue;
            }
            break;
        }
        return i;
    }

    // ------------------------------------------------------------------
    // SELECT family
    // ------------------------------------------------------------------

    // Splits on top-level UNION/EXCEPT/INTERSECT; every part gets its own
    // scope (members of a set operation cannot see each other's FROM lists).
    void process_select_family(std::size_t begin, std::size_t end, const Scope* parent) {
        std::vector<std::pair<std::size_t, std::size_t>> parts;
        std::size_t start = begin;
        int depth = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const Token& t = toks_[i];
            if (t.is_symbol("(")) ++depth;
            if (t.is_symbol(")")) --depth;
            if (depth == 0 && is_plain_word(t) &&
                (t.upper == "UNION" || t.upper == "EXCEPT" || t.upper == "INTERSECT")) {
                out_.has_set_operation = true;
                if (i > start) parts.emplace_back(start, i);
                start = i + 1;
                if (start < end && (toks_[start].is_word("ALL") || toks_[start].is_word("DISTINCT"))) {
                    ++start;
                }
                i = start - 1;
            }
        }
        if (start < end) parts.emplace_back(start, end);
        for (const auto& [b, e] : parts) {
            process_single_select(b, e, parent);
            if (poisoned_) return;
        }
    }

    void process_single_select(std::size_t begin, std::size_t end, const Scope* parent) {
        // Peel wrapping parens around this member.
        while (begin < end && toks_[begin].is_symbol("(")) {
            const std::size_t m = match_paren(begin, end);
            if (poisoned_) return;
            if (m != end - 1) break;
            ++begin;
            end = m;
        }
        if (begin >= end) return;

        if (toks_[begin].is_word("WITH")) {
            // WITH nested inside a subquery.
            begin = parse_with_list(begin, end, parent);
            if (poisoned_ || begin >= end) return;
            process_select_family(begin, end, parent);
            return;
        }
        if (!toks_[begin].is_word("SELECT")) {
            const Token& t = toks_[begin];
            if (is_plain_word(t) && kWriteVerbs.count(t.upper) > 0) {
                poison(StatementKind::write, to_lower(t.upper) + " statement");
            } else {
                poison(StatementKind::unparseable, "expected SELECT");
            }
            return;
        }
        select_seen_ = true;

        // SELECT ... INTO creates a table; that is a write, not a read.
        {
            int depth = 0;
            for (std::size_t i = begin; i < end; ++i) {
                if (toks_[i].is_symbol("(")) ++depth;
                if (toks_[i].is_symbol(")")) --depth;
                if (depth == 0 && toks_[i].is_word("INTO")) {
                    poison(StatementKind::write, "SELECT INTO creates a table");
                    return;
                }
            }
        }

        Scope scope;
        scope.parent = parent;
        Ranges consumed;
        collect_from(begin, end, scope, consumed);
        if (poisoned_) return;
        for (const std::string& table : scope.tables) {
            if (std::find(out_.from_tables.begin(), out_.from_tables.end(), table) ==
                out_.from_tables.end()) {
                out_.from_tables.push_back(table);
            }
        }
        std::sort(consumed.begin(), consumed.end());
        collect_exprs(begin, end, scope, consumed);
    }

    // Pass 1: register FROM/JOIN table references and aliases, recursing into
    // FROM-position subqueries. Fills `consumed` with token ranges that the
    // expression pass must skip.
    void collect_from(std::size_t begin, std::size_t end, Scope& scope, Ranges& consumed) {
        bool in_from = false;
        bool expecting_ref = false;
        std::size_t i = begin;
        while (i < end && !poisoned_) {
            const Token& t = toks_[i];
            if (t.is_symbol("(")) {
                const std::size_t m = match_paren(i, end);
                if (poisoned_) return;
                if (expecting_ref) {
                    std::size_t inner = i + 1;
                    while (inner < m && toks_[inner].is_symbol("(")) ++inner;
                    if (inner < m && (toks_[inner].is_word("SELECT") || toks_[inner].is_word("WITH") ||
                                      toks_[inner].is_word("VALUES"))) {
                        if (!toks_[inner].is_word("VALUES")) {
                            process_select_family(i + 1, m, &scope);
                            if (poisoned_) return;
                        }
                        consumed.emplace_back(i, m + 1);
                        i = m + 1;
                        i = consume_alias(i, end, scope, consumed, /*physical_table=*/"");
                    } else {
                        // Parenthesized join group: same scope.
                        collect_from(i + 1, m, scope, consumed);
                        i = m + 1;
                    }
                    expecting_ref = false;
                    continue;
                }
                i = m + 1;
                continue;
            }
            if (t.is_symbol(",")) {
                if (in_from && !expecting_ref) expecting_ref = true;
                ++i;
                continue;
            }
            if (t.kind == Token::Kind::word) {
                const std::string_view u = t.quoted ? std::string_view{} : std::string_view{t.upper};
                if (u == "FROM") {
                    in_from = true;
                    expecting_ref = true;
                    ++i;
                    continue;
                }
                if (u == "JOIN") {
                    expecting_ref = true;
                    ++i;
                    continue;
                }
                if (u == "ON" || u == "USING") {
                    expecting_ref = false;
                    ++i;
                    continue;
                }
                if (u == "WHERE" || u == "GROUP" || u == "HAVING" || u == "ORDER" ||
                    u == "WINDOW" || u == "LIMIT" || u == "OFFSET" || u == "FETCH" ||
                    u == "FOR") {
                    in_from = false;
                    expecting_ref = false;
                    ++i;
                    continue;
                }
                if (expecting_ref && (t.quoted || kSkipWords.count(u) == 0)) {
                    // Table function: FROM generate_series(...) g
                    if (i + 1 < end && toks_[i + 1].is_symbol("(")) {
                        out_.functions.insert(to_lower(t.text));
                        const std::size_t m = match_paren(i + 1, end);
                        if (poisoned_) return;
                        std::size_t after = m + 1;
                        after = consume_alias(after, end, scope, consumed, "");
                        i = after;
                        expecting_ref = false;
                        continue;
                    }
                    // Dotted table name, catalog.schema.table at most.
                    const std::size_t ref_start = i;
                    std::vector<std::string> parts{norm_ident(t)};
                    std::size_t j = i + 1;
                    while (j + 1 < end && toks_[j].is_symbol(".") &&
                           toks_[j + 1].kind == Token::Kind::word) {
                        parts.push_back(norm_ident(toks_[j + 1]));
                        j += 2;
                    }
                    consumed.emplace_back(ref_start, j);
                    const std::string table = parts.back();
                    if (parts.size() == 1 && cte_names_.count(table) > 0) {
                        std::size_t after = consume_alias(j, end, scope, consumed, "");
                        if (after == j) scope.nonphysical.insert(table);
                        i = after;
                    } else {
                        scope.tables.push_back(table);
                        std::size_t after = consume_alias(j, end, scope, consumed, table);
                        if (after == j) scope.aliases.emplace_back(table, table);
                        i = after;
                    }
                    expecting_ref = false;
                    continue;
                }
                ++i;
                continue;
            }
            ++i;
        }
    }

    // Consumes "[AS] alias" after a table reference when present. For
    // physical tables the alias maps to the table; otherwise it is recorded
    // as a non-physical name. Returns the index after the alias (or `at`
    // unchanged when there is none).
    std::size_t consume_alias(std::size_t at, std::size_t end, Scope& scope, Ranges& consumed,
                              const std::string& physical_table) {
        std::size_t i = at;
        bool saw_as = false;
        if (i < end && toks_[i].is_word("AS")) {
            saw_as = true;
            ++i;
        }
        if (i < end && toks_[i].kind == Token::Kind::word &&
            (toks_[i].quoted || kRefStopWords.count(toks_[i].upper) == 0) &&
            (toks_[i].quoted || kDdlVerbs.count(toks_[i].upper) == 0)) {
            const std::string alias = norm_ident(toks_[i]);
            if (physical_table.empty()) {
                scope.nonphysical.insert(alias);
            } else {
                scope.aliases.emplace_back(alias, physical_table);
            }
            consumed.emplace_back(at, i + 1);
            return i + 1;
        }
        if (saw_as) consumed.emplace_back(at, i);
        return at;
    }

    std::vector<std::vector<std::string>> scope_chain(const Scope& scope) const {
        std::vector<std::vector<std::string>> chain;
        for (const Scope* s = &scope; s != nullptr; s = s->parent) {
            if (!s->tables.empty()) chain.push_back(s->tables);
        }
        return chain;
    }

    // Pass 2: walk the scope's tokens collecting column references and
    // function names, skipping table-reference ranges and recursing into
    // expression-position subqueries.
    void collect_exprs(std::size_t begin, std::size_t end, const Scope& scope,
                       const Ranges& consumed) {
        std::size_t i = begin;
        auto skip_consumed = [&](std::size_t pos) {
            for (const auto& [b, e] : consumed) {
                if (pos >= b && pos < e) return e;
            }
            return pos;
        };
        while (i < end && !poisoned_) {
            const std::size_t skipped = skip_consumed(i);
            if (skipped != i) {
                i = skipped;
                continue;
            }
            const Token& t = toks_[i];
            if (t.is_symbol("(")) {
                const std::size_t m = match_paren(i, end);
                if (poisoned_) return;
                std::size_t inner = i + 1;
                while (inner < m && toks_[inner].is_symbol("(")) ++inner;
                if (inner < m && (toks_[inner].is_word("SELECT") || toks_[inner].is_word("WITH"))) {
                    process_select_family(i + 1, m, &scope);
                    if (poisoned_) return;
                    i = m + 1;
                    continue;
                }
                ++i;  // plain expression group: walk inside
                continue;
            }
            if (t.is_symbol("*")) {
                const Token* prev = i > begin ? &toks_[i - 1] : nullptr;
                const bool wildcard = prev != nullptr &&
                                      (prev->is_word("SELECT") || prev->is_word("DISTINCT") ||
                                       prev->is_word("ALL") || prev->is_symbol(","));
                if (wildcard) {
                    for (const std::string& table : scope.tables) {
                        ColumnRef ref;
                        ref.column = "*";
                        ref.table = table;
                        ref.wildcard = true;
                        out_.column_refs.push_back(std::move(ref));
                    }
                }
                ++i;
                continue;
            }
            if (t.kind != Token::Kind::word) {
                ++i;
                continue;
            }

            // Word token.
            const bool keyword = !t.quoted && kSkipWords.count(t.upper) > 0;
            if (keyword) {
                if (t.upper == "AS" && i + 1 < end && toks_[i + 1].kind == Token::Kind::word) {
                    i += 2;  // output alias or cast target
                    continue;
                }
                ++i;
                continue;
            }
            // Type name after a :: cast.
            if (i > begin && toks_[i - 1].is_symbol("::")) {
                ++i;
                continue;
            }
            // Function call.
            if (i + 1 < end && toks_[i + 1].is_symbol("(")) {
                out_.functions.insert(to_lower(t.text));
                ++i;
                continue;
            }
            // Qualified chain: a.b, a.b.c, alias.*.
            if (i + 1 < end && toks_[i + 1].is_symbol(".")) {
                std::vector<std::string> parts{norm_ident(t)};
                bool star = false;
                std::size_t j = i + 1;
                while (j + 1 < end && toks_[j].is_symbol(".")) {
                    if (toks_[j + 1].is_symbol("*")) {
                        star = true;
                        j += 2;
                        break;
                    }
                    if (toks_[j + 1].kind != Token::Kind::word) break;
                    parts.push_back(norm_ident(toks_[j + 1]));
                    j += 2;
                }
                const std::string qualifier = star ? parts.back()
                                                   : (parts.size() >= 2 ? parts[parts.size() - 2]
                                                                        : parts.back());
                const std::string column = star ? "*" : parts.back();
                emit_qualified(qualifier, column, star, scope);
                i = j;
                // A bare word right after the chain is an implicit alias.
                if (i < end && toks_[i].kind == Token::Kind::word &&
                    (toks_[i].quoted || kSkipWords.count(toks_[i].upper) == 0) &&
                    !(i + 1 < end && (toks_[i + 1].is_symbol("(") || toks_[i + 1].is_symbol(".")))) {
                    ++i;
                }
                continue;
            }
            // Implicit alias: a bare word directly after a completed primary.
            if (i > begin) {
                const Token& prev = toks_[i - 1];
                const bool prev_primary =
                    prev.is_symbol(")") || prev.kind == Token::Kind::number ||
                    prev.kind == Token::Kind::string ||
                    (prev.kind == Token::Kind::word &&
                     (prev.quoted || kSkipWords.count(prev.upper) == 0));
                if (prev_primary) {
                    ++i;
                    continue;
                }
            }
            // Unqualified column reference. A single-table scope with no CTE
            // or subquery aliases resolves immediately; anything else keeps
            // the scope chain for catalog resolution.
            ColumnRef ref;
            ref.column = norm_ident(t);
            if (scope.tables.size() == 1 && scope.nonphysical.empty()) {
                ref.table = scope.tables[0];
            } else {
                ref.scope_tables = scope_chain(scope);
            }
            out_.column_refs.push_back(std::move(ref));
            ++i;
        }
    }

    void emit_qualified(const std::string& qualifier, const std::string& column, bool star,
                        const Scope& scope) {
        for (const Scope* s = &scope; s != nullptr; s = s->parent) {
            if (const std::string* table = s->lookup_alias(qualifier)) {
                ColumnRef ref;
                ref.column = column;
                ref.table = *table;
                ref.wildcard = star;
                out_.column_refs.push_back(std::move(ref));
                return;
            }
            if (s->nonphysical.count(qualifier) > 0) {
                return;  // CTE or subquery output; inner references already collected
            }
        }
        if (cte_names_.count(qualifier) > 0) return;
        // Unknown qualifier: keep it so catalog resolution can still match,
        // erring on the strict side for the deny-list.
        ColumnRef ref;
        ref.column = column;
        ref.table = qualifier;
        ref.wildcard = star;
        out_.column_refs.push_back(std::move(ref));
    }

    // FOR UPDATE / FOR SHARE / FOR NO KEY UPDATE / FOR KEY SHARE /
    // LOCK IN SHARE MODE anywhere in the statement.
    bool has_locking_clause(std::size_t begin, std::size_t end) const {
        for (std::size_t i = begin; i < end; ++i) {
            if (toks_[i].is_word("FOR") && i + 1 < end) {
                const Token& next = toks_[i + 1];
                if (next.is_word("UPDATE") || next.is_word("SHARE")) return true;
                if (next.is_word("NO") && i + 3 < end && toks_[i + 2].is_word("KEY") &&
                    toks_[i + 3].is_word("UPDATE")) {
                    return true;
                }
                if (next.is_word("KEY") && i + 2 < end && toks_[i + 2].is_word("SHARE")) {
                    return true;
                }
            }
            if (toks_[i].is_word("LOCK") && i + 3 < end && toks_[i + 1].is_word("IN") &&
                toks_[i + 2].is_word("SHARE") && toks_[i + 3].is_word("MODE")) {
                return true;
            }
        }
        return false;
    }
};

}  // namespace

std::set<std::string> ParsedStatement::flat_columns() const {
    std::set<std::string> out;
    for (const ColumnRef& ref : column_refs) {
        if (ref.wildcard) {
            out.insert(ref.table.empty() ? "*" : ref.table + ".*");
        } else if (ref.qualified()) {
            out.insert(ref.table + "." + ref.column);
        } else {
            out.insert(ref.column);
        }
    }
    return out;
}

ParsedStatement parse_statement(std::string_view sql) {
    const LexResult lexed = lex(sql);
    if (!lexed.ok) {
        ParsedStatement out;
        out.kind = StatementKind::unparseable;
        out.detail = lexed.error;
        return out;
    }
    Analyzer analyzer(lexed.tokens);
    return analyzer.run();
}

}  // namespace askdb::sql
