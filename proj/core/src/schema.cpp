#include "askdb/schema.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <cctype>
#include <set>

#include "askdb/errors.hpp"

namespace askdb {

namespace {

struct DbCloser {
    void operator()(sqlite3* db) const { sqlite3_close_v2(db); }
};
using DbHandle = std::unique_ptr<sqlite3, DbCloser>;

DbHandle open_readonly(const DatasourceConfig& config) {
    sqlite3* raw = nullptr;
    const int rc = sqlite3_open_v2(config.path.c_str(), &raw, SQLITE_OPEN_READONLY, nullptr);
    DbHandle db(raw);
    if (rc != SQLITE_OK) {
        throw DatasourceUnavailable("cannot open datasource '" + config.id + "' at " +
                                    config.path + ": " +
                                    (raw != nullptr ? sqlite3_errmsg(raw) : "out of memory"));
    }
    return db;
}

std::vector<std::vector<std::string>> query_strings(sqlite3* db, const std::string& sql) {
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
        throw EngineError("introspection query failed: " + std::string(sqlite3_errmsg(db)));
    }
    std::vector<std::vector<std::string>> rows;
    while (sqlite3_step(stmt) == SQLITE_ROW) {
        std::vector<std::string> row;
        const int cols = sqlite3_column_count(stmt);
        for (int c = 0; c < cols; ++c) {
            const unsigned char* text = sqlite3_column_text(stmt, c);
            row.emplace_back(text != nullptr ? reinterpret_cast<const char*>(text) : "");
        }
        rows.push_back(std::move(row));
    }
    sqlite3_finalize(stmt);
    return rows;
}

DataKind kind_from_decltype(std::string type) {
    std::transform(type.begin(), type.end(), type.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (type.find("INT") != std::string::npos) return DataKind::integer;
    if (type.find("BOOL") != std::string::npos) return DataKind::boolean;
    if (type.find("DATE") != std::string::npos || type.find("TIME") != std::string::npos) {
        return DataKind::timestamp;
    }
    if (type.find("CHAR") != std::string::npos || type.find("TEXT") != std::string::npos ||
        type.find("CLOB") != std::string::npos) {
        return DataKind::text;
    }
    if (type.find("REAL") != std::string::npos || type.find("FLOA") != std::string::npos ||
        type.find("DOUB") != std::string::npos || type.find("NUMERIC") != std::string::npos ||
        type.find("DECIMAL") != std::string::npos) {
        return DataKind::decimal;
    }
    return DataKind::other;
}

std::string quote_ident(const std::string& name) {
    std::string out = "\"";
    for (char c : name) {
        out.push_back(c);
        if (c == '"') out.push_back('"');
    }
    out += "\"";
    return out;
}

}  // namespace

std::string fold_plural(std::string token) {
    const auto ends_with = [&token](std::string_view suffix) {
        return token.size() >= suffix.size() &&
               token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (token.size() > 4 && ends_with("ies")) {
        token.replace(token.size() - 3, 3, "y");
        return token;
    }
    if (token.size() > 4 && (ends_with("ses") || ends_with("xes") || ends_with("zes") ||
                             ends_with("ches") || ends_with("shes"))) {
        token.erase(token.size() - 2);
        return token;
    }
    if (token.size() > 3 && ends_with("s") && !ends_with("ss") && !ends_with("us") &&
        !ends_with("is")) {
        token.pop_back();
    }
    return token;
}

std::vector<std::string> split_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&]() {
        if (!current.empty()) {
            tokens.push_back(fold_plural(current));
            current.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (std::isalnum(static_cast<unsigned char>(c))) {
            // Camel boundary: lower/digit followed by upper starts a new token.
            if (!current.empty() && std::isupper(static_cast<unsigned char>(c)) &&
                !std::isupper(static_cast<unsigned char>(current.back()))) {
                flush();
            }
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

SchemaCatalog introspect(const DatasourceConfig& config, const Clock& clock,
                         const CatalogAnnotations& annotations) {
    DbHandle db = open_readonly(config);
    SchemaCatalog catalog;
    catalog.datasource_id = config.id;
    catalog.snapshot_at = clock.now();

    const auto table_rows = query_strings(
        db.get(),
        "SELECT name FROM sqlite_master WHERE type='table' AND name NOT LIKE 'sqlite_%' "
        "ORDER BY name");
    for (const auto& table_row : table_rows) {
        const std::string& table_name = table_row.at(0);
        TableMeta table;
        table.name = table_name;

        for (const auto& col : query_strings(
                 db.get(), "PRAGMA table_info(" + quote_ident(table_name) + ")")) {
            ColumnMeta column;
            column.name = col.at(1);
            column.data_kind = kind_from_decltype(col.at(2));
            column.nullable = col.at(3) == "0";
            const auto hint =
                annotations.column_unit_hints.find(table_name + "." + column.name);
            if (hint != annotations.column_unit_hints.end()) {
                column.unit_hint = hint->second;
            }
            table.columns.push_back(std::move(column));
        }

        const auto count_rows =
            query_strings(db.get(), "SELECT COUNT(*) FROM " + quote_ident(table_name));
        if (!count_rows.empty()) {
            table.row_count_estimate = std::stoll(count_rows[0].at(0));
        }
        const auto desc = annotations.table_descriptions.find(table_name);
        if (desc != annotations.table_descriptions.end()) {
            table.description = desc->second;
        }

        for (const auto& fk : query_strings(
                 db.get(), "PRAGMA foreign_key_list(" + quote_ident(table_name) + ")")) {
            ForeignKey key;
            key.from_table = table_name;
            key.from_column = fk.at(3);
            key.to_table = fk.at(2);
            key.to_column = fk.at(4);
            catalog.foreign_keys.push_back(std::move(key));
        }

        catalog.tables.push_back(std::move(table));
    }

    std::sort(catalog.foreign_keys.begin(), catalog.foreign_keys.end(),
              [](const ForeignKey& a, const ForeignKey& b) {
                  return std::tie(a.from_table, a.from_column, a.to_table, a.to_column) <
                         std::tie(b.from_table, b.from_column, b.to_table, b.to_column);
              });
    return catalog;
}

RelevanceRanking rank_relevance(const Question& question, const SchemaCatalog& catalog,
                                const EngineConstants& constants) {
    if (catalog.tables.empty()) {
        throw PreconditionViolation("ranking_unavailable: catalog has no tables");
    }

    const std::vector<std::string> raw_tokens = split_tokens(question.text);
    const std::set<std::string> tokens(raw_tokens.begin(), raw_tokens.end());

    RelevanceRanking ranking;
    for (const TableMeta& table : catalog.tables) {
        const std::vector<std::string> name_toks = split_tokens(table.name);
        const std::set<std::string> name_set(name_toks.begin(), name_toks.end());
        std::set<std::string> column_set;
        for (const ColumnMeta& col : table.columns) {
            for (const std::string& tok : split_tokens(col.name)) column_set.insert(tok);
        }
        std::set<std::string> desc_set;
        if (table.description) {
            for (const std::string& tok : split_tokens(*table.description)) {
                desc_set.insert(tok);
            }
        }
        double score = 0.0;
        for (const std::string& tok : tokens) {
            if (name_set.count(tok) > 0) score += 3.0;
            if (column_set.count(tok) > 0) score += 2.0;
            if (desc_set.count(tok) > 0) score += 1.0;
        }
        ranking.scored_tables.emplace_back(table.name, score);
    }

    // Foreign-key neighbor bonus for otherwise silent tables.
    std::set<std::string> scoring;
    for (const auto& [name, score] : ranking.scored_tables) {
        if (score > 0.0) scoring.insert(name);
    }
    for (auto& [name, score] : ranking.scored_tables) {
        if (score > 0.0) continue;
        for (const ForeignKey& fk : catalog.foreign_keys) {
            const bool adjacent = (fk.from_table == name && scoring.count(fk.to_table) > 0) ||
                                  (fk.to_table == name && scoring.count(fk.from_table) > 0);
            if (adjacent) {
                score = 0.5;
                break;
            }
        }
    }

    std::sort(ranking.scored_tables.begin(), ranking.scored_tables.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });

    // Greedy prefix under the prompt budget.
    for (const auto& [name, score] : ranking.scored_tables) {
        std::vector<std::string> candidate = ranking.selected;
        candidate.push_back(name);
        const std::string text = render_schema_prompt(catalog, candidate);
        if (static_cast<int>(text.size()) > constants.prompt_schema_budget) break;
        ranking.selected = std::move(candidate);
        ranking.rendered_schema_text = text;
    }
    return ranking;
}

std::string render_schema_prompt(const SchemaCatalog& catalog,
                                 const std::vector<std::string>& selected) {
    std::string out;
    for (const std::string& name : selected) {
        const TableMeta* table = catalog.find_table(name);
        if (table == nullptr) continue;
        out += "TABLE " + table->name;
        if (table->description) out += "  -- " + *table->description;
        out += "\n";
        for (const ColumnMeta& col : table->columns) {
            out += "  " + col.name + " " + std::string(to_string(col.data_kind));
            if (col.nullable) out += " nullable";
            if (col.unit_hint) out += " unit=" + *col.unit_hint;
            if (col.sampled_values && !col.sampled_values->empty()) {
                out += " values: ";
                for (std::size_t i = 0; i < col.sampled_values->size(); ++i) {
                    if (i > 0) out += ", ";
                    out += (*col.sampled_values)[i];
                }
            }
            out += "\n";
        }
    }
    const std::set<std::string> chosen(selected.begin(), selected.end());
    std::string fk_lines;
    for (const ForeignKey& fk : catalog.foreign_keys) {
        if (chosen.count(fk.from_table) > 0 && chosen.count(fk.to_table) > 0) {
            fk_lines += "  " + fk.from_table + "." + fk.from_column + " -> " + fk.to_table +
                        "." + fk.to_column + "\n";
        }
    }
    if (!fk_lines.empty()) {
        out += "FOREIGN KEYS\n" + fk_lines;
    }
    return out;
}

SchemaCatalog introspect_values(const SchemaCatalog& catalog, const std::string& table,
                                const std::string& column, Executor& executor,
                                const GuardrailPolicy& policy,
                                const EngineConstants& constants) {
    const TableMeta* table_meta = catalog.find_table(table);
    const ColumnMeta* column_meta =
        table_meta != nullptr ? table_meta->find_column(column) : nullptr;
    if (column_meta == nullptr) {
        throw PreconditionViolation("column_not_found: " + table + "." + column);
    }
    if (column_meta->data_kind != DataKind::text &&
        column_meta->data_kind != DataKind::integer &&
        column_meta->data_kind != DataKind::boolean) {
        throw PreconditionViolation("value introspection supports text, integer and boolean "
                                    "columns only: " +
                                    table + "." + column);
    }

    const std::string sql = "SELECT DISTINCT " + quote_ident(column) + " FROM " +
                            quote_ident(table) + " WHERE " + quote_ident(column) +
                            " IS NOT NULL ORDER BY " + quote_ident(column) + " LIMIT " +
                            std::to_string(constants.sample_value_limit);
    const GuardrailVerdict verdict = enforce(classify(sql), policy, catalog);
    if (!verdict.allowed()) {
        throw EngineError("introspection query refused by guardrail for " + table + "." +
                          column);
    }
    const ExecutionOutcome outcome = executor.execute(sql);
    if (outcome.status == OutcomeStatus::error) {
        throw DatasourceUnavailable("value introspection failed: " + outcome.error_message);
    }

    SchemaCatalog updated = catalog;
    for (TableMeta& t : updated.tables) {
        if (t.name != table) continue;
        for (ColumnMeta& c : t.columns) {
            if (c.name != column) continue;
            std::vector<std::string> values;
            for (const Row& row : outcome.rows) {
                if (!row.empty() && !value_is_null(row[0])) {
                    values.push_back(value_to_string(row[0]));
                }
            }
            c.sampled_values = std::move(values);
        }
    }
    return updated;
}

}  // namespace askdb
