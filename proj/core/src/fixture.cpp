#include "askdb/fixture.hpp"

#include <sqlite3.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "askdb/errors.hpp"

namespace askdb {

namespace {

struct DbCloser {
    void operator()(sqlite3* db) const { sqlite3_close_v2(db); }
};
using DbHandle = std::unique_ptr<sqlite3, DbCloser>;

DbHandle open_rw(const std::string& path) {
    sqlite3* raw = nullptr;
    const int rc = sqlite3_open_v2(path.c_str(), &raw,
                                   SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr);
    DbHandle db(raw);
    if (rc != SQLITE_OK) {
        throw DatasourceUnavailable("cannot open " + path + ": " +
                                    (raw != nullptr ? sqlite3_errmsg(raw) : "out of memory"));
    }
    return db;
}

}  // namespace

void load_fixture(const std::string& db_path, const std::string& sql_script) {
    if (db_path != ":memory:") std::remove(db_path.c_str());
    DbHandle db = open_rw(db_path);
    char* errmsg = nullptr;
    const int rc = sqlite3_exec(db.get(), sql_script.c_str(), nullptr, nullptr, &errmsg);
    if (rc != SQLITE_OK) {
        std::string msg = errmsg != nullptr ? errmsg : "unknown error";
        sqlite3_free(errmsg);
        throw EngineError("fixture script failed for " + db_path + ": " + msg);
    }
}

void load_fixture_file(const std::string& db_path, const std::string& script_path) {
    std::ifstream in(script_path);
    if (!in) {
        throw EngineError("cannot read fixture script " + script_path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    load_fixture(db_path, buffer.str());
}

RawResult raw_query(const std::string& db_path, const std::string& sql) {
    sqlite3* raw = nullptr;
    const int orc = sqlite3_open_v2(db_path.c_str(), &raw, SQLITE_OPEN_READONLY, nullptr);
    DbHandle db(raw);
    if (orc != SQLITE_OK) {
        throw DatasourceUnavailable("cannot open " + db_path);
    }
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db.get(), sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
        throw EngineError("raw_query prepare failed: " + std::string(sqlite3_errmsg(db.get())));
    }
    RawResult result;
    const int cols = sqlite3_column_count(stmt);
    for (int c = 0; c < cols; ++c) {
        result.column_names.emplace_back(sqlite3_column_name(stmt, c));
    }
    int rc;
    while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
        Row row;
        for (int c = 0; c < cols; ++c) {
            switch (sqlite3_column_type(stmt, c)) {
                case SQLITE_INTEGER:
                    row.emplace_back(static_cast<std::int64_t>(sqlite3_column_int64(stmt, c)));
                    break;
                case SQLITE_FLOAT:
                    row.emplace_back(sqlite3_column_double(stmt, c));
                    break;
                case SQLITE_NULL:
                    row.emplace_back(std::monostate{});
                    break;
                default: {
                    const unsigned char* text = sqlite3_column_text(stmt, c);
                    row.emplace_back(
                        std::string(text != nullptr ? reinterpret_cast<const char*>(text) : ""));
                }
            }
        }
        result.rows.push_back(std::move(row));
    }
    sqlite3_finalize(stmt);
    if (rc != SQLITE_DONE) {
        throw EngineError("raw_query step failed: " + std::string(sqlite3_errmsg(db.get())));
    }
    return result;
}

std::string raw_execute(const std::string& db_path, const std::string& sql) {
    DbHandle db = open_rw(db_path);
    char* errmsg = nullptr;
    const int rc = sqlite3_exec(db.get(), sql.c_str(), nullptr, nullptr, &errmsg);
    std::string msg;
    if (rc != SQLITE_OK && errmsg != nullptr) msg = errmsg;
    if (errmsg != nullptr) sqlite3_free(errmsg);
    if (rc != SQLITE_OK && msg.empty()) msg = "error " + std::to_string(rc);
    return msg;
}

std::string database_checksum(const std::string& db_path) {
    const RawResult tables = raw_query(
        db_path,
        "SELECT name FROM sqlite_master WHERE type='table' AND name NOT LIKE 'sqlite_%' "
        "ORDER BY name");
    std::size_t combined = 1469598103934665603ull;
    auto mix = [&combined](const std::string& s) {
        for (unsigned char c : s) {
            combined ^= c;
            combined *= 1099511628211ull;
        }
        combined ^= 0x1f;
        combined *= 1099511628211ull;
    };
    for (const Row& table_row : tables.rows) {
        const std::string table = value_to_string(table_row.at(0));
        mix(table);
        const RawResult contents = raw_query(db_path, "SELECT * FROM \"" + table + "\"");
        mix(std::to_string(contents.rows.size()));
        for (const Row& row : contents.rows) {
            for (const Value& v : row) {
                mix(value_to_string(v));
            }
        }
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016zx", combined);
    return buf;
}

}  // namespace askdb
