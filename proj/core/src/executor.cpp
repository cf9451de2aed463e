#include "askdb/executor.hpp"

#include <sqlite3.h>

#include <chrono>

#include "askdb/errors.hpp"

namespace askdb {

namespace {

struct DbCloser {
    void operator()(sqlite3* db) const { sqlite3_close_v2(db); }
};
using DbHandle = std::unique_ptr<sqlite3, DbCloser>;

struct StmtCloser {
    void operator()(sqlite3_stmt* stmt) const { sqlite3_finalize(stmt); }
};
using StmtHandle = std::unique_ptr<sqlite3_stmt, StmtCloser>;

DbHandle open_database(const DatasourceConfig& config) {
    sqlite3* raw = nullptr;
    const int flags = config.read_only ? SQLITE_OPEN_READONLY
                                       : SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE;
    const int rc = sqlite3_open_v2(config.path.c_str(), &raw, flags, nullptr);
    DbHandle db(raw);
    if (rc != SQLITE_OK) {
        const std::string msg = raw != nullptr ? sqlite3_errmsg(raw) : "out of memory";
        throw DatasourceUnavailable("cannot open datasource '" + config.id + "' at " +
                                    config.path + ": " + msg);
    }
    sqlite3_extended_result_codes(raw, 1);
    return db;
}

struct Deadline {
    std::chrono::steady_clock::time_point at;
    bool expired = false;
};

int progress_callback(void* ctx) {
    auto* deadline = static_cast<Deadline*>(ctx);
    if (std::chrono::steady_clock::now() >= deadline->at) {
        deadline->expired = true;
        return 1;  // interrupt
    }
    return 0;
}

Value column_value(sqlite3_stmt* stmt, int col) {
    switch (sqlite3_column_type(stmt, col)) {
        case SQLITE_INTEGER:
            return Value(static_cast<std::int64_t>(sqlite3_column_int64(stmt, col)));
        case SQLITE_FLOAT:
            return Value(sqlite3_column_double(stmt, col));
        case SQLITE_NULL:
            return Value(std::monostate{});
        default: {
            const unsigned char* text = sqlite3_column_text(stmt, col);
            return Value(std::string(text != nullptr ? reinterpret_cast<const char*>(text) : ""));
        }
    }
}

}  // namespace

SqliteExecutor::SqliteExecutor(DatasourceConfig config, const Clock& clock)
    : config_(std::move(config)), clock_(&clock) {
    if (!config_.read_only) {
        throw ConfigError("datasource '" + config_.id + "' must be read-only");
    }
    if (config_.statement_timeout_ms <= 0) {
        throw ConfigError("statement_timeout_ms must be positive");
    }
}

ExecutionOutcome SqliteExecutor::execute(const std::string& sql) {
    const Timestamp started = clock_->now();
    DbHandle db = open_database(config_);
    sqlite3_exec(db.get(), "PRAGMA query_only=ON", nullptr, nullptr, nullptr);

    Deadline deadline{std::chrono::steady_clock::now() +
                      std::chrono::milliseconds(config_.statement_timeout_ms)};
    sqlite3_progress_handler(db.get(), 100, progress_callback, &deadline);

    ExecutionOutcome outcome;
    auto finish = [&](OutcomeStatus status) {
        outcome.status = status;
        outcome.elapsed_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(clock_->now() - started)
                .count();
        return outcome;
    };

    sqlite3_stmt* raw_stmt = nullptr;
    const char* tail = nullptr;
    const int prc = sqlite3_prepare_v2(db.get(), sql.c_str(), -1, &raw_stmt, &tail);
    StmtHandle stmt(raw_stmt);
    if (prc != SQLITE_OK) {
        outcome.error_message = sqlite3_errmsg(db.get());
        return finish(OutcomeStatus::error);
    }
    if (stmt == nullptr) {
        outcome.error_message = "statement is empty";
        return finish(OutcomeStatus::error);
    }
    for (const char* p = tail; p != nullptr && *p != '\0'; ++p) {
        if (!std::isspace(static_cast<unsigned char>(*p)) && *p != ';') {
            outcome.error_message = "multiple statements are not allowed";
            return finish(OutcomeStatus::error);
        }
    }
    if (sqlite3_stmt_readonly(stmt.get()) == 0) {
        outcome.error_message = "write statement rejected by read-only session";
        return finish(OutcomeStatus::error);
    }

    const int column_count = sqlite3_column_count(stmt.get());
    for (int c = 0; c < column_count; ++c) {
        const char* name = sqlite3_column_name(stmt.get(), c);
        outcome.column_names.emplace_back(name != nullptr ? name : "");
    }

    while (true) {
        const int rc = sqlite3_step(stmt.get());
        if (rc == SQLITE_ROW) {
            if (static_cast<int>(outcome.rows.size()) >= config_.row_limit) {
                outcome.row_limit_applied = config_.row_limit;
                return finish(OutcomeStatus::truncated);
            }
            Row row;
            row.reserve(static_cast<std::size_t>(column_count));
            for (int c = 0; c < column_count; ++c) {
                row.push_back(column_value(stmt.get(), c));
            }
            outcome.rows.push_back(std::move(row));
            continue;
        }
        if (rc == SQLITE_DONE) break;
        if (deadline.expired || rc == SQLITE_INTERRUPT) {
            outcome.rows.clear();
            outcome.error_message = "timeout: statement exceeded " +
                                    std::to_string(config_.statement_timeout_ms) + "ms";
            return finish(OutcomeStatus::error);
        }
        outcome.rows.clear();
        outcome.error_message = sqlite3_errmsg(db.get());
        return finish(OutcomeStatus::error);
    }

    return finish(outcome.rows.empty() ? OutcomeStatus::empty : OutcomeStatus::rows);
}

ReadOnlyProbe SqliteExecutor::probe_readonly() {
    DbHandle db = open_database(config_);
    sqlite3_exec(db.get(), "PRAGMA query_only=ON", nullptr, nullptr, nullptr);

    ReadOnlyProbe probe;
    sqlite3_exec(db.get(), "BEGIN", nullptr, nullptr, nullptr);
    char* errmsg = nullptr;
    const int rc = sqlite3_exec(db.get(), "CREATE TABLE __askdb_write_probe__(x INTEGER)",
                                nullptr, nullptr, &errmsg);
    if (rc == SQLITE_OK) {
        probe.writes_rejected = false;
        probe.detail = "probe write succeeded; session is not read-only";
    } else {
        probe.writes_rejected = true;
        probe.detail = errmsg != nullptr ? errmsg : "write rejected";
    }
    if (errmsg != nullptr) sqlite3_free(errmsg);
    sqlite3_exec(db.get(), "ROLLBACK", nullptr, nullptr, nullptr);
    return probe;
}

}  // namespace askdb
