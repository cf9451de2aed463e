#pragma once

#include <memory>
#include <string>

#include "askdb/clock.hpp"
#include "askdb/domain.hpp"

namespace askdb {

struct DatasourceConfig {
    std::string id;
    std::string path;  // SQLite database file
    bool read_only = true;
    int statement_timeout_ms = 10000;
    int row_limit = 1000;
};

class Executor {
public:
    virtual ~Executor() = default;
    // Runs one guardrail-approved statement. Query-level failures come back
    // as status=error with the engine's message byte-exact; only transport
    // problems (file missing, unreadable) throw DatasourceUnavailable.
    virtual ExecutionOutcome execute(const std::string& sql) = 0;
    virtual const DatasourceConfig& config() const = 0;
};

struct ReadOnlyProbe {
    bool writes_rejected = false;
    std::string detail;
};

class SqliteExecutor final : public Executor {
public:
    // Throws ConfigError if read_only is not set: the engine never opens a
    // writable query session.
    SqliteExecutor(DatasourceConfig config, const Clock& clock);

    ExecutionOutcome execute(const std::string& sql) override;
    const DatasourceConfig& config() const override { return config_; }

    // Startup check: attempts a trivial write inside a rolled-back probe and
    // reports whether the session rejected it. The engine refuses to start
    // when writes_rejected is false.
    ReadOnlyProbe probe_readonly();

private:
    DatasourceConfig config_;
    const Clock* clock_;
};

}  // namespace askdb
