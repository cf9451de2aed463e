#pragma once

#include <string>
#include <utility>
#include <vector>

#include "askdb/domain.hpp"

namespace askdb {

// Bootstrap and oracle utilities. These open writable or raw sessions and
// deliberately bypass the guardrail/executor stack: they exist to build
// fixture databases from seed scripts and to let tests read expected values
// straight off the file. Nothing on the query path calls them.

// Creates (or replaces) a database file from a SQL script.
void load_fixture(const std::string& db_path, const std::string& sql_script);

// Reads a seed script from disk and applies it.
void load_fixture_file(const std::string& db_path, const std::string& script_path);

struct RawResult {
    std::vector<std::string> column_names;
    std::vector<Row> rows;
};

// Direct query without guardrail, row cap, or timeout.
RawResult raw_query(const std::string& db_path, const std::string& sql);

// Runs arbitrary statements on a writable connection (fuzz-harness use).
// Returns the engine error message, empty on success.
std::string raw_execute(const std::string& db_path, const std::string& sql);

// Digest over every user table's full contents; the write-soundness checks
// compare before/after values.
std::string database_checksum(const std::string& db_path);

}  // namespace askdb
