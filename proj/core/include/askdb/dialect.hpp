#pragma once

#include <string>
#include <string_view>

#include "askdb/clock.hpp"

namespace askdb::sql {

// Rewrites the accepted SQL superset (ILIKE, DATE_TRUNC, TO_CHAR, INTERVAL
// arithmetic, DATEADD/DATE_SUB, catalog.schema.table names) into the embedded
// engine's dialect. NOW()/CURRENT_DATE/CURRENT_TIMESTAMP become literals
// taken from `now`, which is also what makes scenario replays byte-stable.
// Purely textual: the rewrite cannot introduce statements, only swap
// read-only expressions, and classification always runs on the original.
std::string normalize_for_sqlite(std::string_view sql, Timestamp now);

}  // namespace askdb::sql
