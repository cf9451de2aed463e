#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "askdb/domain.hpp"
#include "askdb/llm.hpp"

namespace askdb {

struct KeyValueExtract {
    enum class Trend { rising, falling, flat };

    std::int64_t total_rows = 0;
    // (column, min, max) over the first numeric column, when one exists.
    std::optional<std::tuple<std::string, double, double>> extrema;
    std::string leading_row_summary;
    // Sign of the least-squares slope over (time, value) pairs; needs a
    // timestamp-like column, a numeric column, and at least 3 rows.
    std::optional<Trend> trend;

    std::string summary_text() const;
    std::vector<std::pair<std::string, std::string>> as_key_values() const;
};

std::string_view to_string(KeyValueExtract::Trend trend);

// Pure function over a rows/truncated outcome; anything else violates the
// precondition (the pipeline owns the no-rows narrative path).
KeyValueExtract extract_key_values(const ExecutionOutcome& outcome);

struct NarrativeResult {
    std::string text;
    bool fallback_used = false;
};

// Asks the interpret_result role for a short narrative, then verifies every
// numeric token in it against the supplied data; hallucinated numbers (or a
// provider failure) swap in the deterministic fallback template.
NarrativeResult narrate(const Question& question, const KeyValueExtract& extract,
                        const ExecutionOutcome& outcome, Provider& provider,
                        std::string_view verbosity);

std::string fallback_narrative(const ExecutionOutcome& outcome);

// Numeric tokens of `narrative` that appear nowhere in the outcome rows or
// the extract. Exposed so the acceptance suite can re-verify delivered
// narratives independently.
std::vector<std::string> narrative_numbers_missing_from_data(
    const std::string& narrative, const ExecutionOutcome& outcome,
    const KeyValueExtract& extract);

}  // namespace askdb
