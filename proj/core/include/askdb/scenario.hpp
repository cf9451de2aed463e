#pragma once

#include <optional>
#include <string>
#include <vector>

#include "askdb/domain.hpp"
#include "askdb/llm.hpp"

namespace askdb {

// One scripted end-to-end scenario: `#!` directive lines carry metadata and
// replay expectations, `# <role>` header lines start a literal response block
// that runs to the next header.
//
//   #! name: pending-status-recovery
//   #! question: Show me the pending deliveries by month.
//   #! datasource: logistics
//   #! expect_status: answered
//   #! expect_attempts: 2
//   # generate_sql
//   SELECT ...
//   # correct_sql
//   SELECT ...
struct Scenario {
    std::string name;
    std::string question;
    std::string datasource_id;
    std::string verbosity = "concise";
    std::vector<std::string> denied_columns;
    std::optional<FinalStatus> expect_status;
    std::optional<int> expect_attempts;
    bool expect_narrative_fallback = false;
    std::vector<ScriptedStep> steps;
    std::string source_path;
};

// Throws ConfigError naming the file and line on malformed input.
Scenario parse_scenario_text(const std::string& text, const std::string& source_name);
Scenario load_scenario_file(const std::string& path);

// Every *.scenario file in the directory, sorted by filename.
std::vector<Scenario> load_scenario_directory(const std::string& dir);

}  // namespace askdb
