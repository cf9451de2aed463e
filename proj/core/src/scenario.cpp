#include "askdb/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "askdb/errors.hpp"

namespace askdb {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string current;
    for (char c : value) {
        if (c == ',') {
            const std::string item = trim(current);
            if (!item.empty()) out.push_back(item);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    const std::string item = trim(current);
    if (!item.empty()) out.push_back(item);
    return out;
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& source_name) {
    Scenario scenario;
    scenario.source_path = source_name;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::optional<PromptRole> current_role;
    std::vector<std::string> block;

    auto flush_block = [&]() {
        if (!current_role) return;
        // Trim leading/trailing blank lines; inner lines stay literal.
        std::size_t first = 0;
        std::size_t last = block.size();
        while (first < last && trim(block[first]).empty()) ++first;
        while (last > first && trim(block[last - 1]).empty()) --last;
        std::string body;
        for (std::size_t i = first; i < last; ++i) {
            if (i > first) body += "\n";
            body += block[i];
        }
        scenario.steps.push_back(ScriptedStep{*current_role, std::move(body)});
        block.clear();
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.rfind("#!", 0) == 0) {
            const std::string directive = trim(line.substr(2));
            const std::size_t colon = directive.find(':');
            if (colon == std::string::npos) {
                fail(source_name, line_no, "directive needs 'key: value'");
            }
            const std::string key = trim(directive.substr(0, colon));
            const std::string value = trim(directive.substr(colon + 1));
            if (key == "name") {
                scenario.name = value;
            } else if (key == "question") {
                scenario.question = value;
            } else if (key == "datasource") {
                scenario.datasource_id = value;
            } else if (key == "verbosity") {
                scenario.verbosity = value;
            } else if (key == "denied_columns") {
                scenario.denied_columns = split_list(value);
            } else if (key == "expect_status") {
                const auto status = final_status_from_string(value);
                if (!status) fail(source_name, line_no, "unknown final status '" + value + "'");
                scenario.expect_status = status;
            } else if (key == "expect_attempts") {
                try {
                    scenario.expect_attempts = std::stoi(value);
                } catch (const std::exception&) {
                    fail(source_name, line_no, "expect_attempts must be an integer");
                }
            } else if (key == "expect_narrative_fallback") {
                scenario.expect_narrative_fallback = (value == "true" || value == "yes");
            } else {
                fail(source_name, line_no, "unknown directive '" + key + "'");
            }
            continue;
        }
        if (!line.empty() && line[0] == '#') {
            const std::string role_name = trim(line.substr(1));
            const auto role = prompt_role_from_string(role_name);
            if (!role) {
                fail(source_name, line_no, "unknown role header '" + role_name + "'");
            }
            flush_block();
            current_role = role;
            continue;
        }
        if (current_role) {
            block.push_back(line);
        } else if (!trim(line).empty()) {
            fail(source_name, line_no, "content before the first role header");
        }
    }
    flush_block();

    if (scenario.name.empty()) fail(source_name, 0, "missing '#! name:' directive");
    if (scenario.question.empty()) fail(source_name, 0, "missing '#! question:' directive");
    if (scenario.datasource_id.empty()) {
        fail(source_name, 0, "missing '#! datasource:' directive");
    }
    return scenario;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read scenario file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str(), path);
}

std::vector<Scenario> load_scenario_directory(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir)) throw ConfigError("scenario directory does not exist: " + dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".scenario") {
            paths.push_back(entry.path().string());
        }
    }
    std::sort(paths.begin(), paths.end());
    std::vector<Scenario> scenarios;
    scenarios.reserve(paths.size());
    for (const std::string& path : paths) {
        scenarios.push_back(load_scenario_file(path));
    }
    return scenarios;
}

}  // namespace askdb
