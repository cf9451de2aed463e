#include "askdb/llm.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "askdb/errors.hpp"

namespace askdb {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_word_boundary(const std::string& text, std::size_t pos, std::size_t len) {
    const auto is_word_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    if (pos > 0 && is_word_char(text[pos - 1])) return false;
    if (pos + len < text.size() && is_word_char(text[pos + len])) return false;
    return true;
}

// Statement verbs extraction will anchor on. Write verbs are included on
// purpose: a write statement must reach the guardrail and be refused there,
// not vanish in extraction.
constexpr std::string_view kStatementVerbs[] = {
    "select", "with",   "insert", "update", "delete", "create", "drop",
    "alter",  "merge",  "replace", "truncate", "explain", "pragma", "values",
};

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

// First top-level semicolon (outside single quotes); npos when absent.
std::size_t first_statement_end(const std::string& text) {
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\'') {
            if (in_string && i + 1 < text.size() && text[i + 1] == '\'') {
                ++i;
                continue;
            }
            in_string = !in_string;
        } else if (c == ';' && !in_string) {
            return i;
        }
    }
    return std::string::npos;
}

std::optional<std::string> find_statement_span(const std::string& text) {
    const std::string folded = lower(text);
    std::size_t best = std::string::npos;
    for (std::string_view verb : kStatementVerbs) {
        std::size_t pos = folded.find(verb);
        while (pos != std::string::npos) {
            if (is_word_boundary(folded, pos, verb.size())) {
                if (pos < best) best = pos;
                break;
            }
            pos = folded.find(verb, pos + 1);
        }
    }
    if (best == std::string::npos) return std::nullopt;
    std::string span = text.substr(best);
    const std::size_t semi = first_statement_end(span);
    if (semi != std::string::npos) span = span.substr(0, semi);
    span = trim(std::move(span));
    // Drop a trailing fence left over from sloppy formatting.
    while (span.size() >= 3 && span.compare(span.size() - 3, 3, "```") == 0) {
        span = trim(span.substr(0, span.size() - 3));
    }
    if (span.empty()) return std::nullopt;
    return span;
}

}  // namespace

std::string_view to_string(PromptRole role) {
    switch (role) {
        case PromptRole::generate_sql: return "generate_sql";
        case PromptRole::correct_sql: return "correct_sql";
        case PromptRole::rate_result: return "rate_result";
        case PromptRole::interpret_result: return "interpret_result";
        case PromptRole::route_task: return "route_task";
    }
    return "generate_sql";
}

std::optional<PromptRole> prompt_role_from_string(std::string_view s) {
    if (s == "generate_sql") return PromptRole::generate_sql;
    if (s == "correct_sql") return PromptRole::correct_sql;
    if (s == "rate_result") return PromptRole::rate_result;
    if (s == "interpret_result") return PromptRole::interpret_result;
    if (s == "route_task") return PromptRole::route_task;
    return std::nullopt;
}

std::string render_prompt(PromptRole role, const Question& question,
                          const std::string& schema_text,
                          const std::vector<AttemptTrace>& history,
                          const std::string& extract_text, std::string_view verbosity) {
    std::string prompt;
    switch (role) {
        case PromptRole::generate_sql: {
            prompt += "You are a SQL analyst for a relational database.\n";
            prompt += "Database schema:\n" + schema_text + "\n";
            prompt += "Question: " + question.text + "\n";
            prompt += "Instructions: produce exactly one read-only SELECT statement for the "
                      "schema above. Never modify data. Reply with SQL only.\n";
            break;
        }
        case PromptRole::correct_sql: {
            if (history.empty()) {
                throw PreconditionViolation("correct_sql requires at least one prior attempt");
            }
            const AttemptTrace& prior = history.back();
            prompt += "You are a SQL analyst repairing a rejected query.\n";
            prompt += "Database schema:\n" + schema_text + "\n";
            prompt += "Question: " + question.text + "\n";
            prompt += "Previous SQL (attempt " +
                      std::to_string(prior.candidate.attempt_number) + "):\n" +
                      prior.candidate.sql_text + "\n";
            if (!prior.guardrail_verdict.allowed()) {
                prompt += "Problem: the statement was refused (";
                prompt += to_string(*prior.guardrail_verdict.refusal_reason);
                prompt += ").\n";
            } else if (prior.outcome) {
                switch (prior.outcome->status) {
                    case OutcomeStatus::error:
                        prompt += "Problem: execution failed with: " +
                                  prior.outcome->error_message + "\n";
                        break;
                    case OutcomeStatus::empty:
                        prompt += "Problem: the query returned no rows.\n";
                        break;
                    default:
                        prompt += "Problem: the result was rated unsatisfactory.\n";
                        break;
                }
            }
            if (prior.rating && !prior.rating->flags.empty()) {
                prompt += "Quality flags:";
                for (Flag flag : prior.rating->flags) {
                    prompt += " ";
                    prompt += to_string(flag);
                }
                prompt += "\n";
            }
            if (prior.correction_hint) {
                prompt += "Guidance: " + *prior.correction_hint + "\n";
            }
            prompt += "Instructions: produce exactly one read-only SELECT statement. Reply "
                      "with SQL only.\n";
            break;
        }
        case PromptRole::rate_result: {
            const ExecutionOutcome* outcome =
                (!history.empty() && history.back().outcome) ? &*history.back().outcome
                                                             : nullptr;
            prompt += "You rate how well a SQL result answers a question.\n";
            prompt += "Question: " + question.text + "\n";
            if (outcome != nullptr) {
                prompt += "Result: " + std::to_string(outcome->rows.size()) + " rows";
                if (!outcome->column_names.empty()) {
                    prompt += " with columns ";
                    for (std::size_t i = 0; i < outcome->column_names.size(); ++i) {
                        if (i > 0) prompt += ", ";
                        prompt += outcome->column_names[i];
                    }
                }
                prompt += ".\n";
                const std::size_t sample = std::min<std::size_t>(outcome->rows.size(), 5);
                for (std::size_t r = 0; r < sample; ++r) {
                    prompt += "Row " + std::to_string(r + 1) + ":";
                    for (const Value& v : outcome->rows[r]) {
                        prompt += " " + value_to_string(v);
                    }
                    prompt += "\n";
                }
            }
            prompt += "Respond exactly as:\nSCORE: <number between 0 and 1>\nREASON: <one "
                      "line>\n";
            break;
        }
        case PromptRole::interpret_result: {
            const ExecutionOutcome* outcome =
                (!history.empty() && history.back().outcome) ? &*history.back().outcome
                                                             : nullptr;
            prompt += "You summarize SQL results for a business user.\n";
            prompt += "Question: " + question.text + "\n";
            if (outcome != nullptr) {
                prompt += "Columns:";
                for (const std::string& name : outcome->column_names) {
                    prompt += " " + name;
                }
                prompt += "\n";
                const std::size_t sample = std::min<std::size_t>(outcome->rows.size(), 10);
                for (std::size_t r = 0; r < sample; ++r) {
                    prompt += "Row " + std::to_string(r + 1) + ":";
                    for (const Value& v : outcome->rows[r]) {
                        prompt += " " + value_to_string(v);
                    }
                    prompt += "\n";
                }
            }
            if (!extract_text.empty()) {
                prompt += "Key values: " + extract_text + "\n";
            }
            if (verbosity == "detailed") {
                prompt += "Write a short explanatory paragraph. Use only numbers present in "
                          "the data above.\n";
            } else {
                prompt += "Write at most 2 sentences. Use only numbers present in the data "
                          "above.\n";
            }
            break;
        }
        case PromptRole::route_task: {
            prompt += "Decide whether this question needs structured data analysis over a "
                      "relational database.\n";
            prompt += "Question: " + question.text + "\n";
            prompt += "Respond with exactly one token: T2S or OUT_OF_SCOPE.\n";
            break;
        }
    }
    return prompt;
}

std::optional<std::string> extract_sql(const std::string& response_text) {
    // Fenced block first.
    const std::size_t fence = response_text.find("```");
    if (fence != std::string::npos) {
        std::size_t body = fence + 3;
        // Optional language tag up to end of line.
        const std::size_t nl = response_text.find('\n', body);
        const std::size_t close = response_text.find("```", body);
        if (nl != std::string::npos && close != std::string::npos && nl < close) {
            body = nl + 1;
        }
        if (close != std::string::npos && close > body) {
            const std::string inner = response_text.substr(body, close - body);
            return find_statement_span(inner);
        }
    }
    return find_statement_span(response_text);
}

ParsedRating parse_rating(const std::string& text) {
    ParsedRating rating;
    const std::string folded = lower(text);
    const std::size_t score_pos = folded.find("score");
    if (score_pos == std::string::npos) return rating;
    std::size_t i = score_pos + 5;
    while (i < text.size() && (text[i] == ':' || text[i] == '=' ||
                               std::isspace(static_cast<unsigned char>(text[i])))) {
        ++i;
    }
    std::size_t digits = i;
    while (digits < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[digits])) || text[digits] == '.')) {
        ++digits;
    }
    if (digits == i) return rating;
    try {
        rating.score = std::stod(text.substr(i, digits - i));
    } catch (const std::exception&) {
        return rating;
    }
    rating.score = std::clamp(rating.score, 0.0, 1.0);
    rating.parsed = true;
    const std::size_t reason_pos = folded.find("reason");
    if (reason_pos != std::string::npos) {
        std::size_t r = reason_pos + 6;
        while (r < text.size() && (text[r] == ':' || text[r] == '=' || text[r] == ' ')) ++r;
        const std::size_t eol = text.find('\n', r);
        rating.reason = trim(text.substr(r, eol == std::string::npos ? std::string::npos
                                                                     : eol - r));
    }
    return rating;
}

// ---------------------------------------------------------------------------
// ScriptedProvider
// ---------------------------------------------------------------------------

ScriptedProvider::ScriptedProvider(std::vector<ScriptedStep> steps, std::string provider_id)
    : steps_(std::move(steps)), provider_id_(std::move(provider_id)) {}

ProviderResponse ScriptedProvider::complete(const ProviderRequest& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (cursor_ >= steps_.size()) {
        throw ScenarioViolation("scenario '" + provider_id_ + "' has no step left for role " +
                                std::string(to_string(request.role)));
    }
    const ScriptedStep& step = steps_[cursor_];
    if (step.expected_role != request.role) {
        throw ScenarioViolation("scenario '" + provider_id_ + "' step " +
                                std::to_string(cursor_ + 1) + " expects role " +
                                std::string(to_string(step.expected_role)) + " but got " +
                                std::string(to_string(request.role)));
    }
    ++cursor_;
    ProviderResponse response;
    response.text = step.response_text;
    response.provider_id = provider_id_;
    response.latency_ms = 0;
    return response;
}

std::size_t ScriptedProvider::consumed() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cursor_;
}

std::size_t ScriptedProvider::remaining() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return steps_.size() - cursor_;
}

// ---------------------------------------------------------------------------
// HttpChatProvider
// ---------------------------------------------------------------------------

HttpChatProvider::HttpChatProvider(LiveProviderConfig config)
    : config_(std::move(config)),
      sleeper_([](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); }) {}

void HttpChatProvider::set_backoff_sleeper(std::function<void(int)> sleeper) {
    sleeper_ = std::move(sleeper);
}

ProviderResponse HttpChatProvider::complete(const ProviderRequest& request) {
    nlohmann::json body = {
        {"model", config_.model_name},
        {"temperature", request.temperature},
        {"max_tokens", request.max_output},
        {"messages",
         nlohmann::json::array({{{"role", "user"}, {"content", request.rendered_prompt}}})},
    };
    const std::string payload = body.dump();

    std::string last_error;
    last_attempt_count_ = 0;
    int backoff = config_.backoff_base_ms;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        ++last_attempt_count_;
        const auto started = std::chrono::steady_clock::now();
        httplib::Client client(config_.endpoint);
        client.set_connection_timeout(5, 0);
        client.set_read_timeout(60, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto result = client.Post("/v1/chat/completions", headers, payload, "application/json");
        if (result && result->status >= 200 && result->status < 300) {
            try {
                const nlohmann::json parsed = nlohmann::json::parse(result->body);
                ProviderResponse response;
                response.text =
                    parsed.at("choices").at(0).at("message").at("content").get<std::string>();
                response.provider_id = config_.model_name;
                response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                          std::chrono::steady_clock::now() - started)
                                          .count();
                response.truncated =
                    static_cast<int>(response.text.size()) > request.max_output;
                return response;
            } catch (const std::exception& e) {
                last_error = std::string("malformed provider response: ") + e.what();
            }
        } else if (result) {
            last_error = "provider returned status " + std::to_string(result->status);
        } else {
            last_error = "transport failure: " + httplib::to_string(result.error());
        }
        if (attempt < config_.max_attempts) {
            sleeper_(backoff);
            backoff *= 2;
        }
    }
    throw ProviderUnavailable("provider unreachable after " +
                              std::to_string(config_.max_attempts) + " attempts: " +
                              last_error);
}

}  // namespace askdb
