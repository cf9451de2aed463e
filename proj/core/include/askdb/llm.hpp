#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "askdb/domain.hpp"

namespace askdb {

enum class PromptRole { generate_sql, correct_sql, rate_result, interpret_result, route_task };

std::string_view to_string(PromptRole role);
std::optional<PromptRole> prompt_role_from_string(std::string_view s);

struct ProviderRequest {
    PromptRole role = PromptRole::generate_sql;
    std::string rendered_prompt;
    double temperature = 0.0;
    int max_output = 2048;
};

struct ProviderResponse {
    std::string text;
    std::int64_t latency_ms = 0;
    std::string provider_id;
    bool truncated = false;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual ProviderResponse complete(const ProviderRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Prompt templates
// ---------------------------------------------------------------------------

// Deterministic template per role. correct_sql requires non-empty history and
// embeds the prior SQL, the failure (error text / empty-result note / refusal),
// the prior rating flags, and the correction hint. rate_result and
// interpret_result read the newest history entry's outcome; interpret_result
// additionally embeds `extract_text`.
std::string render_prompt(PromptRole role, const Question& question,
                          const std::string& schema_text,
                          const std::vector<AttemptTrace>& history,
                          const std::string& extract_text = "",
                          std::string_view verbosity = "concise");

// Pulls the first statement-like span out of a model reply: code fences and
// surrounding prose are stripped. nullopt when nothing SQL-like is present
// (refusal text must not silently reach the executor).
std::optional<std::string> extract_sql(const std::string& response_text);

struct ParsedRating {
    double score = 0.0;
    std::string reason;
    bool parsed = false;
};

// Lenient "SCORE: <0-1> / REASON: <text>" parse; anything unparseable keeps
// score 0.0 so the loop regenerates rather than trusting garbage.
ParsedRating parse_rating(const std::string& text);

// ---------------------------------------------------------------------------
// Scripted provider
// ---------------------------------------------------------------------------

struct ScriptedStep {
    PromptRole expected_role = PromptRole::generate_sql;
    std::string response_text;
};

// Replays authored responses strictly in order. Asking for the wrong role or
// running past the last step throws ScenarioViolation.
class ScriptedProvider final : public Provider {
public:
    explicit ScriptedProvider(std::vector<ScriptedStep> steps,
                              std::string provider_id = "scripted");

    ProviderResponse complete(const ProviderRequest& request) override;

    std::size_t consumed() const;
    std::size_t remaining() const;

private:
    std::vector<ScriptedStep> steps_;
    std::size_t cursor_ = 0;
    std::string provider_id_;
    mutable std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Live provider (HTTP chat-completion endpoint)
// ---------------------------------------------------------------------------

struct LiveProviderConfig {
    std::string endpoint;  // base URL, e.g. "https://api.example.com"
    std::string model_name;
    std::string api_key;   // from THOR_LLM_API_KEY
    int max_attempts = 3;
    int backoff_base_ms = 250;
};

class HttpChatProvider final : public Provider {
public:
    explicit HttpChatProvider(LiveProviderConfig config);

    // Retries transient transport failures with exponential backoff
    // (base x2 per attempt); throws ProviderUnavailable once attempts are
    // exhausted. Responses longer than max_output are flagged truncated.
    ProviderResponse complete(const ProviderRequest& request) override;

    // Test seam: replaces the inter-attempt sleep.
    void set_backoff_sleeper(std::function<void(int)> sleeper);

    int last_attempt_count() const { return last_attempt_count_; }

private:
    LiveProviderConfig config_;
    std::function<void(int)> sleeper_;
    int last_attempt_count_ = 0;
};

}  // namespace askdb
