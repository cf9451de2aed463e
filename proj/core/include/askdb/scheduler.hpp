#pragma once

#include <atomic>
#include <optional>
#include <string>

#include "askdb/engine.hpp"

namespace askdb {

// Schedule grammar: "@hourly", "@daily", "@daily HH:MM", "@every N{s|m|h|d}".
// Anything else throws ConfigError at parse time (startup refusal).
struct ScheduleSpec {
    std::chrono::seconds period{0};
    std::optional<int> at_minute_of_day;  // for @daily HH:MM alignment

    static ScheduleSpec parse(const std::string& text);
};

// Runs one question on a schedule, appending each QueryAnswer document (one
// JSON line) to the output path. Failed runs are logged and retried at the
// next tick; the pipeline's own retry budget is the only intra-tick retry.
class ScheduledReporter {
public:
    ScheduledReporter(Engine& engine, std::string question, std::string datasource_id,
                      ScheduleSpec spec, std::string output_path);

    // Fires when the engine clock has reached the next scheduled instant.
    // Returns true when a document was appended (or a failure was logged).
    bool poll();

    Timestamp next_fire() const { return next_fire_; }
    int documents_written() const { return documents_written_; }

    // Real-time loop for the CLI; polls once a second until stop is set.
    void run_blocking(const std::atomic<bool>& stop);

private:
    void fire();

    Engine* engine_;
    std::string question_;
    std::string datasource_id_;
    ScheduleSpec spec_;
    std::string output_path_;
    Timestamp next_fire_{};
    int documents_written_ = 0;
};

}  // namespace askdb
