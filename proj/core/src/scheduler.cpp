#include "askdb/scheduler.hpp"

#include <cctype>
#include <fstream>
#include <iostream>
#include <thread>

#include "askdb/errors.hpp"
#include "askdb/json_io.hpp"

namespace askdb {

ScheduleSpec ScheduleSpec::parse(const std::string& text) {
    ScheduleSpec spec;
    if (text == "@hourly") {
        spec.period = std::chrono::hours(1);
        return spec;
    }
    if (text == "@daily") {
        spec.period = std::chrono::hours(24);
        return spec;
    }
    if (text.rfind("@daily ", 0) == 0) {
        const std::string at = text.substr(7);
        if (at.size() == 5 && at[2] == ':' && std::isdigit(static_cast<unsigned char>(at[0])) &&
            std::isdigit(static_cast<unsigned char>(at[1])) &&
            std::isdigit(static_cast<unsigned char>(at[3])) &&
            std::isdigit(static_cast<unsigned char>(at[4]))) {
            const int hour = (at[0] - '0') * 10 + (at[1] - '0');
            const int minute = (at[3] - '0') * 10 + (at[4] - '0');
            if (hour < 24 && minute < 60) {
                spec.period = std::chrono::hours(24);
                spec.at_minute_of_day = hour * 60 + minute;
                return spec;
            }
        }
        throw ConfigError("invalid schedule '" + text + "': @daily takes HH:MM");
    }
    if (text.rfind("@every ", 0) == 0) {
        const std::string rest = text.substr(7);
        std::size_t i = 0;
        while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
        if (i == 0 || i + 1 != rest.size()) {
            throw ConfigError("invalid schedule '" + text + "': @every takes N{s|m|h|d}");
        }
        const long long n = std::stoll(rest.substr(0, i));
        if (n <= 0) throw ConfigError("invalid schedule '" + text + "': period must be > 0");
        switch (rest[i]) {
            case 's': spec.period = std::chrono::seconds(n); break;
            case 'm': spec.period = std::chrono::minutes(n); break;
            case 'h': spec.period = std::chrono::hours(n); break;
            case 'd': spec.period = std::chrono::hours(24 * n); break;
            default:
                throw ConfigError("invalid schedule '" + text + "': unit must be s, m, h or d");
        }
        return spec;
    }
    throw ConfigError("invalid schedule '" + text +
                      "': expected @hourly, @daily[ HH:MM] or @every N{s|m|h|d}");
}

ScheduledReporter::ScheduledReporter(Engine& engine, std::string question,
                                     std::string datasource_id, ScheduleSpec spec,
                                     std::string output_path)
    : engine_(&engine),
      question_(std::move(question)),
      datasource_id_(std::move(datasource_id)),
      spec_(spec),
      output_path_(std::move(output_path)) {
    const Timestamp now = engine_->clock().now();
    if (spec_.at_minute_of_day) {
        CivilTime c = timestamp_to_civil(now);
        c.hour = *spec_.at_minute_of_day / 60;
        c.minute = *spec_.at_minute_of_day % 60;
        c.second = 0;
        Timestamp candidate = civil_to_timestamp(c);
        if (candidate <= now) candidate += spec_.period;
        next_fire_ = candidate;
    } else {
        next_fire_ = now + spec_.period;
    }
}

void ScheduledReporter::fire() {
    nlohmann::json doc;
    doc["scheduled_at"] = format_iso8601(engine_->clock().now());
    doc["question"] = question_;
    doc["datasource_id"] = datasource_id_;
    try {
        const AskOutcome outcome =
            engine_->ask(question_, datasource_id_, "scheduled-report");
        if (outcome.answer) {
            doc["answer"] = to_json(*outcome.answer);
        } else {
            doc["routing"] = to_json(outcome.route);
        }
    } catch (const EngineError& e) {
        // Logged and retried at the next tick; ticks are never silently lost.
        doc["error"] = e.what();
        std::cerr << "scheduled report failed: " << e.what() << "\n";
    }
    std::ofstream out(output_path_, std::ios::app);
    if (!out) {
        std::cerr << "cannot append scheduled report to " << output_path_ << "\n";
        return;
    }
    out << doc.dump() << "\n";
    ++documents_written_;
}

bool ScheduledReporter::poll() {
    const Timestamp now = engine_->clock().now();
    if (now < next_fire_) return false;
    fire();
    while (next_fire_ <= now) next_fire_ += spec_.period;
    return true;
}

void ScheduledReporter::run_blocking(const std::atomic<bool>& stop) {
    while (!stop.load()) {
        poll();
        std::this_thread::sleep_for(std::chrono::seconds(1));
    }
}

}  // namespace askdb
