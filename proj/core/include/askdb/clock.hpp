#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace askdb {

// All engine timestamps are UTC with second precision.
using Timestamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::seconds>;

struct CivilTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
};

Timestamp civil_to_timestamp(const CivilTime& c);
CivilTime timestamp_to_civil(Timestamp t);

// Lenient parse of the timestamp shapes the engine meets in result cells:
// "YYYY-MM-DD HH:MM:SS", "YYYY-MM-DDTHH:MM:SS[Z]", "YYYY-MM-DD HH:MM",
// "YYYY-MM-DD", "YYYY-MM". Anything else is nullopt.
std::optional<Timestamp> parse_timestamp(std::string_view text);

std::string format_timestamp(Timestamp t);  // "YYYY-MM-DD HH:MM:SS"
std::string format_date(Timestamp t);       // "YYYY-MM-DD"
std::string format_iso8601(Timestamp t);    // "YYYY-MM-DDTHH:MM:SSZ"

// Calendar month shift with the day clamped to the target month's length,
// e.g. 2025-03-31 minus 1 month -> 2025-02-28.
Timestamp add_months(Timestamp t, int months);

class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
public:
    Timestamp now() const override;
};

// Returns a constant instant; the determinism tests and scenario replays run
// on this.
class FixedClock final : public Clock {
public:
    explicit FixedClock(Timestamp at) : at_(at) {}
    Timestamp now() const override { return at_; }

private:
    Timestamp at_;
};

// Advanceable clock for the scheduler tests.
class ManualClock final : public Clock {
public:
    explicit ManualClock(Timestamp start) : at_(start) {}
    Timestamp now() const override { return at_; }
    void advance(std::chrono::seconds by) { at_ += by; }
    void set(Timestamp to) { at_ = to; }

private:
    Timestamp at_;
};

}  // namespace askdb
