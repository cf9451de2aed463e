#include "askdb/clock.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace askdb {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yr + (m <= 2));
}

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return lengths[static_cast<std::size_t>(month - 1)];
}

bool parse_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        value = value * 10 + (s[i] - '0');
    }
    out = value;
    return true;
}

}  // namespace

Timestamp civil_to_timestamp(const CivilTime& c) {
    const std::int64_t days = days_from_civil(c.year, c.month, c.day);
    const std::int64_t secs = days * 86400 + c.hour * 3600 + c.minute * 60 + c.second;
    return Timestamp(std::chrono::seconds(secs));
}

CivilTime timestamp_to_civil(Timestamp t) {
    std::int64_t secs = t.time_since_epoch().count();
    std::int64_t days = secs / 86400;
    std::int64_t rem = secs % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    CivilTime c;
    civil_from_days(days, c.year, c.month, c.day);
    c.hour = static_cast<int>(rem / 3600);
    c.minute = static_cast<int>((rem % 3600) / 60);
    c.second = static_cast<int>(rem % 60);
    return c;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    // Trim surrounding whitespace.
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    CivilTime c;
    if (!parse_int(text, 0, 4, c.year)) return std::nullopt;
    if (text.size() == 4) return std::nullopt;  // bare year is an ordinary number
    if (text.size() < 7 || text[4] != '-') return std::nullopt;
    if (!parse_int(text, 5, 2, c.month)) return std::nullopt;
    if (c.month < 1 || c.month > 12) return std::nullopt;
    if (text.size() == 7) return civil_to_timestamp(c);  // "YYYY-MM"
    if (text.size() < 10 || text[7] != '-') return std::nullopt;
    if (!parse_int(text, 8, 2, c.day)) return std::nullopt;
    if (c.day < 1 || c.day > days_in_month(c.year, c.month)) return std::nullopt;
    if (text.size() == 10) return civil_to_timestamp(c);  // "YYYY-MM-DD"
    if (text[10] != ' ' && text[10] != 'T') return std::nullopt;
    if (text.size() < 16 || text[13] != ':') return std::nullopt;
    if (!parse_int(text, 11, 2, c.hour) || !parse_int(text, 14, 2, c.minute)) {
        return std::nullopt;
    }
    if (c.hour > 23 || c.minute > 59) return std::nullopt;
    if (text.size() == 16) return civil_to_timestamp(c);  // "YYYY-MM-DD HH:MM"
    if (text.size() < 19 || text[16] != ':') return std::nullopt;
    if (!parse_int(text, 17, 2, c.second)) return std::nullopt;
    if (c.second > 59) return std::nullopt;
    // Tolerate a trailing "Z" or fractional seconds.
    if (text.size() > 19) {
        std::string_view rest = text.substr(19);
        if (rest == "Z") return civil_to_timestamp(c);
        if (rest.size() >= 2 && rest[0] == '.') {
            for (std::size_t i = 1; i < rest.size(); ++i) {
                if (rest[i] == 'Z' && i + 1 == rest.size()) break;
                if (!std::isdigit(static_cast<unsigned char>(rest[i]))) return std::nullopt;
            }
            return civil_to_timestamp(c);
        }
        return std::nullopt;
    }
    return civil_to_timestamp(c);
}

std::string format_timestamp(Timestamp t) {
    const CivilTime c = timestamp_to_civil(t);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d", c.year, c.month,
                  c.day, c.hour, c.minute, c.second);
    return buf;
}

std::string format_date(Timestamp t) {
    const CivilTime c = timestamp_to_civil(t);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
    return buf;
}

std::string format_iso8601(Timestamp t) {
    const CivilTime c = timestamp_to_civil(t);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month,
                  c.day, c.hour, c.minute, c.second);
    return buf;
}

Timestamp add_months(Timestamp t, int months) {
    CivilTime c = timestamp_to_civil(t);
    int total = c.year * 12 + (c.month - 1) + months;
    c.year = total / 12;
    c.month = total % 12 + 1;
    if (total < 0 && total % 12 != 0) {
        // Integer division truncates toward zero; normalize negative months.
        c.year -= 1;
        c.month = total - (c.year * 12) + 1;
    }
    c.day = std::min(c.day, days_in_month(c.year, c.month));
    return civil_to_timestamp(c);
}

Timestamp SystemClock::now() const {
    return std::chrono::time_point_cast<std::chrono::seconds>(
        std::chrono::system_clock::now());
}

}  // namespace askdb
