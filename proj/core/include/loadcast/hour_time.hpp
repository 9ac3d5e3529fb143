#pragma once

#include <cstdint>
#include <string>

namespace loadcast {

// Hours since 1970-01-01T00:00 UTC. The toolkit works at hour resolution
// throughout; civil arithmetic below avoids any timezone machinery.
using HourStamp = std::int64_t;

constexpr std::int64_t kHoursPerDay = 24;
constexpr std::int64_t kHoursPerWeek = 168;

struct CivilDate {
    int year = 1970;
    unsigned month = 1;  // 1..12
    unsigned day = 1;    // 1..31
};

struct CivilTime {
    CivilDate date;
    unsigned hour = 0;  // 0..23
};

// Days between 1970-01-01 and the given civil date (Hinnant's algorithm).
std::int64_t days_from_civil(const CivilDate& d);
CivilDate civil_from_days(std::int64_t days);

HourStamp make_hour(int year, unsigned month, unsigned day, unsigned hour);
CivilTime civil_from_hour(HourStamp h);

inline unsigned hour_of_day(HourStamp h) {
    std::int64_t m = h % kHoursPerDay;
    return static_cast<unsigned>(m < 0 ? m + kHoursPerDay : m);
}

// 0 = Monday .. 6 = Sunday.
unsigned weekday_of(HourStamp h);
inline bool is_weekend(HourStamp h) { return weekday_of(h) >= 5; }

int year_of(HourStamp h);

// "YYYY-MM-DDTHH:MM" (optionally ":SS" and a trailing 'Z'); a space instead
// of 'T' is also accepted. Throws std::runtime_error when minutes/seconds are
// nonzero or the text does not parse.
HourStamp parse_iso_hour(const std::string& text);
// Date-only form "YYYY-MM-DD" -> midnight of that day.
HourStamp parse_iso_date(const std::string& text);

std::string format_iso_hour(HourStamp h);   // "YYYY-MM-DDTHH:00"
std::string format_iso_date(HourStamp h);   // "YYYY-MM-DD"

}  // namespace loadcast
