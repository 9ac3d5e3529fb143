#include "loadcast/hour_time.hpp"

#include <cstdio>
#include <stdexcept>

namespace loadcast {

std::int64_t days_from_civil(const CivilDate& d) {
    std::int64_t y = d.year;
    y -= d.month <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (d.month + (d.month > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned day = doy - (153 * mp + 2) / 5 + 1;
    const unsigned month = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (month <= 2)), month, day};
}

HourStamp make_hour(int year, unsigned month, unsigned day, unsigned hour) {
    return days_from_civil(CivilDate{year, month, day}) * kHoursPerDay + hour;
}

CivilTime civil_from_hour(HourStamp h) {
    std::int64_t days = h / kHoursPerDay;
    std::int64_t rem = h % kHoursPerDay;
    if (rem < 0) {
        rem += kHoursPerDay;
        --days;
    }
    return CivilTime{civil_from_days(days), static_cast<unsigned>(rem)};
}

unsigned weekday_of(HourStamp h) {
    std::int64_t days = h / kHoursPerDay;
    if (h % kHoursPerDay < 0) --days;
    // 1970-01-01 was a Thursday (weekday 3 with Monday = 0).
    std::int64_t wd = (days + 3) % 7;
    return static_cast<unsigned>(wd < 0 ? wd + 7 : wd);
}

int year_of(HourStamp h) { return civil_from_hour(h).date.year; }

namespace {

[[noreturn]] void bad_timestamp(const std::string& text) {
    throw std::runtime_error("unparseable timestamp '" + text + "'");
}

bool valid_date(int year, unsigned month, unsigned day) {
    if (month < 1 || month > 12 || day < 1 || day > 31) return false;
    CivilDate d{year, month, day};
    CivilDate back = civil_from_days(days_from_civil(d));
    return back.year == year && back.month == month && back.day == day;
}

}  // namespace

HourStamp parse_iso_hour(const std::string& text) {
    int year = 0;
    unsigned month = 0, day = 0, hour = 0, minute = 0, second = 0;
    char sep = 0;
    int n = std::sscanf(text.c_str(), "%d-%u-%u%c%u:%u:%u", &year, &month, &day, &sep,
                        &hour, &minute, &second);
    if (n < 6 || (sep != 'T' && sep != ' ')) bad_timestamp(text);
    if (!valid_date(year, month, day) || hour > 23) bad_timestamp(text);
    if (minute != 0 || (n == 7 && second != 0))
        throw std::runtime_error("sub-hourly timestamp '" + text + "'");
    return make_hour(year, month, day, hour);
}

HourStamp parse_iso_date(const std::string& text) {
    int year = 0;
    unsigned month = 0, day = 0;
    if (std::sscanf(text.c_str(), "%d-%u-%u", &year, &month, &day) != 3 ||
        !valid_date(year, month, day))
        bad_timestamp(text);
    return make_hour(year, month, day, 0);
}

std::string format_iso_hour(HourStamp h) {
    CivilTime t = civil_from_hour(h);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02u:00", t.date.year, t.date.month,
                  t.date.day, t.hour);
    return buf;
}

std::string format_iso_date(HourStamp h) {
    CivilTime t = civil_from_hour(h);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", t.date.year, t.date.month, t.date.day);
    return buf;
}

}  // namespace loadcast
