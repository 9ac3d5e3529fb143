#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "loadcast/hour_time.hpp"

namespace loadcast {

// Feature layout of one hourly record. The first four are continuous and get
// robust-scaled; the two calendar flags pass through unscaled.
enum Feature : int {
    kConsumption = 0,
    kTemperature = 1,
    kRadiationDirect = 2,
    kRadiationDiffuse = 3,
    kWeekendOrHoliday = 4,
    kHoliday = 5,
};
constexpr int kNumFeatures = 6;
constexpr int kNumContinuousFeatures = 4;

extern const char* const kFeatureNames[kNumFeatures];

// One hour of data. Missing continuous values are represented as NaN until
// fill_missing resolves them.
struct HourlyRecord {
    HourStamp timestamp = 0;
    double consumption = 0.0;
    double temperature = 0.0;
    double radiation_direct = 0.0;
    double radiation_diffuse = 0.0;
    std::uint8_t is_weekend_or_holiday = 0;
    std::uint8_t is_holiday = 0;

    double feature(int f) const;
    void set_feature(int f, double v);
};

struct MultiSeries {
    std::vector<HourlyRecord> records;
    std::string origin;

    bool empty() const { return records.empty(); }
    std::size_t size() const { return records.size(); }
};

using HolidaySet = std::set<HourStamp>;  // midnight stamps of holiday dates

// Recomputes both calendar flags: is_weekend_or_holiday = Sat/Sun or holiday,
// is_holiday = date in the holiday set.
MultiSeries merge_calendar(MultiSeries series, const HolidaySet& holidays);

void apply_calendar_flags(HourlyRecord& rec, const HolidaySet& holidays);

// Completes the hourly grid between the first and last timestamp and resolves
// every missing value: runs of <= 6 missing hours are linearly interpolated
// per feature; longer runs copy the value 168h earlier (then 168h later, then
// +-336h, ... if unavailable). Calendar flags are recomputed from the holiday
// set, never interpolated. Throws when a feature is missing everywhere.
MultiSeries fill_missing(const MultiSeries& series, const HolidaySet& holidays);

// True when the series is a gap-free hourly grid with strictly increasing
// timestamps.
bool is_contiguous_hourly(const MultiSeries& series);

}  // namespace loadcast
