#include "loadcast/series.hpp"

#include <cmath>
#include <stdexcept>

namespace loadcast {

const char* const kFeatureNames[kNumFeatures] = {
    "consumption",         "temperature", "radiation_direct",
    "radiation_diffuse",   "is_weekend_or_holiday", "is_holiday",
};

double HourlyRecord::feature(int f) const {
    switch (f) {
        case kConsumption: return consumption;
        case kTemperature: return temperature;
        case kRadiationDirect: return radiation_direct;
        case kRadiationDiffuse: return radiation_diffuse;
        case kWeekendOrHoliday: return is_weekend_or_holiday;
        case kHoliday: return is_holiday;
        default: throw std::out_of_range("feature index");
    }
}

void HourlyRecord::set_feature(int f, double v) {
    switch (f) {
        case kConsumption: consumption = v; break;
        case kTemperature: temperature = v; break;
        case kRadiationDirect: radiation_direct = v; break;
        case kRadiationDiffuse: radiation_diffuse = v; break;
        case kWeekendOrHoliday: is_weekend_or_holiday = v != 0.0 ? 1 : 0; break;
        case kHoliday: is_holiday = v != 0.0 ? 1 : 0; break;
        default: throw std::out_of_range("feature index");
    }
}

void apply_calendar_flags(HourlyRecord& rec, const HolidaySet& holidays) {
    const HourStamp midnight = rec.timestamp - hour_of_day(rec.timestamp);
    const bool holiday = holidays.count(midnight) > 0;
    rec.is_holiday = holiday ? 1 : 0;
    rec.is_weekend_or_holiday = (holiday || is_weekend(rec.timestamp)) ? 1 : 0;
}

MultiSeries merge_calendar(MultiSeries series, const HolidaySet& holidays) {
    for (auto& rec : series.records) apply_calendar_flags(rec, holidays);
    return series;
}

bool is_contiguous_hourly(const MultiSeries& series) {
    for (std::size_t i = 1; i < series.records.size(); ++i) {
        if (series.records[i].timestamp != series.records[i - 1].timestamp + 1) return false;
    }
    return true;
}

namespace {

constexpr std::size_t kMaxInterpolationGap = 6;

// Value copied from t -/+ 168h, -/+ 336h, ... among the values that were
// present in the raw input. Earlier weeks are preferred over later ones at
// the same shift count.
bool week_shift_lookup(const std::vector<double>& values, const std::vector<char>& known,
                       std::size_t i, double* out) {
    const auto n = static_cast<std::int64_t>(values.size());
    const auto pos = static_cast<std::int64_t>(i);
    for (std::int64_t k = 1;; ++k) {
        const std::int64_t back = pos - k * kHoursPerWeek;
        const std::int64_t fwd = pos + k * kHoursPerWeek;
        if (back < 0 && fwd >= n) return false;
        if (back >= 0 && known[static_cast<std::size_t>(back)]) {
            *out = values[static_cast<std::size_t>(back)];
            return true;
        }
        if (fwd < n && known[static_cast<std::size_t>(fwd)]) {
            *out = values[static_cast<std::size_t>(fwd)];
            return true;
        }
    }
}

void fill_feature(std::vector<double>& values, int feature) {
    const std::size_t n = values.size();
    std::vector<char> known(n);
    std::size_t n_known = 0;
    for (std::size_t i = 0; i < n; ++i) {
        known[i] = !std::isnan(values[i]);
        n_known += known[i] ? 1 : 0;
    }
    if (n_known == 0)
        throw std::runtime_error(std::string("unfillable gap: feature '") +
                                 kFeatureNames[feature] + "' has no observed values");

    std::size_t i = 0;
    while (i < n) {
        if (known[i]) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < n && !known[end]) ++end;
        const std::size_t len = end - i;
        const bool interior = i > 0 && end < n;
        if (interior && len <= kMaxInterpolationGap) {
            const double lo = values[i - 1];
            const double hi = values[end];
            for (std::size_t j = i; j < end; ++j) {
                const double frac =
                    static_cast<double>(j - i + 1) / static_cast<double>(len + 1);
                values[j] = lo + frac * (hi - lo);
            }
        } else {
            for (std::size_t j = i; j < end; ++j) {
                double v;
                if (week_shift_lookup(values, known, j, &v)) {
                    values[j] = v;
                    continue;
                }
                // No observation one-or-more weeks away in either direction:
                // interpolate between (or extend from) the nearest observed
                // neighbours instead.
                std::size_t prev = j;
                while (prev > 0 && !known[prev - 1]) --prev;
                std::size_t next = j;
                while (next < n && !known[next]) ++next;
                const bool has_prev = prev > 0;
                const bool has_next = next < n;
                if (has_prev && has_next) {
                    const double lo = values[prev - 1];
                    const double hi = values[next];
                    const double frac = static_cast<double>(j - prev + 1) /
                                        static_cast<double>(next - prev + 1);
                    values[j] = lo + frac * (hi - lo);
                } else if (has_prev) {
                    values[j] = values[prev - 1];
                } else {
                    values[j] = values[next];
                }
            }
        }
        i = end;
    }
}

}  // namespace

MultiSeries fill_missing(const MultiSeries& series, const HolidaySet& holidays) {
    if (series.records.empty()) throw std::runtime_error("fill_missing: empty series");
    std::size_t n_consumption = 0;
    for (const auto& rec : series.records)
        if (!std::isnan(rec.consumption)) ++n_consumption;
    if (n_consumption < 2)
        throw std::runtime_error("fill_missing: need at least 2 observed consumption values");

    const HourStamp first = series.records.front().timestamp;
    const HourStamp last = series.records.back().timestamp;
    const std::size_t n = static_cast<std::size_t>(last - first + 1);

    MultiSeries out;
    out.origin = series.origin;
    out.records.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.records[i].timestamp = first + static_cast<HourStamp>(i);
        for (int f = 0; f < kNumContinuousFeatures; ++f)
            out.records[i].set_feature(f, std::nan(""));
    }
    for (const auto& rec : series.records) {
        auto& slot = out.records[static_cast<std::size_t>(rec.timestamp - first)];
        slot.consumption = rec.consumption;
        slot.temperature = rec.temperature;
        slot.radiation_direct = rec.radiation_direct;
        slot.radiation_diffuse = rec.radiation_diffuse;
    }

    std::vector<double> column(n);
    for (int f = 0; f < kNumContinuousFeatures; ++f) {
        for (std::size_t i = 0; i < n; ++i) column[i] = out.records[i].feature(f);
        fill_feature(column, f);
        for (std::size_t i = 0; i < n; ++i) out.records[i].set_feature(f, column[i]);
    }
    for (auto& rec : out.records) apply_calendar_flags(rec, holidays);
    return out;
}

}  // namespace loadcast
