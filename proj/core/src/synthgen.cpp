#include "loadcast/synthgen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "loadcast/rng.hpp"

namespace loadcast {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHoursPerYear = 8760.0;

constexpr double kTempMean = 12.0;
constexpr double kTempAnnualAmp = 10.0;
constexpr double kTempNoiseStd = 1.5;
// Annual phase of the temperature minimum (mid-January).
constexpr double kColdPhase = kTwoPi * (14.0 * 24.0) / kHoursPerYear;

constexpr double kDirectRadiationPeak = 600.0;
constexpr double kDiffuseRadiationPeak = 250.0;

struct DayHoliday {
    unsigned month;
    unsigned day;
};
constexpr DayHoliday kHolidayDates[] = {{1, 1},  {5, 1},   {7, 14},  {8, 15}, {11, 1},
                                        {12, 24}, {12, 25}, {12, 26}, {12, 31}};

}  // namespace

void SynthSpec::validate() const {
    if (end_year < start_year)
        throw std::invalid_argument("synth spec: end_year must be >= start_year");
    if (daily_amp < 0 || weekly_amp < 0 || seasonal_amp < 0 || noise_std < 0)
        throw std::invalid_argument("synth spec: amplitudes and noise_std must be >= 0");
    if (!(holiday_damping > 0.0 && holiday_damping <= 1.0))
        throw std::invalid_argument("synth spec: holiday_damping must be in (0, 1]");
}

HolidaySet synth_holidays(const SynthSpec& spec) {
    HolidaySet holidays;
    for (int year = spec.start_year; year <= spec.end_year; ++year)
        for (const auto& d : kHolidayDates) holidays.insert(make_hour(year, d.month, d.day, 0));
    return holidays;
}

MultiSeries generate(const SynthSpec& spec) {
    spec.validate();
    const HolidaySet holidays = synth_holidays(spec);
    const HourStamp first = make_hour(spec.start_year, 1, 1, 0);
    const HourStamp last = make_hour(spec.end_year, 12, 31, 23);

    MultiSeries series;
    series.origin = "synthetic";
    series.records.reserve(static_cast<std::size_t>(last - first + 1));

    Rng rng(spec.seed);
    for (HourStamp t = first; t <= last; ++t) {
        HourlyRecord rec;
        rec.timestamp = t;
        apply_calendar_flags(rec, holidays);

        const int year = year_of(t);
        const double hour_of_year = static_cast<double>(t - make_hour(year, 1, 1, 0));
        const double annual_phase = kTwoPi * hour_of_year / kHoursPerYear;
        const double hod = static_cast<double>(hour_of_day(t));
        const double how = static_cast<double>(weekday_of(t)) * 24.0 + hod;

        rec.temperature = kTempMean - kTempAnnualAmp * std::cos(annual_phase - kColdPhase) +
                          kTempNoiseStd * rng.next_gaussian();

        // Sun proxy: above horizon 06:00-18:00, stronger in summer. Night
        // hours are exactly zero, not sin(pi) rounding dust.
        const double sun =
            (hod > 6.0 && hod < 18.0) ? std::sin(kTwoPi * (hod - 6.0) / 24.0) : 0.0;
        const double summer_factor =
            0.65 - 0.35 * std::cos(annual_phase - kColdPhase);  // ~0.3 winter, ~1.0 summer
        rec.radiation_direct = kDirectRadiationPeak * sun * summer_factor;
        rec.radiation_diffuse = kDiffuseRadiationPeak * sun * (0.8 + 0.2 * summer_factor);

        double load = spec.base_load;
        load += spec.daily_amp * std::sin(kTwoPi * (hod - 11.0) / 24.0);   // evening peak
        load += spec.weekly_amp * std::sin(kTwoPi * how / 168.0);
        load += spec.seasonal_amp * std::cos(annual_phase - kColdPhase);   // winter peak
        load += spec.temp_coupling * std::max(0.0, spec.comfort_threshold - rec.temperature);
        load += spec.noise_std * rng.next_gaussian();
        if (rec.is_weekend_or_holiday) load *= spec.holiday_damping;
        rec.consumption = load;

        series.records.push_back(rec);
    }
    return series;
}

}  // namespace loadcast
