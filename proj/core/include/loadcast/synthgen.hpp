#pragma once

#include <cstdint>

#include "loadcast/series.hpp"

namespace loadcast {

// Deterministic multi-year hourly generator: daily/weekly/annual sinusoids,
// a cold-weather coupling term, calendar damping and Gaussian noise. Default
// parameters put the robust-scaled consumption roughly inside [-2, 2], so
// the default DBSCAN radius and the +-6 injection magnitude operate at a
// sensible scale, and the clean series produces no DBSCAN flags.
struct SynthSpec {
    int start_year = 2015;
    int end_year = 2019;
    double base_load = 1000.0;        // mean consumption level
    double daily_amp = 120.0;
    double weekly_amp = 40.0;
    double seasonal_amp = 100.0;
    double temp_coupling = 6.0;       // added load per degree below comfort
    double comfort_threshold = 15.0;  // degrees C
    double noise_std = 18.0;
    double holiday_damping = 0.93;    // multiplier on weekend/holiday hours
    std::uint64_t seed = 42;

    void validate() const;
};

// Fixed-date holidays emitted for every generated year.
HolidaySet synth_holidays(const SynthSpec& spec);

MultiSeries generate(const SynthSpec& spec);

}  // namespace loadcast
