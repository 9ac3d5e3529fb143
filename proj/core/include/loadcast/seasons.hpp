#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loadcast/scaler.hpp"
#include "loadcast/series.hpp"

namespace loadcast {

enum class SeasonId { S1, S2, S3, ALL };

const char* to_string(SeasonId id);
SeasonId season_from_string(const std::string& s);

// Season windows, inclusive of both endpoints at hour resolution:
//   S1: Jan 1 00:00 .. Apr 14 23:00
//   S2: Apr 15 00:00 .. Oct 14 23:00
//   S3: Oct 15 00:00 .. Dec 31 23:00
SeasonId season_of(HourStamp t);

// A season-filtered slice of a scaled series. Multi-year seasons concatenate
// their per-year segments in time order; segment_starts marks where hourly
// contiguity breaks so windowing never spans a gap.
struct SeasonalDataset {
    SeasonId season_id = SeasonId::ALL;
    std::vector<HourlyRecord> records;
    RobustScalerParams scaler;
    std::vector<std::uint8_t> anomaly_flags;  // aligned with records
    std::vector<std::uint8_t> substituted;    // set by substitute()
    std::vector<std::size_t> segment_starts;  // first index of each contiguous run

    std::size_t size() const { return records.size(); }
};

void recompute_segments(SeasonalDataset& dataset);

// Partitions the series into the three seasonal datasets; every record lands
// in exactly one. The input is expected scaled and gap-free.
std::vector<SeasonalDataset> split_seasons(const MultiSeries& series,
                                           const RobustScalerParams& scaler);

// Single dataset covering the whole series (the "without seasonality
// splitting" mode).
SeasonalDataset whole_series_dataset(const MultiSeries& series,
                                     const RobustScalerParams& scaler);

}  // namespace loadcast
