#pragma once

#include <string>
#include <vector>

#include "loadcast/seasons.hpp"
#include "loadcast/series.hpp"

namespace loadcast {

// Column names of the base input CSV. Callers with differently named columns
// remap here; order in the file must match the header, not this struct.
struct CsvSchema {
    std::string timestamp = "timestamp";
    std::string consumption = "consumption";
    std::string temperature = "temperature";
    std::string radiation_direct = "radiation_direct";
    std::string radiation_diffuse = "radiation_diffuse";
};

// Reads the base input CSV (empty field = missing). Records come back sorted
// by timestamp. Malformed rows and duplicate timestamps throw with the line
// number / timestamp named.
MultiSeries ingest_csv(const std::string& path, const CsvSchema& schema = CsvSchema{});

void write_series_csv(const std::string& path, const MultiSeries& series);

// One ISO-8601 date per line; '#' starts a comment.
HolidaySet read_holiday_file(const std::string& path);
void write_holiday_file(const std::string& path, const HolidaySet& holidays);

// Processed-dataset format: the base columns plus
// season_id,is_weekend_or_holiday,is_holiday,anomaly_flag. The written
// anomaly_flag marks records that were detected (including ones later
// repaired by substitution). Values round-trip exactly.
void write_dataset_csv(const std::string& path, const SeasonalDataset& dataset);
SeasonalDataset read_dataset_csv(const std::string& path);

}  // namespace loadcast
