#include "loadcast/seasons.hpp"

#include <stdexcept>

namespace loadcast {

const char* to_string(SeasonId id) {
    switch (id) {
        case SeasonId::S1: return "S1";
        case SeasonId::S2: return "S2";
        case SeasonId::S3: return "S3";
        case SeasonId::ALL: return "ALL";
    }
    return "?";
}

SeasonId season_from_string(const std::string& s) {
    if (s == "S1") return SeasonId::S1;
    if (s == "S2") return SeasonId::S2;
    if (s == "S3") return SeasonId::S3;
    if (s == "ALL") return SeasonId::ALL;
    throw std::runtime_error("unknown season id '" + s + "'");
}

SeasonId season_of(HourStamp t) {
    const int year = year_of(t);
    if (t < make_hour(year, 4, 15, 0)) return SeasonId::S1;
    if (t < make_hour(year, 10, 15, 0)) return SeasonId::S2;
    return SeasonId::S3;
}

void recompute_segments(SeasonalDataset& dataset) {
    dataset.segment_starts.clear();
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        if (i == 0 ||
            dataset.records[i].timestamp != dataset.records[i - 1].timestamp + 1)
            dataset.segment_starts.push_back(i);
    }
}

namespace {

SeasonalDataset make_dataset(SeasonId id, const RobustScalerParams& scaler) {
    SeasonalDataset d;
    d.season_id = id;
    d.scaler = scaler;
    return d;
}

void finalize(SeasonalDataset& d) {
    d.anomaly_flags.assign(d.records.size(), 0);
    d.substituted.assign(d.records.size(), 0);
    recompute_segments(d);
}

}  // namespace

std::vector<SeasonalDataset> split_seasons(const MultiSeries& series,
                                           const RobustScalerParams& scaler) {
    std::vector<SeasonalDataset> out;
    out.push_back(make_dataset(SeasonId::S1, scaler));
    out.push_back(make_dataset(SeasonId::S2, scaler));
    out.push_back(make_dataset(SeasonId::S3, scaler));
    for (const auto& rec : series.records) {
        out[static_cast<std::size_t>(season_of(rec.timestamp))].records.push_back(rec);
    }
    for (auto& d : out) finalize(d);
    return out;
}

SeasonalDataset whole_series_dataset(const MultiSeries& series,
                                     const RobustScalerParams& scaler) {
    SeasonalDataset d = make_dataset(SeasonId::ALL, scaler);
    d.records = series.records;
    finalize(d);
    return d;
}

}  // namespace loadcast
