#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "loadcast/csv.hpp"
#include "loadcast/rng.hpp"
#include "loadcast/scaler.hpp"
#include "loadcast/seasons.hpp"
#include "loadcast/series.hpp"
#include "loadcast/windows.hpp"

using namespace loadcast;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("tmp_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

MultiSeries hourly_series(HourStamp start, const std::vector<double>& consumption) {
    MultiSeries s;
    s.origin = "test";
    for (std::size_t i = 0; i < consumption.size(); ++i) {
        HourlyRecord rec;
        rec.timestamp = start + static_cast<HourStamp>(i);
        rec.consumption = consumption[i];
        rec.temperature = 10.0;
        rec.radiation_direct = 1.0;
        rec.radiation_diffuse = 2.0;
        s.records.push_back(rec);
    }
    return s;
}

MultiSeries random_series(std::size_t n, Rng& rng, int start_year = 2016) {
    MultiSeries s;
    s.origin = "random";
    const HourStamp start = make_hour(start_year, 1, 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        HourlyRecord rec;
        rec.timestamp = start + static_cast<HourStamp>(i);
        rec.consumption = rng.uniform(500.0, 1500.0);
        rec.temperature = rng.uniform(-10.0, 30.0);
        rec.radiation_direct = rng.uniform(0.0, 600.0);
        rec.radiation_diffuse = rng.uniform(0.0, 300.0);
        rec.is_weekend_or_holiday = rng.next_bool() ? 1 : 0;
        rec.is_holiday = rec.is_weekend_or_holiday && rng.next_bool() ? 1 : 0;
        s.records.push_back(rec);
    }
    return s;
}

}  // namespace

TEST_CASE("ingest: well-formed csv") {
    TempFile file("ok.csv",
                  "timestamp,consumption,temperature,radiation_direct,radiation_diffuse\n"
                  "2016-01-01T02:00,12.5,3.0,0,0\n"
                  "2016-01-01T00:00,10.0,2.0,0,0\n"
                  "2016-01-01T01:00,,2.5,0,0\n");
    const MultiSeries s = ingest_csv(file.path);
    REQUIRE(s.size() == 3);
    // sorted by timestamp
    CHECK(s.records[0].timestamp == make_hour(2016, 1, 1, 0));
    CHECK(s.records[2].timestamp == make_hour(2016, 1, 1, 2));
    CHECK(s.records[0].consumption == 10.0);
    CHECK(std::isnan(s.records[1].consumption));  // empty field = missing
}

TEST_CASE("ingest: duplicate timestamp names the timestamp") {
    TempFile file("dup.csv",
                  "timestamp,consumption,temperature,radiation_direct,radiation_diffuse\n"
                  "2016-01-01T00:00,10,2,0,0\n"
                  "2016-01-01T00:00,11,2,0,0\n");
    CHECK_THROWS_WITH_AS(ingest_csv(file.path),
                         doctest::Contains("2016-01-01T00:00"), std::runtime_error);
}

TEST_CASE("ingest: malformed value names the line") {
    TempFile file("bad.csv",
                  "timestamp,consumption,temperature,radiation_direct,radiation_diffuse\n"
                  "2016-01-01T00:00,abc,2,0,0\n");
    CHECK_THROWS_WITH_AS(ingest_csv(file.path), doctest::Contains("line 2"),
                         std::runtime_error);
}

TEST_CASE("ingest: header mismatch and sub-hourly timestamps rejected") {
    TempFile bad_header("hdr.csv", "time,load,temp,rad1,rad2\n");
    CHECK_THROWS_AS(ingest_csv(bad_header.path), std::runtime_error);
    TempFile sub_hourly("subh.csv",
                        "timestamp,consumption,temperature,radiation_direct,radiation_diffuse\n"
                        "2016-01-01T00:30,10,2,0,0\n");
    CHECK_THROWS_AS(ingest_csv(sub_hourly.path), std::runtime_error);
}

TEST_CASE("holiday file parsing") {
    TempFile file("hol.txt", "# comment\n2019-01-01\n\n2019-12-25  # christmas\n");
    const HolidaySet holidays = read_holiday_file(file.path);
    CHECK(holidays.size() == 2);
    CHECK(holidays.count(make_hour(2019, 1, 1, 0)) == 1);
    CHECK(holidays.count(make_hour(2019, 12, 25, 0)) == 1);
}

TEST_CASE("merge_calendar flag rules") {
    MultiSeries s = hourly_series(make_hour(2019, 1, 1, 0), {1.0});
    s.records.push_back(s.records[0]);
    s.records[1].timestamp = make_hour(2019, 1, 5, 12);  // a Saturday
    s.records.push_back(s.records[0]);
    s.records[2].timestamp = make_hour(2019, 1, 2, 12);  // a Wednesday
    const HolidaySet holidays = {make_hour(2019, 1, 1, 0)};
    const MultiSeries merged = merge_calendar(s, holidays);
    CHECK(merged.records[0].is_weekend_or_holiday == 1);  // holiday
    CHECK(merged.records[0].is_holiday == 1);
    CHECK(merged.records[1].is_weekend_or_holiday == 1);  // Saturday, not holiday
    CHECK(merged.records[1].is_holiday == 0);
    CHECK(merged.records[2].is_weekend_or_holiday == 0);  // plain Wednesday
    CHECK(merged.records[2].is_holiday == 0);
}

TEST_CASE("fill_missing: short gap is linearly interpolated") {
    MultiSeries s = hourly_series(make_hour(2016, 1, 1, 0), {10.0, 0.0, 14.0});
    s.records[1].consumption = std::nan("");
    const MultiSeries filled = fill_missing(s, {});
    REQUIRE(filled.size() == 3);
    CHECK(filled.records[1].consumption == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("fill_missing: no gaps is the identity on values") {
    MultiSeries s = hourly_series(make_hour(2016, 1, 1, 0), {10, 11, 12, 13});
    const MultiSeries filled = fill_missing(s, {});
    REQUIRE(filled.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(filled.records[i].consumption == s.records[i].consumption);
}

TEST_CASE("fill_missing: long gap copies the value one week back") {
    // Two weeks of data with a 10-hour hole in the second week.
    std::vector<double> values(336);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = 100.0 + double(i % 24);
    MultiSeries s = hourly_series(make_hour(2016, 1, 4, 0), values);
    for (std::size_t i = 200; i < 210; ++i) s.records[i].consumption = std::nan("");
    const MultiSeries filled = fill_missing(s, {});
    for (std::size_t i = 200; i < 210; ++i)
        CHECK(filled.records[i].consumption == filled.records[i - 168].consumption);
}

TEST_CASE("fill_missing: missing hours are inserted and flags recomputed") {
    // Saturday 2016-01-02; drop the row at 01:00 entirely.
    MultiSeries s = hourly_series(make_hour(2016, 1, 2, 0), {10, 11, 12});
    s.records.erase(s.records.begin() + 1);
    const HolidaySet holidays = {};
    const MultiSeries filled = fill_missing(s, holidays);
    REQUIRE(filled.size() == 3);
    CHECK(is_contiguous_hourly(filled));
    CHECK(filled.records[1].consumption == doctest::Approx(11.0));
    // Flags are recomputed from the calendar, not interpolated.
    CHECK(filled.records[1].is_weekend_or_holiday == 1);
    CHECK(filled.records[1].is_holiday == 0);
}

TEST_CASE("fill_missing: fewer than 2 consumption values is an error") {
    MultiSeries s = hourly_series(make_hour(2016, 1, 1, 0), {10, 11, 12});
    s.records[0].consumption = std::nan("");
    s.records[2].consumption = std::nan("");
    CHECK_THROWS_AS(fill_missing(s, {}), std::runtime_error);
}

TEST_CASE("fill_missing: feature missing everywhere is unfillable") {
    MultiSeries s = hourly_series(make_hour(2016, 1, 1, 0), {10, 11, 12});
    for (auto& rec : s.records) rec.temperature = std::nan("");
    CHECK_THROWS_WITH_AS(fill_missing(s, {}), doctest::Contains("temperature"),
                         std::runtime_error);
}

TEST_CASE("quantile: linear interpolation between order statistics") {
    CHECK(quantile({1, 2, 3, 4, 5}, 0.5) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(quantile({1, 2, 3, 4, 5}, 0.75) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("robust scaler fit, transform, invert") {
    MultiSeries s = hourly_series(make_hour(2016, 1, 1, 0), {1, 2, 3, 4, 5});
    for (auto& rec : s.records) rec.temperature = 7.0;  // constant feature
    const RobustScalerParams params = fit_robust_scaler(s, 2018);
    CHECK(params.median[kConsumption] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(params.iqr[kConsumption] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(params.median[kTemperature] == 7.0);
    CHECK(params.iqr[kTemperature] == 1.0);  // degenerate rule
    REQUIRE(params.degenerate_features.size() >= 1);
    CHECK(params.degenerate_features[0] == kTemperature);

    CHECK(params.transform(kConsumption, 5.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(params.transform(kConsumption, 3.0) == 0.0);
    CHECK(params.transform(kConsumption, 0.0) == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(params.invert(kConsumption, params.transform(kConsumption, 3.0)) ==
          doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("scaler fits on training years only") {
    // 2018 consumption around 100, 2019 around 1000; the 2019 block must not
    // move the statistics.
    MultiSeries s = hourly_series(make_hour(2018, 12, 31, 0), {100, 101, 102, 103, 104});
    MultiSeries late = hourly_series(make_hour(2019, 6, 1, 0), {1000, 1001, 1002, 1003});
    for (auto& rec : late.records) s.records.push_back(rec);
    const RobustScalerParams params = fit_robust_scaler(s, 2018);
    CHECK(params.median[kConsumption] == doctest::Approx(102.0).epsilon(1e-12));
    CHECK_THROWS_AS(fit_robust_scaler(s, 2015), std::runtime_error);  // < 4 records
}

TEST_CASE("apply_scaler never touches calendar flags") {
    Rng rng(5);
    MultiSeries s = random_series(200, rng);
    const RobustScalerParams params = fit_robust_scaler(s, 2018);
    const MultiSeries scaled = apply_scaler(s, params);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(scaled.records[i].is_weekend_or_holiday == s.records[i].is_weekend_or_holiday);
        CHECK(scaled.records[i].is_holiday == s.records[i].is_holiday);
        const double f = scaled.records[i].feature(kWeekendOrHoliday);
        CHECK((f == 0.0 || f == 1.0));
    }
}

TEST_CASE("scaler round-trip is the identity within 1e-9") {
    Rng rng(31);
    for (int it = 0; it < 100; ++it) {
        MultiSeries s = random_series(50 + static_cast<std::size_t>(rng.next_below(100)), rng);
        const RobustScalerParams params = fit_robust_scaler(s, 2018);
        const MultiSeries scaled = apply_scaler(s, params);
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (int f = 0; f < kNumContinuousFeatures; ++f) {
                const double orig = s.records[i].feature(f);
                const double back = params.invert(f, scaled.records[i].feature(f));
                CHECK(std::abs(back - orig) <=
                      1e-9 * std::max(1.0, std::abs(orig)));
            }
        }
    }
}

TEST_CASE("season boundaries") {
    CHECK(season_of(make_hour(2016, 4, 14, 23)) == SeasonId::S1);
    CHECK(season_of(make_hour(2016, 4, 15, 0)) == SeasonId::S2);
    CHECK(season_of(make_hour(2016, 10, 14, 23)) == SeasonId::S2);
    CHECK(season_of(make_hour(2016, 10, 15, 0)) == SeasonId::S3);
    CHECK(season_of(make_hour(2016, 12, 31, 23)) == SeasonId::S3);
    CHECK(season_of(make_hour(2016, 1, 1, 0)) == SeasonId::S1);
}

TEST_CASE("split_seasons partitions the series") {
    Rng rng(17);
    // Two full years plus a bit.
    MultiSeries s = random_series(2 * 8784 + 500, rng, 2015);
    const RobustScalerParams params = fit_robust_scaler(s, 2018);
    const auto seasons = split_seasons(s, params);
    REQUIRE(seasons.size() == 3);
    std::size_t total = 0;
    std::set<HourStamp> seen;
    for (const auto& d : seasons) {
        total += d.size();
        for (const auto& rec : d.records) {
            CHECK(season_of(rec.timestamp) == d.season_id);
            CHECK(seen.insert(rec.timestamp).second);  // disjoint
        }
        // Records stay in time order and flags align.
        for (std::size_t i = 1; i < d.records.size(); ++i)
            CHECK(d.records[i - 1].timestamp < d.records[i].timestamp);
        CHECK(d.anomaly_flags.size() == d.size());
    }
    CHECK(total == s.size());
}

TEST_CASE("seasonal segments follow year boundaries") {
    Rng rng(23);
    MultiSeries s = random_series(3 * 8784, rng, 2015);  // ~3 years
    const auto seasons = split_seasons(s, RobustScalerParams{});
    for (const auto& d : seasons) {
        // One contiguous run per year for each season.
        CHECK(d.segment_starts.size() >= 2);
        for (std::size_t k = 0; k < d.segment_starts.size(); ++k) {
            const std::size_t begin = d.segment_starts[k];
            const std::size_t end =
                k + 1 < d.segment_starts.size() ? d.segment_starts[k + 1] : d.size();
            for (std::size_t i = begin + 1; i < end; ++i)
                CHECK(d.records[i].timestamp == d.records[i - 1].timestamp + 1);
        }
    }
}

TEST_CASE("make_windows over a contiguous segment") {
    MultiSeries s = hourly_series(make_hour(2016, 1, 1, 0),
                                  {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    SeasonalDataset d = whole_series_dataset(s, RobustScalerParams{});
    const auto samples = make_windows(d, 4);
    REQUIRE(samples.size() == 6);  // N - w
    CHECK(samples[0].input(0, kConsumption) == 0.0);
    CHECK(samples[0].input(3, kConsumption) == 3.0);
    CHECK(samples[0].target == 4.0);
    CHECK(samples[0].target_time == make_hour(2016, 1, 1, 4));
    CHECK(samples[5].target == 9.0);
}

TEST_CASE("make_windows: short segments contribute nothing") {
    MultiSeries s = hourly_series(make_hour(2016, 1, 1, 0), {0, 1, 2, 3});
    SeasonalDataset d = whole_series_dataset(s, RobustScalerParams{});
    CHECK(make_windows(d, 4).empty());
    CHECK_THROWS_AS(make_windows(d, 0), std::invalid_argument);
}

TEST_CASE("windows never span a segment gap") {
    MultiSeries s = hourly_series(make_hour(2016, 1, 1, 0), {0, 1, 2, 3, 4, 5, 6});
    MultiSeries later = hourly_series(make_hour(2016, 3, 1, 0), {10, 11, 12, 13, 14, 15});
    for (auto& rec : later.records) s.records.push_back(rec);
    SeasonalDataset d = whole_series_dataset(s, RobustScalerParams{});
    REQUIRE(d.segment_starts.size() == 2);
    const auto samples = make_windows(d, 4);
    CHECK(samples.size() == (7 - 4) + (6 - 4));
    for (const auto& sample : samples) {
        // All five hours of a sample (window + target) sit in one segment.
        const double first = sample.input(0, kConsumption);
        CHECK(((first <= 2 && sample.target <= 6) || (first >= 10 && sample.target >= 14)));
    }
}

TEST_CASE("window count property: max(0, N - w)") {
    Rng rng(41);
    for (int it = 0; it < 100; ++it) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.next_below(40));
        const int w = 1 + static_cast<int>(rng.next_below(8));
        MultiSeries s = random_series(n, rng);
        SeasonalDataset d = whole_series_dataset(s, RobustScalerParams{});
        const auto samples = make_windows(d, w);
        const std::size_t expected =
            n > static_cast<std::size_t>(w) ? n - static_cast<std::size_t>(w) : 0;
        CHECK(samples.size() == expected);
    }
}

TEST_CASE("train/test split by target year") {
    WindowedSample train_sample;
    train_sample.target_time = make_hour(2018, 12, 31, 23);
    WindowedSample test_sample;
    test_sample.target_time = make_hour(2019, 1, 1, 0);
    const auto split = split_train_test({train_sample, test_sample}, 2019);
    REQUIRE(split.train.size() == 1);
    REQUIRE(split.test.size() == 1);
    CHECK(split.train[0].target_time == train_sample.target_time);
    CHECK(split.test[0].target_time == test_sample.target_time);
    CHECK(split.warnings.empty());

    const auto all_train = split_train_test({train_sample}, 2019);
    CHECK(all_train.test.empty());
    REQUIRE(all_train.warnings.size() == 1);
    CHECK(all_train.warnings[0] == "test set is empty");
}

TEST_CASE("dataset csv round-trip") {
    Rng rng(77);
    MultiSeries s = random_series(100, rng);
    SeasonalDataset d = whole_series_dataset(s, RobustScalerParams{});
    d.anomaly_flags[5] = 1;
    write_dataset_csv("tmp_dataset_rt.csv", d);
    const SeasonalDataset back = read_dataset_csv("tmp_dataset_rt.csv");
    std::remove("tmp_dataset_rt.csv");
    REQUIRE(back.size() == d.size());
    CHECK(back.season_id == d.season_id);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(back.records[i].timestamp == d.records[i].timestamp);
        CHECK(back.records[i].consumption == d.records[i].consumption);  // bit-exact
        CHECK(back.records[i].is_holiday == d.records[i].is_holiday);
    }
    CHECK(back.anomaly_flags[5] == 1);
    CHECK(back.anomaly_flags[6] == 0);
}
