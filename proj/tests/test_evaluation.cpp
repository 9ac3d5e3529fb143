#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "loadcast/evaluation.hpp"
#include "loadcast/rng.hpp"

using namespace loadcast;

namespace {

EvalReport season_report(const std::string& season, double under, double over,
                         const std::string& loss = "mse",
                         const std::string& anomaly = "off",
                         const std::string& rate = "0") {
    EvalReport r;
    r.under_rmse = under;
    r.over_rmse = over;
    r.n_under = 10;
    r.n_over = 10;
    r.metadata["season"] = season;
    r.metadata["loss"] = loss;
    r.metadata["anomaly_mode"] = anomaly;
    r.metadata["seasonality_mode"] = "split";
    r.metadata["inject_rate"] = rate;
    return r;
}

}  // namespace

TEST_CASE("split_rmse: one under, one over") {
    const EvalReport r = split_rmse({2.0, 4.0}, {3.0, 3.0});
    REQUIRE(r.under_rmse.has_value());
    REQUIRE(r.over_rmse.has_value());
    CHECK(*r.under_rmse == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*r.over_rmse == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.n_under == 1);
    CHECK(r.n_over == 1);
    CHECK(r.n_exact == 0);
}

TEST_CASE("split_rmse: perfect predictions report absent RMSEs") {
    const EvalReport r = split_rmse({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
    CHECK(!r.under_rmse.has_value());
    CHECK(!r.over_rmse.has_value());
    CHECK(r.n_exact == 3);
}

TEST_CASE("split_rmse: subset denominators") {
    const EvalReport r = split_rmse({1.0, 1.0, 4.0}, {2.0, 3.0, 3.0});
    REQUIRE(r.under_rmse.has_value());
    REQUIRE(r.over_rmse.has_value());
    CHECK(*r.under_rmse == doctest::Approx(std::sqrt(5.0 / 2.0)).epsilon(1e-12));
    CHECK(*r.over_rmse == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("split_rmse: errors") {
    CHECK_THROWS_AS(split_rmse({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(split_rmse({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("split_rmse: every sample lands in exactly one class") {
    Rng rng(8);
    for (int it = 0; it < 50; ++it) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.next_below(200));
        std::vector<double> preds(n), targets(n);
        for (std::size_t i = 0; i < n; ++i) {
            targets[i] = rng.uniform(-2, 2);
            preds[i] = rng.next_below(5) == 0 ? targets[i] : rng.uniform(-2, 2);
        }
        const EvalReport r = split_rmse(preds, targets);
        CHECK(r.n_under + r.n_over + r.n_exact == n);
    }
}

TEST_CASE("split_rmse: scaling errors by c scales both RMSEs by c") {
    Rng rng(9);
    const std::size_t n = 100;
    std::vector<double> targets(n), preds(n), preds_scaled(n);
    const double c = 3.5;
    for (std::size_t i = 0; i < n; ++i) {
        targets[i] = rng.uniform(-1, 1);
        const double e = rng.uniform(-0.5, 0.5);
        preds[i] = targets[i] + e;
        preds_scaled[i] = targets[i] + c * e;
    }
    const EvalReport a = split_rmse(preds, targets);
    const EvalReport b = split_rmse(preds_scaled, targets);
    REQUIRE((a.under_rmse && b.under_rmse && a.over_rmse && b.over_rmse));
    CHECK(*b.under_rmse == doctest::Approx(c * *a.under_rmse).epsilon(1e-12));
    CHECK(*b.over_rmse == doctest::Approx(c * *a.over_rmse).epsilon(1e-12));
}

TEST_CASE("error_histogram: bins align to zero") {
    const auto bins = error_histogram({-0.05, 0.05}, 0.1);
    REQUIRE(bins.size() == 2);
    CHECK(bins[0].lower == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(bins[0].upper == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(bins[0].count == 1);
    CHECK(bins[1].lower == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(bins[1].count == 1);
}

TEST_CASE("error_histogram: edge cases") {
    CHECK(error_histogram({}, 0.1).empty());
    const auto one_bin = error_histogram({0.01, 0.02, 0.09}, 0.1);
    REQUIRE(one_bin.size() == 1);
    CHECK(one_bin[0].count == 3);
    CHECK_THROWS_AS(error_histogram({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("error_histogram: counts are conserved") {
    Rng rng(10);
    for (int it = 0; it < 50; ++it) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.next_below(500));
        std::vector<double> errors(n);
        for (auto& e : errors) e = rng.uniform(-3, 3);
        const double bw = rng.uniform(0.01, 0.5);
        const auto bins = error_histogram(errors, bw);
        std::size_t total = 0;
        for (const auto& bin : bins) {
            total += bin.count;
            CHECK(bin.upper == doctest::Approx(bin.lower + bw));
        }
        CHECK(total == n);
        // Zero is always on a bin edge: no bin straddles it.
        for (const auto& bin : bins) CHECK(!(bin.lower < 0.0 && bin.upper > 0.0));
    }
}

TEST_CASE("compare_experiments averages per-season RMSEs") {
    const std::vector<EvalReport> reports = {season_report("S1", 0.1, 0.2),
                                             season_report("S2", 0.2, 0.3),
                                             season_report("S3", 0.3, 0.4)};
    const auto rows = compare_experiments(reports);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_reports == 3);
    REQUIRE(rows[0].mean_under_rmse.has_value());
    CHECK(*rows[0].mean_under_rmse == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(*rows[0].mean_over_rmse == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("compare_experiments groups by loss/anomaly/seasonality/rate") {
    std::vector<EvalReport> reports;
    for (const char* loss : {"mse", "al1"})
        for (const char* mode : {"off", "detect_substitute"})
            for (const char* season : {"S1", "S2"})
                reports.push_back(season_report(season, 0.1, 0.2, loss, mode));
    const auto rows = compare_experiments(reports);
    CHECK(rows.size() == 4);
    for (const auto& row : rows) CHECK(row.n_reports == 2);
}

TEST_CASE("percent_delta reproduces published table arithmetic") {
    // 0.154 with outliers vs 0.068 after cleanup: a 56% decrease.
    const double delta = percent_delta(0.154, 0.068);
    CHECK(std::abs(delta - 56.0) <= 1.0);
    CHECK(percent_delta(0.5, 0.5) == 0.0);
    CHECK_THROWS_AS(percent_delta(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("pair_deltas pairs rows across one axis") {
    std::vector<EvalReport> reports;
    for (const char* season : {"S1", "S2", "S3"}) {
        reports.push_back(season_report(season, 0.154, 0.121, "mse", "off", "0.01"));
        reports.push_back(season_report(season, 0.068, 0.064, "mse", "detect_substitute",
                                        "0.01"));
    }
    const auto rows = compare_experiments(reports);
    REQUIRE(rows.size() == 2);
    const auto deltas = pair_deltas(rows, "anomaly_mode", "off", "detect_substitute");
    REQUIRE(deltas.size() == 1);
    REQUIRE(deltas[0].under_delta_pct.has_value());
    CHECK(std::abs(*deltas[0].under_delta_pct - 56.0) <= 1.0);
    CHECK(deltas[0].notice.empty());
}

TEST_CASE("pair_deltas: missing counterpart produces a notice") {
    const std::vector<EvalReport> reports = {season_report("S1", 0.1, 0.2, "mse", "off")};
    const auto rows = compare_experiments(reports);
    const auto deltas = pair_deltas(rows, "anomaly_mode", "off", "detect_substitute");
    REQUIRE(deltas.size() == 1);
    CHECK(!deltas[0].under_delta_pct.has_value());
    CHECK(!deltas[0].notice.empty());
}

TEST_CASE("report json round-trip") {
    EvalReport r = season_report("S2", 0.25, 0.5, "al2", "detect_substitute", "0.02");
    r.n_exact = 3;
    r.histogram = error_histogram({-0.15, 0.01, 0.02}, 0.1);
    write_report_json("tmp_report.json", r);
    const EvalReport back = report_from_json_file("tmp_report.json");
    std::remove("tmp_report.json");
    REQUIRE(back.under_rmse.has_value());
    CHECK(*back.under_rmse == *r.under_rmse);
    CHECK(back.n_exact == 3);
    CHECK(back.metadata.at("loss") == "al2");
    REQUIRE(back.histogram.size() == r.histogram.size());
    CHECK(back.histogram[0].count == r.histogram[0].count);

    EvalReport absent = split_rmse({1.0}, {1.0});
    write_report_json("tmp_report2.json", absent);
    const EvalReport back2 = report_from_json_file("tmp_report2.json");
    std::remove("tmp_report2.json");
    CHECK(!back2.under_rmse.has_value());
}
