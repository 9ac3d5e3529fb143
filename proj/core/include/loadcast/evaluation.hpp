#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace loadcast {

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

// Under/over split by the sign of e = prediction - target. Strict
// inequalities; exact zeros form their own class. A side with no members
// reports its RMSE as absent, not zero.
struct EvalReport {
    std::optional<double> under_rmse;
    std::optional<double> over_rmse;
    std::size_t n_under = 0;
    std::size_t n_over = 0;
    std::size_t n_exact = 0;
    std::vector<HistogramBin> histogram;
    std::map<std::string, std::string> metadata;

    std::size_t total() const { return n_under + n_over + n_exact; }
};

EvalReport split_rmse(const std::vector<double>& predictions,
                      const std::vector<double>& targets);

// Uniform bins with an edge pinned at 0, so under- and overestimates never
// share a bin; e lands in [k*bin_width, (k+1)*bin_width). Bins are contiguous
// from the smallest to the largest occupied bin.
std::vector<HistogramBin> error_histogram(const std::vector<double>& errors,
                                          double bin_width);

void write_histogram_csv(const std::string& path, const std::vector<HistogramBin>& bins);

std::string report_to_json(const EvalReport& report);
void write_report_json(const std::string& path, const EvalReport& report);
EvalReport report_from_json_file(const std::string& path);

// Grouped comparison over per-season reports: one row per (loss, anomaly
// mode, seasonality mode, injection rate), averaging the seasonal RMSEs
// arithmetically. Absent per-season values are skipped; a row with no
// contributing values reports the mean as absent.
struct ComparisonRow {
    std::string loss;
    std::string anomaly_mode;
    std::string seasonality_mode;
    std::string inject_rate;
    std::optional<double> mean_under_rmse;
    std::optional<double> mean_over_rmse;
    int n_reports = 0;
};

std::vector<ComparisonRow> compare_experiments(const std::vector<EvalReport>& reports);

// Percentage decrease (old - new)/old * 100.
double percent_delta(double old_value, double new_value);

// Pairs rows that differ only in `axis_key` (one of the ComparisonRow string
// fields) with values old/new, and reports the under/over percentage deltas.
// Missing counterparts produce a row carrying a notice instead of numbers.
struct DeltaRow {
    ComparisonRow old_row;
    std::optional<ComparisonRow> new_row;
    std::optional<double> under_delta_pct;
    std::optional<double> over_delta_pct;
    std::string notice;
};

std::vector<DeltaRow> pair_deltas(const std::vector<ComparisonRow>& rows,
                                  const std::string& axis_key, const std::string& old_value,
                                  const std::string& new_value);

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);

}  // namespace loadcast
