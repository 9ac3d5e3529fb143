#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "loadcast/anomaly.hpp"
#include "loadcast/evaluation.hpp"
#include "loadcast/lstm.hpp"
#include "loadcast/synthgen.hpp"

namespace loadcast {

// Config errors (bad keys, missing files, contradictory sources) exit with
// code 1; StageError means a pipeline stage blew up mid-run and exits with 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageError : std::runtime_error {
    std::string stage;
    StageError(std::string stage_name, const std::string& cause)
        : std::runtime_error("stage '" + stage_name + "' failed: " + cause),
          stage(std::move(stage_name)) {}
};

struct CsvSource {
    std::string csv_path;
    std::string holiday_path;
};

struct ExperimentConfig {
    std::optional<CsvSource> csv;    // exactly one of csv / synth
    std::optional<SynthSpec> synth;

    std::string seasonality_mode = "split";          // split | whole
    std::string anomaly_mode = "detect_substitute";  // off | detect_substitute
    std::optional<InjectionSpec> injection;
    DbscanParams dbscan;
    TrainConfig train;
    LstmConfig model;
    int train_cutoff_year = 2018;
    int first_test_year = 2019;
    double bin_width = 0.02;
    bool raw_units = false;
    std::optional<std::string> season_filter;  // train/evaluate one season only
    std::string output_dir = "out";
    std::uint64_t seed = 42;

    void validate() const;
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
// Normalized config echo; output_dir is run metadata and stays out so two
// runs of one config into different directories produce identical manifests.
std::string config_to_json_text(const ExperimentConfig& config);

struct PipelineResult {
    std::vector<EvalReport> reports;          // one per trained dataset
    std::vector<ComparisonRow> averaged;      // season-averaged rows
    std::vector<std::string> warnings;
    std::string output_dir;
};

// ingest/synth -> merge -> fill -> scale -> season split -> (inject) ->
// detect+substitute -> window -> train -> evaluate, writing datasets,
// checkpoints, reports, histograms and a checksum manifest under
// config.output_dir. Any failure is rethrown as StageError after dropping a
// marker under <output_dir>/failed/.
PipelineResult run_pipeline(const ExperimentConfig& config);

struct MatrixAxes {
    std::vector<std::string> losses = {"mse", "al1", "al2"};
    std::vector<std::string> anomaly_modes = {"off", "detect_substitute"};
    std::vector<std::string> seasonality_modes = {"split"};
    // Injection rates; 0 means "no injection". Empty keeps the base setting.
    std::vector<double> inject_rates;
};

struct MatrixCellOutcome {
    std::string cell_id;
    bool ok = false;
    std::string error;
};

struct MatrixResult {
    std::vector<EvalReport> all_reports;
    std::vector<ComparisonRow> comparison;
    std::vector<MatrixCellOutcome> cells;
    std::string output_dir;
};

// Cartesian product of the axes over the base config; each cell runs
// run_pipeline into <output_dir>/cells/<cell-id>. One failing cell does not
// stop the others. Emits comparison.csv plus paired-delta tables when both
// values of an axis are present.
MatrixResult run_matrix(const ExperimentConfig& base, const MatrixAxes& axes, int jobs = 1);

// Resolved-plan description for --dry-run.
std::string describe_plan(const ExperimentConfig& config);

}  // namespace loadcast
