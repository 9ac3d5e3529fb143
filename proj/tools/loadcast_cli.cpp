// loadcast — hour-ahead load forecasting toolkit.
//
// Subcommands cover every pipeline stage plus the full experiment matrix:
//   synth, ingest, inject-outliers, detect, train, evaluate, matrix
// Exit codes: 0 success, 1 validation/config error, 2 stage failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "loadcast/checkpoint.hpp"
#include "loadcast/csv.hpp"
#include "loadcast/pipeline.hpp"
#include "loadcast/scaler.hpp"
#include "loadcast/util.hpp"

namespace {

using namespace loadcast;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitStage = 2;

struct CommonConfigFlags {
    std::string config_path;
    std::vector<std::string> set_overrides;
    std::optional<std::string> loss;
    std::optional<int> epochs;
    std::optional<int> batch_size;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> season;
    bool no_season_split = false;
    bool skip_anomaly_removal = false;
    std::optional<double> inject_rate;
    std::optional<std::uint64_t> inject_seed;
    std::optional<std::string> output_dir;
    bool dry_run = false;
};

void add_common_config_flags(CLI::App* cmd, CommonConfigFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config JSON file");
    cmd->add_option("--set", flags.set_overrides,
                    "override any config key, dotted path (e.g. --set train.a=7)");
    cmd->add_option("--loss", flags.loss, "loss function: mse|al1|al2");
    cmd->add_option("--epochs", flags.epochs, "training epochs");
    cmd->add_option("--batch-size", flags.batch_size, "mini-batch size");
    cmd->add_option("--seed", flags.seed, "global seed");
    cmd->add_option("--season", flags.season, "restrict to one season: S1|S2|S3");
    cmd->add_flag("--no-season-split", flags.no_season_split,
                  "train a single model on the whole series");
    cmd->add_flag("--skip-anomaly-removal", flags.skip_anomaly_removal,
                  "disable detection and substitution");
    cmd->add_option("--inject-rate", flags.inject_rate,
                    "outlier injection rate (0 disables injection)");
    cmd->add_option("--inject-seed", flags.inject_seed, "outlier injection seed");
    cmd->add_option("--out", flags.output_dir, "output directory");
    cmd->add_flag("--dry-run", flags.dry_run, "print the resolved plan and exit");
}

// "a.b.c=value" into the config document; the value is parsed as JSON when it
// is one (numbers, booleans, null), otherwise taken as a string.
void apply_set_override(nlohmann::json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("--set expects key=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(text);
    } catch (const std::exception&) {
        value = text;
    }
    nlohmann::json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ValidationError("--set: empty key segment in '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

ExperimentConfig resolve_config(const CommonConfigFlags& flags) {
    nlohmann::json doc = nlohmann::json::object();
    if (!flags.config_path.empty()) {
        if (!std::filesystem::exists(flags.config_path))
            throw ValidationError("config file '" + flags.config_path + "' does not exist");
        try {
            doc = nlohmann::json::parse(read_text_file(flags.config_path));
        } catch (const std::exception& e) {
            throw ValidationError(std::string("config is not valid JSON: ") + e.what());
        }
    }
    for (const auto& assignment : flags.set_overrides) apply_set_override(doc, assignment);
    if (!doc.contains("source")) doc["source"] = {{"synth", nlohmann::json::object()}};
    ExperimentConfig config = config_from_json_text(doc.dump());
    if (flags.loss) config.train.loss.kind = loss_from_string(*flags.loss);
    if (flags.epochs) config.train.epochs = *flags.epochs;
    if (flags.batch_size) config.train.batch_size = *flags.batch_size;
    if (flags.seed) config.seed = *flags.seed;
    if (flags.season) config.season_filter = *flags.season;
    if (flags.no_season_split) {
        config.seasonality_mode = "whole";
        config.season_filter.reset();
    }
    if (flags.skip_anomaly_removal) config.anomaly_mode = "off";
    if (flags.inject_rate) {
        if (*flags.inject_rate > 0.0) {
            InjectionSpec spec = config.injection ? *config.injection : InjectionSpec{};
            spec.rate = *flags.inject_rate;
            config.injection = spec;
        } else {
            config.injection.reset();
        }
    }
    if (flags.inject_seed && config.injection) config.injection->seed = *flags.inject_seed;
    if (flags.output_dir) config.output_dir = *flags.output_dir;
    return config;
}

void print_report_line(const EvalReport& report) {
    auto opt = [](const std::optional<double>& v) {
        if (!v) return std::string("absent");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", *v);
        return std::string(buf);
    };
    std::printf("  %-4s under_rmse=%s (n=%zu)  over_rmse=%s (n=%zu)  exact=%zu\n",
                report.metadata.count("season") ? report.metadata.at("season").c_str() : "?",
                opt(report.under_rmse).c_str(), report.n_under, opt(report.over_rmse).c_str(),
                report.n_over, report.n_exact);
}

int cmd_synth(const std::string& out_csv, const std::string& out_holidays,
              const SynthSpec& spec) {
    MultiSeries series = generate(spec);
    write_series_csv(out_csv, series);
    write_holiday_file(out_holidays, synth_holidays(spec));
    std::printf("wrote %zu hourly records to %s (+%s)\n", series.size(), out_csv.c_str(),
                out_holidays.c_str());
    return kExitOk;
}

int cmd_ingest(const std::string& csv_path, const std::string& holiday_path,
               const std::string& out_path) {
    const HolidaySet holidays =
        holiday_path.empty() ? HolidaySet{} : read_holiday_file(holiday_path);
    MultiSeries series = ingest_csv(csv_path);
    const std::size_t raw = series.size();
    series = merge_calendar(std::move(series), holidays);
    series = fill_missing(series, holidays);
    write_series_csv(out_path, series);
    std::printf("ingested %zu rows -> %zu gap-free hourly records -> %s\n", raw, series.size(),
                out_path.c_str());
    return kExitOk;
}

int cmd_inject(const std::string& dataset_path, const InjectionSpec& spec,
               const std::string& out_path, const std::string& truth_path) {
    SeasonalDataset dataset = read_dataset_csv(dataset_path);
    InjectionResult result = inject_outliers(dataset, spec);
    write_dataset_csv(out_path, result.dataset);
    nlohmann::json j;
    j["rate"] = spec.rate;
    j["seed"] = spec.seed;
    j["magnitude"] = spec.magnitude;
    j["weather_share"] = spec.weather_share;
    j["indices"] = result.ground_truth;
    write_text_file(truth_path, j.dump(2) + "\n");
    std::printf("injected %zu outliers -> %s (ground truth: %s)\n",
                result.ground_truth.size(), out_path.c_str(), truth_path.c_str());
    return kExitOk;
}

int cmd_detect(const std::string& dataset_path, const DbscanParams& params,
               std::optional<double> inject_rate, std::uint64_t inject_seed,
               const std::string& report_path, const std::string& out_path) {
    SeasonalDataset dataset = read_dataset_csv(dataset_path);
    std::vector<std::size_t> ground_truth;
    if (inject_rate) {
        InjectionSpec spec;
        spec.rate = *inject_rate;
        spec.seed = inject_seed;
        InjectionResult result = inject_outliers(dataset, spec);
        dataset = std::move(result.dataset);
        ground_truth = std::move(result.ground_truth);
    }

    std::vector<double> consumption(dataset.records.size());
    for (std::size_t i = 0; i < consumption.size(); ++i)
        consumption[i] = dataset.records[i].consumption;
    const ClusterLabeling labeling = dbscan(consumption, params);
    dataset = flag_anomalies(std::move(dataset), labeling);

    nlohmann::json j;
    j["dataset"] = dataset_path;
    j["eps"] = params.eps;
    j["min_samples"] = params.min_samples;
    j["n_records"] = dataset.records.size();
    j["n_clusters"] = labeling.n_clusters;
    j["main_cluster"] = labeling.main_cluster;
    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < dataset.anomaly_flags.size(); ++i)
        if (dataset.anomaly_flags[i]) flagged.push_back(i);
    j["n_flagged"] = flagged.size();
    j["flagged_indices"] = flagged;
    if (!ground_truth.empty()) {
        const DetectionScore score = score_detection(dataset.anomaly_flags, ground_truth);
        j["n_injected"] = ground_truth.size();
        j["precision"] = score.precision;
        j["recall"] = score.recall;
        std::printf("flagged %zu of %zu records; precision %.4f recall %.4f\n", flagged.size(),
                    dataset.records.size(), score.precision, score.recall);
    } else {
        std::printf("flagged %zu of %zu records\n", flagged.size(), dataset.records.size());
    }
    if (!report_path.empty()) write_text_file(report_path, j.dump(2) + "\n");

    if (!out_path.empty()) {
        dataset = substitute(std::move(dataset));
        write_dataset_csv(out_path, dataset);
        std::printf("substituted dataset -> %s\n", out_path.c_str());
    }
    return kExitOk;
}

int cmd_train(const CommonConfigFlags& flags, const std::string& checkpoint_out) {
    ExperimentConfig config = resolve_config(flags);
    if (flags.dry_run) {
        std::fputs(describe_plan(config).c_str(), stdout);
        return kExitOk;
    }
    PipelineResult result = run_pipeline(config);
    for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("pipeline complete; artifacts under %s\n", result.output_dir.c_str());
    for (const auto& report : result.reports) print_report_line(report);

    if (!checkpoint_out.empty()) {
        namespace fs = std::filesystem;
        std::vector<fs::path> ckpts;
        for (const auto& entry : fs::directory_iterator(fs::path(result.output_dir) /
                                                        "checkpoints"))
            ckpts.push_back(entry.path());
        if (ckpts.size() != 1)
            throw ValidationError(
                "--checkpoint-out needs a single trained model; use --season or "
                "--no-season-split");
        fs::copy_file(ckpts.front(), checkpoint_out, fs::copy_options::overwrite_existing);
        std::printf("checkpoint copied to %s\n", checkpoint_out.c_str());
    }
    return kExitOk;
}

int cmd_evaluate(const std::string& checkpoint_path, const std::string& dataset_path,
                 double bin_width, bool raw_units, std::string report_path,
                 std::string hist_path) {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    SeasonalDataset dataset = read_dataset_csv(dataset_path);

    const int first_test_year = ckpt.meta.count("first_test_year")
                                    ? std::stoi(ckpt.meta.at("first_test_year"))
                                    : 2019;
    const auto samples = make_windows(dataset, ckpt.model.window);
    TrainTestSplit split = split_train_test(samples, first_test_year);
    for (const auto& w : split.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (split.test.empty()) throw ValidationError("no test samples in " + dataset_path);

    std::vector<double> predictions = predict(ckpt.model, split.test);
    std::vector<double> targets(split.test.size());
    for (std::size_t i = 0; i < split.test.size(); ++i) targets[i] = split.test[i].target;
    if (raw_units) {
        if (!ckpt.meta.count("scaler_median") || !ckpt.meta.count("scaler_iqr"))
            throw ValidationError("checkpoint lacks scaler parameters for --raw-units");
        const double median = std::stod(ckpt.meta.at("scaler_median"));
        const double iqr = std::stod(ckpt.meta.at("scaler_iqr"));
        for (auto& p : predictions) p = p * iqr + median;
        for (auto& t : targets) t = t * iqr + median;
    }
    EvalReport report = split_rmse(predictions, targets);
    std::vector<double> errors(predictions.size());
    for (std::size_t i = 0; i < errors.size(); ++i) errors[i] = predictions[i] - targets[i];
    report.histogram = error_histogram(errors, bin_width);
    report.metadata["season"] = to_string(dataset.season_id);
    report.metadata["units"] = raw_units ? "raw" : "scaled";
    report.metadata["checkpoint"] = checkpoint_path;
    report.metadata["dataset"] = dataset_path;
    for (const char* key : {"loss", "global_seed", "shuffle_seed"})
        if (ckpt.meta.count(key)) report.metadata[key] = ckpt.meta.at(key);

    if (report_path.empty()) report_path = "evaluation.report.json";
    if (hist_path.empty()) hist_path = "evaluation.hist.csv";
    write_report_json(report_path, report);
    write_histogram_csv(hist_path, report.histogram);
    print_report_line(report);
    std::printf("report -> %s, histogram -> %s\n", report_path.c_str(), hist_path.c_str());
    return kExitOk;
}

int cmd_matrix(const CommonConfigFlags& flags, const MatrixAxes& axes, int jobs) {
    ExperimentConfig config = resolve_config(flags);
    if (flags.dry_run) {
        std::fputs(describe_plan(config).c_str(), stdout);
        std::printf("matrix: %zu loss x %zu anomaly x %zu seasonality x %zu rate cells\n",
                    axes.losses.size(), axes.anomaly_modes.size(),
                    axes.seasonality_modes.size(),
                    axes.inject_rates.empty() ? 1 : axes.inject_rates.size());
        return kExitOk;
    }
    MatrixResult result = run_matrix(config, axes, jobs);
    std::size_t failed = 0;
    for (const auto& cell : result.cells) {
        if (!cell.ok) {
            ++failed;
            std::fprintf(stderr, "cell %s FAILED: %s\n", cell.cell_id.c_str(),
                         cell.error.c_str());
        }
    }
    std::printf("matrix complete: %zu cells, %zu failed; summary under %s\n",
                result.cells.size(), failed, result.output_dir.c_str());
    std::fputs(comparison_to_csv(result.comparison).c_str(), stdout);
    return failed == 0 ? kExitOk : kExitStage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loadcast: hour-ahead load forecasting with anomaly cleanup and "
                 "asymmetric losses"};
    app.require_subcommand(1);

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset + holiday file");
    SynthSpec synth_spec;
    std::string synth_csv = "synthetic.csv";
    std::string synth_holiday_path = "holidays.txt";
    synth->add_option("--out-csv", synth_csv, "output CSV path");
    synth->add_option("--out-holidays", synth_holiday_path, "output holiday file path");
    synth->add_option("--start-year", synth_spec.start_year);
    synth->add_option("--end-year", synth_spec.end_year);
    synth->add_option("--base-load", synth_spec.base_load);
    synth->add_option("--daily-amp", synth_spec.daily_amp);
    synth->add_option("--weekly-amp", synth_spec.weekly_amp);
    synth->add_option("--seasonal-amp", synth_spec.seasonal_amp);
    synth->add_option("--temp-coupling", synth_spec.temp_coupling);
    synth->add_option("--comfort-threshold", synth_spec.comfort_threshold);
    synth->add_option("--noise-std", synth_spec.noise_std);
    synth->add_option("--holiday-damping", synth_spec.holiday_damping);
    synth->add_option("--seed", synth_spec.seed);

    // --- ingest ---
    auto* ingest = app.add_subcommand("ingest", "validate, merge calendar and gap-fill a CSV");
    std::string ingest_csv_path, ingest_holiday_path, ingest_out = "ingested.csv";
    ingest->add_option("--csv", ingest_csv_path, "input CSV")->required();
    ingest->add_option("--holidays", ingest_holiday_path, "holiday file");
    ingest->add_option("--out", ingest_out, "output CSV path");

    // --- inject-outliers ---
    auto* inject = app.add_subcommand("inject-outliers",
                                      "corrupt a processed dataset with synthetic outliers");
    std::string inject_dataset, inject_out = "injected.csv",
                inject_truth = "ground_truth.json";
    InjectionSpec inject_spec;
    inject->add_option("--dataset", inject_dataset, "processed dataset CSV")->required();
    inject->add_option("--rate", inject_spec.rate, "fraction of records to corrupt");
    inject->add_option("--seed", inject_spec.seed);
    inject->add_option("--weather-share", inject_spec.weather_share);
    inject->add_option("--magnitude", inject_spec.magnitude);
    inject->add_option("--out", inject_out, "corrupted dataset CSV path");
    inject->add_option("--ground-truth", inject_truth, "ground-truth JSON path");

    // --- detect ---
    auto* detect = app.add_subcommand("detect", "DBSCAN anomaly detection on a dataset");
    std::string detect_dataset, detect_report, detect_out;
    DbscanParams detect_params;
    std::optional<double> detect_inject_rate;
    std::uint64_t detect_inject_seed = 1;
    detect->add_option("--dataset", detect_dataset, "processed dataset CSV")->required();
    detect->add_option("--eps", detect_params.eps, "neighbourhood radius (default 0.11)");
    detect->add_option("--min-samples", detect_params.min_samples,
                       "min neighbourhood size (default 3)");
    detect->add_option("--inject-rate", detect_inject_rate,
                       "inject outliers first at this rate");
    detect->add_option("--inject-seed", detect_inject_seed, "injection seed");
    detect->add_option("--report", detect_report, "write detection report JSON here");
    detect->add_option("--substituted-out", detect_out,
                       "also substitute and write the cleaned dataset here");

    // --- train ---
    auto* train_cmd = app.add_subcommand("train", "run the pipeline and train model(s)");
    CommonConfigFlags train_flags;
    std::string checkpoint_out;
    add_common_config_flags(train_cmd, train_flags);
    train_cmd->add_option("--checkpoint-out", checkpoint_out,
                          "copy the (single) trained checkpoint here");

    // --- evaluate ---
    auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on a dataset");
    std::string eval_checkpoint, eval_dataset, eval_report, eval_hist;
    double eval_bin_width = 0.02;
    bool eval_raw_units = false;
    evaluate->add_option("--checkpoint", eval_checkpoint, "model checkpoint")->required();
    evaluate->add_option("--dataset", eval_dataset, "processed dataset CSV")->required();
    evaluate->add_option("--bin-width", eval_bin_width, "histogram bin width (default 0.02)");
    evaluate->add_flag("--raw-units", eval_raw_units, "report in raw units via the scaler");
    evaluate->add_option("--report", eval_report, "report JSON path");
    evaluate->add_option("--hist", eval_hist, "histogram CSV path");

    // --- matrix ---
    auto* matrix = app.add_subcommand("matrix", "run the loss/anomaly/seasonality matrix");
    CommonConfigFlags matrix_flags;
    MatrixAxes axes;
    int jobs = 1;
    add_common_config_flags(matrix, matrix_flags);
    matrix->add_option("--losses", axes.losses, "loss axis (default mse al1 al2)");
    matrix->add_option("--anomaly-modes", axes.anomaly_modes,
                       "anomaly axis (default off detect_substitute)");
    matrix->add_option("--seasonality-modes", axes.seasonality_modes,
                       "seasonality axis (default split)");
    matrix->add_option("--inject-rates", axes.inject_rates,
                       "injection-rate axis; 0 means no injection");
    matrix->add_option("--jobs", jobs, "parallel cells (default 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(synth_csv, synth_holiday_path, synth_spec);
        if (ingest->parsed()) return cmd_ingest(ingest_csv_path, ingest_holiday_path, ingest_out);
        if (inject->parsed())
            return cmd_inject(inject_dataset, inject_spec, inject_out, inject_truth);
        if (detect->parsed())
            return cmd_detect(detect_dataset, detect_params, detect_inject_rate,
                              detect_inject_seed, detect_report, detect_out);
        if (train_cmd->parsed()) return cmd_train(train_flags, checkpoint_out);
        if (evaluate->parsed())
            return cmd_evaluate(eval_checkpoint, eval_dataset, eval_bin_width, eval_raw_units,
                                eval_report, eval_hist);
        if (matrix->parsed()) return cmd_matrix(matrix_flags, axes, jobs);
    } catch (const StageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitStage;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitOk;
}
