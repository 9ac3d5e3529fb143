#include "loadcast/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "loadcast/checkpoint.hpp"
#include "loadcast/csv.hpp"
#include "loadcast/scaler.hpp"
#include "loadcast/util.hpp"

namespace loadcast {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_rate(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", rate);
    return buf;
}

json synth_to_json(const SynthSpec& s) {
    return json{{"start_year", s.start_year},
                {"end_year", s.end_year},
                {"base_load", s.base_load},
                {"daily_amp", s.daily_amp},
                {"weekly_amp", s.weekly_amp},
                {"seasonal_amp", s.seasonal_amp},
                {"temp_coupling", s.temp_coupling},
                {"comfort_threshold", s.comfort_threshold},
                {"noise_std", s.noise_std},
                {"holiday_damping", s.holiday_damping},
                {"seed", s.seed}};
}

SynthSpec synth_from_json(const json& j) {
    SynthSpec s;
    s.start_year = j.value("start_year", s.start_year);
    s.end_year = j.value("end_year", s.end_year);
    s.base_load = j.value("base_load", s.base_load);
    s.daily_amp = j.value("daily_amp", s.daily_amp);
    s.weekly_amp = j.value("weekly_amp", s.weekly_amp);
    s.seasonal_amp = j.value("seasonal_amp", s.seasonal_amp);
    s.temp_coupling = j.value("temp_coupling", s.temp_coupling);
    s.comfort_threshold = j.value("comfort_threshold", s.comfort_threshold);
    s.noise_std = j.value("noise_std", s.noise_std);
    s.holiday_damping = j.value("holiday_damping", s.holiday_damping);
    s.seed = j.value("seed", s.seed);
    return s;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (csv.has_value() == synth.has_value())
        throw ValidationError("config needs exactly one data source (csv or synth)");
    if (csv) {
        if (!std::filesystem::exists(csv->csv_path))
            throw ValidationError("csv path '" + csv->csv_path + "' does not exist");
        if (!csv->holiday_path.empty() && !std::filesystem::exists(csv->holiday_path))
            throw ValidationError("holiday path '" + csv->holiday_path + "' does not exist");
    }
    if (seasonality_mode != "split" && seasonality_mode != "whole")
        throw ValidationError("seasonality_mode must be 'split' or 'whole'");
    if (anomaly_mode != "off" && anomaly_mode != "detect_substitute")
        throw ValidationError("anomaly_mode must be 'off' or 'detect_substitute'");
    if (season_filter) {
        if (seasonality_mode != "split")
            throw ValidationError("season filter requires split mode");
        try {
            if (season_from_string(*season_filter) == SeasonId::ALL)
                throw std::runtime_error("season filter must be S1, S2 or S3");
        } catch (const std::exception& e) {
            throw ValidationError(e.what());
        }
    }
    try {
        if (injection) injection->validate();
        dbscan.validate();
        train.loss.validate();
        if (synth) synth->validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    if (train.epochs < 1 || train.batch_size < 1)
        throw ValidationError("train.epochs and train.batch_size must be >= 1");
    if (!(bin_width > 0.0)) throw ValidationError("bin_width must be > 0");
    if (first_test_year <= train_cutoff_year)
        throw ValidationError("first_test_year must be after train_cutoff_year");
}

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    if (j.contains("source")) {
        const json& src = j["source"];
        if (src.contains("csv")) {
            CsvSource s;
            s.csv_path = src["csv"].value("path", "");
            s.holiday_path = src["csv"].value("holidays", "");
            c.csv = s;
        }
        if (src.contains("synth")) c.synth = synth_from_json(src["synth"]);
    }
    c.seasonality_mode = j.value("seasonality_mode", c.seasonality_mode);
    c.anomaly_mode = j.value("anomaly_mode", c.anomaly_mode);
    if (j.contains("injection") && !j["injection"].is_null()) {
        InjectionSpec spec;
        const json& inj = j["injection"];
        spec.rate = inj.value("rate", spec.rate);
        spec.seed = inj.value("seed", spec.seed);
        spec.weather_share = inj.value("weather_share", spec.weather_share);
        spec.magnitude = inj.value("magnitude", spec.magnitude);
        c.injection = spec;
    }
    if (j.contains("dbscan")) {
        c.dbscan.eps = j["dbscan"].value("eps", c.dbscan.eps);
        c.dbscan.min_samples = j["dbscan"].value("min_samples", c.dbscan.min_samples);
    }
    if (j.contains("train")) {
        const json& t = j["train"];
        c.train.epochs = t.value("epochs", c.train.epochs);
        c.train.batch_size = t.value("batch_size", c.train.batch_size);
        c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
        c.train.clip_norm = t.value("clip_norm", c.train.clip_norm);
        if (t.contains("loss")) c.train.loss.kind = loss_from_string(t["loss"].get<std::string>());
        c.train.loss.a = t.value("a", c.train.loss.a);
        c.train.loss.b = t.value("b", c.train.loss.b);
        c.train.loss.eps1 = t.value("eps1", c.train.loss.eps1);
        c.train.loss.eps2 = t.value("eps2", c.train.loss.eps2);
    }
    if (j.contains("model")) {
        const json& m = j["model"];
        c.model.hidden1 = m.value("hidden1", c.model.hidden1);
        c.model.hidden2 = m.value("hidden2", c.model.hidden2);
        c.model.window = m.value("window", c.model.window);
        c.model.dropout_rate = m.value("dropout", c.model.dropout_rate);
        c.model.relu_head = m.value("relu_head", c.model.relu_head);
    }
    if (j.contains("split")) {
        c.train_cutoff_year = j["split"].value("train_cutoff_year", c.train_cutoff_year);
        c.first_test_year = j["split"].value("first_test_year", c.first_test_year);
    }
    if (j.contains("evaluation")) {
        c.bin_width = j["evaluation"].value("bin_width", c.bin_width);
        c.raw_units = j["evaluation"].value("raw_units", c.raw_units);
    }
    if (j.contains("season_filter") && !j["season_filter"].is_null())
        c.season_filter = j["season_filter"].get<std::string>();
    c.output_dir = j.value("output_dir", c.output_dir);
    c.seed = j.value("seed", c.seed);
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw ValidationError("config file '" + path + "' does not exist");
    return config_from_json_text(read_text_file(path));
}

std::string config_to_json_text(const ExperimentConfig& c) {
    json j;
    if (c.csv) j["source"]["csv"] = {{"path", c.csv->csv_path}, {"holidays", c.csv->holiday_path}};
    if (c.synth) j["source"]["synth"] = synth_to_json(*c.synth);
    j["seasonality_mode"] = c.seasonality_mode;
    j["anomaly_mode"] = c.anomaly_mode;
    if (c.injection)
        j["injection"] = {{"rate", c.injection->rate},
                          {"seed", c.injection->seed},
                          {"weather_share", c.injection->weather_share},
                          {"magnitude", c.injection->magnitude}};
    else
        j["injection"] = nullptr;
    j["dbscan"] = {{"eps", c.dbscan.eps}, {"min_samples", c.dbscan.min_samples}};
    j["train"] = {{"loss", to_string(c.train.loss.kind)},
                  {"a", c.train.loss.a},
                  {"b", c.train.loss.b},
                  {"eps1", c.train.loss.eps1},
                  {"eps2", c.train.loss.eps2},
                  {"epochs", c.train.epochs},
                  {"batch_size", c.train.batch_size},
                  {"learning_rate", c.train.learning_rate},
                  {"clip_norm", c.train.clip_norm}};
    j["model"] = {{"hidden1", c.model.hidden1},
                  {"hidden2", c.model.hidden2},
                  {"window", c.model.window},
                  {"dropout", c.model.dropout_rate},
                  {"relu_head", c.model.relu_head}};
    j["split"] = {{"train_cutoff_year", c.train_cutoff_year},
                  {"first_test_year", c.first_test_year}};
    j["evaluation"] = {{"bin_width", c.bin_width}, {"raw_units", c.raw_units}};
    if (c.season_filter) j["season_filter"] = *c.season_filter;
    j["seed"] = c.seed;
    return j.dump(2);
}

namespace {

// Collects every artifact the run writes so the manifest can checksum them.
class ArtifactLog {
public:
    explicit ArtifactLog(std::string root) : root_(std::move(root)) {}

    std::string path(const std::string& rel) {
        const std::filesystem::path p = std::filesystem::path(root_) / rel;
        ensure_directory(p.parent_path().string());
        std::lock_guard<std::mutex> lock(mutex_);
        rel_paths_.push_back(rel);
        return p.string();
    }

    json checksums() const {
        json files = json::object();
        for (const auto& rel : rel_paths_)
            files[rel] = fnv1a64_hex_of_file((std::filesystem::path(root_) / rel).string());
        return files;
    }

private:
    std::string root_;
    std::vector<std::string> rel_paths_;
    std::mutex mutex_;
};

struct PreparedData {
    std::vector<SeasonalDataset> datasets;
    RobustScalerParams scaler;
};

MultiSeries load_source(const ExperimentConfig& config, HolidaySet* holidays) {
    if (config.synth) {
        *holidays = synth_holidays(*config.synth);
        return generate(*config.synth);
    }
    *holidays = config.csv->holiday_path.empty() ? HolidaySet{}
                                                 : read_holiday_file(config.csv->holiday_path);
    return ingest_csv(config.csv->csv_path);
}

std::uint64_t season_stream(const ExperimentConfig& config, std::size_t season_index,
                            std::uint64_t salt) {
    return derive_seed(config.seed, salt * 1000 + season_index);
}

struct DetectionOutcome {
    std::size_t n_flagged = 0;
    int n_clusters = 0;
    int main_cluster = -1;
    std::optional<DetectionScore> score;
    std::vector<std::size_t> flagged_indices;
};

DetectionOutcome detect_and_flag(SeasonalDataset& dataset, const DbscanParams& params,
                                 const std::vector<std::size_t>* ground_truth) {
    std::vector<double> consumption(dataset.records.size());
    for (std::size_t i = 0; i < consumption.size(); ++i)
        consumption[i] = dataset.records[i].consumption;
    const ClusterLabeling labeling = dbscan(consumption, params);
    dataset = flag_anomalies(std::move(dataset), labeling);

    DetectionOutcome outcome;
    outcome.n_clusters = labeling.n_clusters;
    outcome.main_cluster = labeling.main_cluster;
    for (std::size_t i = 0; i < dataset.anomaly_flags.size(); ++i)
        if (dataset.anomaly_flags[i]) outcome.flagged_indices.push_back(i);
    outcome.n_flagged = outcome.flagged_indices.size();
    if (ground_truth) outcome.score = score_detection(dataset.anomaly_flags, *ground_truth);
    return outcome;
}

json detection_to_json(const SeasonalDataset& dataset, const DetectionOutcome& outcome,
                       std::size_t n_injected) {
    json j;
    j["season"] = to_string(dataset.season_id);
    j["n_records"] = dataset.records.size();
    j["n_clusters"] = outcome.n_clusters;
    j["main_cluster"] = outcome.main_cluster;
    j["n_flagged"] = outcome.n_flagged;
    j["flagged_indices"] = outcome.flagged_indices;
    if (outcome.score) {
        j["n_injected"] = n_injected;
        j["precision"] = outcome.score->precision;
        j["recall"] = outcome.score->recall;
        j["true_positives"] = outcome.score->true_positives;
        j["false_positives"] = outcome.score->false_positives;
        j["false_negatives"] = outcome.score->false_negatives;
    }
    return j;
}

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& config) {
    config.validate();
    ensure_directory(config.output_dir);
    std::filesystem::remove_all(std::filesystem::path(config.output_dir) / "failed");
    ArtifactLog artifacts(config.output_dir);
    PipelineResult result;
    result.output_dir = config.output_dir;

    std::string stage = "load-data";
    try {
        HolidaySet holidays;
        MultiSeries series = load_source(config, &holidays);

        stage = "merge-calendar";
        series = merge_calendar(std::move(series), holidays);

        stage = "fill-missing";
        series = fill_missing(series, holidays);

        stage = "fit-scaler";
        const RobustScalerParams scaler = fit_robust_scaler(series, config.train_cutoff_year);
        for (int f : scaler.degenerate_features)
            result.warnings.push_back(std::string("feature '") + kFeatureNames[f] +
                                      "' has zero IQR; substituted 1.0");

        stage = "apply-scaler";
        series = apply_scaler(std::move(series), scaler);

        stage = "season-split";
        std::vector<SeasonalDataset> datasets;
        if (config.seasonality_mode == "split") {
            datasets = split_seasons(series, scaler);
            if (config.season_filter) {
                const SeasonId wanted = season_from_string(*config.season_filter);
                std::erase_if(datasets,
                              [&](const SeasonalDataset& d) { return d.season_id != wanted; });
            }
        } else {
            datasets.push_back(whole_series_dataset(series, scaler));
        }

        for (std::size_t di = 0; di < datasets.size(); ++di) {
            SeasonalDataset& dataset = datasets[di];
            const std::string season = to_string(dataset.season_id);
            const auto season_index =
                static_cast<std::size_t>(dataset.season_id == SeasonId::ALL
                                             ? 3
                                             : static_cast<int>(dataset.season_id));

            std::vector<std::size_t> ground_truth;
            bool injected = false;
            if (config.injection) {
                stage = "inject:" + season;
                InjectionSpec spec = *config.injection;
                spec.seed = derive_seed(spec.seed, season_index);
                InjectionResult inj = inject_outliers(dataset, spec);
                dataset = std::move(inj.dataset);
                ground_truth = std::move(inj.ground_truth);
                injected = true;
                json gt;
                gt["season"] = season;
                gt["rate"] = spec.rate;
                gt["seed"] = spec.seed;
                gt["magnitude"] = spec.magnitude;
                gt["weather_share"] = spec.weather_share;
                gt["indices"] = ground_truth;
                write_text_file(artifacts.path("data/" + season + ".ground_truth.json"),
                                gt.dump(2) + "\n");
            }

            if (config.anomaly_mode == "detect_substitute") {
                stage = "detect:" + season;
                DetectionOutcome outcome = detect_and_flag(
                    dataset, config.dbscan, injected ? &ground_truth : nullptr);
                write_text_file(artifacts.path("data/" + season + ".detection.json"),
                                detection_to_json(dataset, outcome, ground_truth.size()).dump(2) +
                                    "\n");
                stage = "substitute:" + season;
                dataset = substitute(std::move(dataset), config.train_cutoff_year);
            }

            stage = "write-dataset:" + season;
            write_dataset_csv(artifacts.path("data/" + season + ".csv"), dataset);

            stage = "window:" + season;
            const auto samples = make_windows(dataset, config.model.window);

            stage = "train-test-split:" + season;
            TrainTestSplit split = split_train_test(samples, config.first_test_year);
            for (const auto& w : split.warnings)
                result.warnings.push_back(season + ": " + w);
            if (split.train.empty())
                throw std::runtime_error("no training samples for season " + season);

            stage = "train:" + season;
            LstmModel model =
                init_lstm_model(config.model, season_stream(config, season_index, 1));
            TrainConfig train_config = config.train;
            train_config.shuffle_seed = season_stream(config, season_index, 2);
            TrainResult trained = train(std::move(model), split.train, train_config);

            Checkpoint ckpt;
            ckpt.model = std::move(trained.model);
            ckpt.meta["season"] = season;
            ckpt.meta["loss"] = to_string(config.train.loss.kind);
            ckpt.meta["loss_a"] = format_double(config.train.loss.a);
            ckpt.meta["loss_b"] = format_double(config.train.loss.b);
            ckpt.meta["loss_eps1"] = format_double(config.train.loss.eps1);
            ckpt.meta["loss_eps2"] = format_double(config.train.loss.eps2);
            ckpt.meta["epochs"] = std::to_string(config.train.epochs);
            ckpt.meta["batch_size"] = std::to_string(config.train.batch_size);
            ckpt.meta["learning_rate"] = format_double(config.train.learning_rate);
            ckpt.meta["shuffle_seed"] = std::to_string(train_config.shuffle_seed);
            ckpt.meta["global_seed"] = std::to_string(config.seed);
            ckpt.meta["first_test_year"] = std::to_string(config.first_test_year);
            ckpt.meta["train_cutoff_year"] = std::to_string(config.train_cutoff_year);
            ckpt.meta["scaler_median"] = format_double(scaler.median[kConsumption]);
            ckpt.meta["scaler_iqr"] = format_double(scaler.iqr[kConsumption]);
            ckpt.meta["final_train_loss"] = format_double(trained.epoch_losses.back());
            stage = "checkpoint:" + season;
            save_checkpoint(artifacts.path("checkpoints/" + season + ".ckpt"), ckpt);

            if (split.test.empty()) {
                result.warnings.push_back(season + ": skipping evaluation (no test samples)");
                continue;
            }

            stage = "evaluate:" + season;
            std::vector<double> predictions = predict(ckpt.model, split.test);
            std::vector<double> targets(split.test.size());
            for (std::size_t i = 0; i < split.test.size(); ++i)
                targets[i] = split.test[i].target;
            if (config.raw_units) {
                for (auto& p : predictions) p = invert_scaler(p, scaler);
                for (auto& t : targets) t = invert_scaler(t, scaler);
            }
            EvalReport report = split_rmse(predictions, targets);
            std::vector<double> errors(predictions.size());
            for (std::size_t i = 0; i < predictions.size(); ++i)
                errors[i] = predictions[i] - targets[i];
            report.histogram = error_histogram(errors, config.bin_width);

            report.metadata["season"] = season;
            report.metadata["loss"] = to_string(config.train.loss.kind);
            report.metadata["loss_a"] = format_rate(config.train.loss.a);
            report.metadata["loss_b"] = format_rate(config.train.loss.b);
            report.metadata["loss_eps1"] = format_rate(config.train.loss.eps1);
            report.metadata["loss_eps2"] = format_rate(config.train.loss.eps2);
            report.metadata["epochs"] = std::to_string(config.train.epochs);
            report.metadata["batch_size"] = std::to_string(config.train.batch_size);
            report.metadata["window"] = std::to_string(config.model.window);
            report.metadata["dbscan_eps"] = format_rate(config.dbscan.eps);
            report.metadata["dbscan_min_samples"] = std::to_string(config.dbscan.min_samples);
            report.metadata["anomaly_mode"] = config.anomaly_mode;
            report.metadata["seasonality_mode"] = config.seasonality_mode;
            report.metadata["inject_rate"] =
                config.injection ? format_rate(config.injection->rate) : "0";
            report.metadata["units"] = config.raw_units ? "raw" : "scaled";
            report.metadata["global_seed"] = std::to_string(config.seed);
            report.metadata["model_seed"] = std::to_string(ckpt.model.rng_seed);
            report.metadata["shuffle_seed"] = std::to_string(train_config.shuffle_seed);
            report.metadata["inject_seed"] =
                config.injection ? std::to_string(config.injection->seed) : "none";
            report.metadata["n_train"] = std::to_string(split.train.size());
            report.metadata["n_test"] = std::to_string(split.test.size());

            write_report_json(artifacts.path("reports/" + season + ".report.json"), report);
            write_histogram_csv(artifacts.path("reports/" + season + ".hist.csv"),
                                report.histogram);
            result.reports.push_back(std::move(report));
        }

        stage = "compare";
        result.averaged = compare_experiments(result.reports);
        write_text_file(artifacts.path("reports/averaged.csv"),
                        comparison_to_csv(result.averaged));

        stage = "manifest";
        json manifest;
        manifest["config"] = json::parse(config_to_json_text(config));
        manifest["warnings"] = result.warnings;
        manifest["files"] = artifacts.checksums();
        write_text_file((std::filesystem::path(config.output_dir) / "manifest.json").string(),
                        manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        const std::string marker_dir =
            (std::filesystem::path(config.output_dir) / "failed").string();
        ensure_directory(marker_dir);
        write_text_file(marker_dir + "/stage.txt",
                        "stage: " + stage + "\ncause: " + e.what() + "\n");
        throw StageError(stage, e.what());
    }
    return result;
}

namespace {

std::string cell_id_for(const std::string& loss, const std::string& anomaly,
                        const std::string& seasonality, std::optional<double> rate) {
    std::string id = loss + "-" + anomaly + "-" + seasonality + "-";
    id += rate ? format_rate(*rate) : std::string("none");
    return id;
}

}  // namespace

MatrixResult run_matrix(const ExperimentConfig& base, const MatrixAxes& axes, int jobs) {
    base.validate();
    if (axes.losses.empty() || axes.anomaly_modes.empty() || axes.seasonality_modes.empty())
        throw ValidationError("matrix axes must be non-empty");

    struct Cell {
        ExperimentConfig config;
        std::string id;
    };
    std::vector<Cell> cells;
    const std::vector<std::optional<double>> rates = [&] {
        std::vector<std::optional<double>> r;
        if (axes.inject_rates.empty()) {
            r.push_back(base.injection ? std::optional<double>(base.injection->rate)
                                       : std::nullopt);
        } else {
            for (double rate : axes.inject_rates)
                r.push_back(rate > 0.0 ? std::optional<double>(rate) : std::nullopt);
        }
        return r;
    }();

    for (const auto& loss : axes.losses) {
        for (const auto& anomaly : axes.anomaly_modes) {
            for (const auto& seasonality : axes.seasonality_modes) {
                for (const auto& rate : rates) {
                    Cell cell;
                    cell.config = base;
                    cell.config.train.loss.kind = loss_from_string(loss);
                    cell.config.anomaly_mode = anomaly;
                    cell.config.seasonality_mode = seasonality;
                    if (rate) {
                        InjectionSpec spec =
                            base.injection ? *base.injection : InjectionSpec{};
                        spec.rate = *rate;
                        cell.config.injection = spec;
                    } else {
                        cell.config.injection.reset();
                    }
                    cell.id = cell_id_for(loss, anomaly, seasonality, rate);
                    cell.config.output_dir =
                        (std::filesystem::path(base.output_dir) / "cells" / cell.id).string();
                    cells.push_back(std::move(cell));
                }
            }
        }
    }

    MatrixResult result;
    result.output_dir = base.output_dir;
    result.cells.resize(cells.size());
    std::vector<std::vector<EvalReport>> cell_reports(cells.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            result.cells[i].cell_id = cells[i].id;
            try {
                PipelineResult pr = run_pipeline(cells[i].config);
                cell_reports[i] = std::move(pr.reports);
                result.cells[i].ok = true;
            } catch (const std::exception& e) {
                result.cells[i].ok = false;
                result.cells[i].error = e.what();
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    for (auto& reports : cell_reports)
        for (auto& r : reports) result.all_reports.push_back(std::move(r));

    result.comparison = compare_experiments(result.all_reports);
    ensure_directory(base.output_dir);
    write_text_file((std::filesystem::path(base.output_dir) / "comparison.csv").string(),
                    comparison_to_csv(result.comparison));

    // Paired tables, emitted when both values of the axis appear.
    auto write_delta_table = [&](const std::string& axis, const std::string& old_value,
                                 const std::string& new_value, const std::string& filename) {
        const auto deltas = pair_deltas(result.comparison, axis, old_value, new_value);
        if (deltas.empty()) return;
        std::ostringstream out;
        out << "loss,seasonality_mode,inject_rate,under_" << old_value << ",under_" << new_value
            << ",under_decrease_pct,over_" << old_value << ",over_" << new_value
            << ",over_decrease_pct,notice\n";
        auto opt = [](const std::optional<double>& v) {
            return v ? format_double(*v) : std::string("");
        };
        for (const auto& d : deltas) {
            out << d.old_row.loss << ',' << d.old_row.seasonality_mode << ','
                << d.old_row.inject_rate << ',' << opt(d.old_row.mean_under_rmse) << ','
                << opt(d.new_row ? d.new_row->mean_under_rmse : std::nullopt) << ','
                << opt(d.under_delta_pct) << ',' << opt(d.old_row.mean_over_rmse) << ','
                << opt(d.new_row ? d.new_row->mean_over_rmse : std::nullopt) << ','
                << opt(d.over_delta_pct) << ',' << d.notice << '\n';
        }
        write_text_file((std::filesystem::path(base.output_dir) / filename).string(),
                        out.str());
    };
    write_delta_table("anomaly_mode", "off", "detect_substitute", "table_outliers.csv");
    write_delta_table("seasonality_mode", "whole", "split", "table_seasonality.csv");

    json summary;
    summary["cells"] = json::array();
    for (const auto& cell : result.cells) {
        json c;
        c["id"] = cell.cell_id;
        c["ok"] = cell.ok;
        if (!cell.ok) c["error"] = cell.error;
        summary["cells"].push_back(c);
    }
    write_text_file((std::filesystem::path(base.output_dir) / "matrix_summary.json").string(),
                    summary.dump(2) + "\n");
    return result;
}

std::string describe_plan(const ExperimentConfig& config) {
    config.validate();
    std::ostringstream out;
    out << "data source: " << (config.synth ? "synthetic" : config.csv->csv_path) << '\n';
    if (config.synth)
        out << "  years " << config.synth->start_year << "-" << config.synth->end_year
            << ", seed " << config.synth->seed << '\n';
    out << "seasonality: " << config.seasonality_mode;
    if (config.season_filter) out << " (only " << *config.season_filter << ")";
    out << '\n';
    out << "injection: ";
    if (config.injection)
        out << format_rate(config.injection->rate * 100) << "% at magnitude "
            << config.injection->magnitude << ", seed " << config.injection->seed << '\n';
    else
        out << "none\n";
    out << "anomaly handling: " << config.anomaly_mode << " (eps " << config.dbscan.eps
        << ", min_samples " << config.dbscan.min_samples << ")\n";
    out << "loss: " << to_string(config.train.loss.kind) << " (a " << config.train.loss.a
        << ", b " << config.train.loss.b << ", eps1 " << config.train.loss.eps1 << ", eps2 "
        << config.train.loss.eps2 << ")\n";
    out << "train: " << config.train.epochs << " epochs, batch " << config.train.batch_size
        << ", lr " << config.train.learning_rate << ", window " << config.model.window << '\n';
    out << "model: LSTM " << config.model.hidden1 << "/" << config.model.hidden2 << ", dropout "
        << config.model.dropout_rate << '\n';
    out << "split: train <= " << config.train_cutoff_year << ", test >= "
        << config.first_test_year << '\n';
    out << "output: " << config.output_dir << " (seed " << config.seed << ")\n";
    return out.str();
}

}  // namespace loadcast
