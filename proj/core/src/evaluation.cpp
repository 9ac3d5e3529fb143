#include "loadcast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace loadcast {

EvalReport split_rmse(const std::vector<double>& predictions,
                      const std::vector<double>& targets) {
    if (predictions.empty()) throw std::invalid_argument("split_rmse: empty input");
    if (predictions.size() != targets.size())
        throw std::invalid_argument("split_rmse: length mismatch (" +
                                    std::to_string(predictions.size()) + " vs " +
                                    std::to_string(targets.size()) + ")");
    EvalReport report;
    double under_sq = 0.0, over_sq = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - targets[i];
        if (e < 0.0) {
            ++report.n_under;
            under_sq += e * e;
        } else if (e > 0.0) {
            ++report.n_over;
            over_sq += e * e;
        } else {
            ++report.n_exact;
        }
    }
    if (report.n_under > 0)
        report.under_rmse = std::sqrt(under_sq / static_cast<double>(report.n_under));
    if (report.n_over > 0)
        report.over_rmse = std::sqrt(over_sq / static_cast<double>(report.n_over));
    return report;
}

std::vector<HistogramBin> error_histogram(const std::vector<double>& errors,
                                          double bin_width) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("bin_width must be > 0");
    if (errors.empty()) return {};
    std::int64_t min_bin = 0, max_bin = 0;
    bool first = true;
    std::vector<std::int64_t> indices;
    indices.reserve(errors.size());
    for (double e : errors) {
        const auto k = static_cast<std::int64_t>(std::floor(e / bin_width));
        indices.push_back(k);
        if (first || k < min_bin) min_bin = k;
        if (first || k > max_bin) max_bin = k;
        first = false;
    }
    std::vector<HistogramBin> bins(static_cast<std::size_t>(max_bin - min_bin + 1));
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const std::int64_t k = min_bin + static_cast<std::int64_t>(i);
        bins[i].lower = static_cast<double>(k) * bin_width;
        bins[i].upper = static_cast<double>(k + 1) * bin_width;  // shared edges bit-exact
    }
    for (std::int64_t k : indices) ++bins[static_cast<std::size_t>(k - min_bin)].count;
    return bins;
}

void write_histogram_csv(const std::string& path, const std::vector<HistogramBin>& bins) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write histogram '" + path + "'");
    out << "bin_lower,bin_upper,count\n";
    char buf[80];
    for (const auto& bin : bins) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%zu\n", bin.lower, bin.upper, bin.count);
        out << buf;
    }
}

namespace {

nlohmann::json report_to_json_value(const EvalReport& report) {
    nlohmann::json j;
    j["under_rmse"] = report.under_rmse ? nlohmann::json(*report.under_rmse)
                                        : nlohmann::json(nullptr);
    j["over_rmse"] =
        report.over_rmse ? nlohmann::json(*report.over_rmse) : nlohmann::json(nullptr);
    j["n_under"] = report.n_under;
    j["n_over"] = report.n_over;
    j["n_exact"] = report.n_exact;
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& bin : report.histogram)
        hist.push_back({{"lower", bin.lower}, {"upper", bin.upper}, {"count", bin.count}});
    j["histogram"] = hist;
    j["metadata"] = report.metadata;
    return j;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
    return report_to_json_value(report).dump(2);
}

void write_report_json(const std::string& path, const EvalReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report '" + path + "'");
    out << report_to_json(report) << '\n';
}

EvalReport report_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report '" + path + "'");
    nlohmann::json j;
    in >> j;
    EvalReport report;
    if (!j["under_rmse"].is_null()) report.under_rmse = j["under_rmse"].get<double>();
    if (!j["over_rmse"].is_null()) report.over_rmse = j["over_rmse"].get<double>();
    report.n_under = j["n_under"].get<std::size_t>();
    report.n_over = j["n_over"].get<std::size_t>();
    report.n_exact = j["n_exact"].get<std::size_t>();
    for (const auto& bin : j["histogram"])
        report.histogram.push_back({bin["lower"].get<double>(), bin["upper"].get<double>(),
                                    bin["count"].get<std::size_t>()});
    for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it)
        report.metadata[it.key()] = it.value().get<std::string>();
    return report;
}

namespace {

std::string meta_or(const EvalReport& report, const std::string& key,
                    const std::string& fallback) {
    auto it = report.metadata.find(key);
    return it != report.metadata.end() ? it->second : fallback;
}

struct GroupKey {
    std::string loss, anomaly, seasonality, rate;
    bool operator<(const GroupKey& o) const {
        return std::tie(loss, anomaly, seasonality, rate) <
               std::tie(o.loss, o.anomaly, o.seasonality, o.rate);
    }
};

}  // namespace

std::vector<ComparisonRow> compare_experiments(const std::vector<EvalReport>& reports) {
    struct Accum {
        double under_sum = 0.0;
        int under_n = 0;
        double over_sum = 0.0;
        int over_n = 0;
        int n_reports = 0;
    };
    std::map<GroupKey, Accum> groups;
    for (const auto& report : reports) {
        GroupKey key{meta_or(report, "loss", "?"), meta_or(report, "anomaly_mode", "?"),
                     meta_or(report, "seasonality_mode", "?"),
                     meta_or(report, "inject_rate", "0")};
        Accum& acc = groups[key];
        ++acc.n_reports;
        if (report.under_rmse) {
            acc.under_sum += *report.under_rmse;
            ++acc.under_n;
        }
        if (report.over_rmse) {
            acc.over_sum += *report.over_rmse;
            ++acc.over_n;
        }
    }
    std::vector<ComparisonRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, acc] : groups) {
        ComparisonRow row;
        row.loss = key.loss;
        row.anomaly_mode = key.anomaly;
        row.seasonality_mode = key.seasonality;
        row.inject_rate = key.rate;
        row.n_reports = acc.n_reports;
        if (acc.under_n > 0) row.mean_under_rmse = acc.under_sum / acc.under_n;
        if (acc.over_n > 0) row.mean_over_rmse = acc.over_sum / acc.over_n;
        rows.push_back(row);
    }
    return rows;
}

double percent_delta(double old_value, double new_value) {
    if (old_value == 0.0) throw std::invalid_argument("percent_delta: old value is zero");
    return (old_value - new_value) / old_value * 100.0;
}

namespace {

std::string& axis_field(ComparisonRow& row, const std::string& axis_key) {
    if (axis_key == "loss") return row.loss;
    if (axis_key == "anomaly_mode") return row.anomaly_mode;
    if (axis_key == "seasonality_mode") return row.seasonality_mode;
    if (axis_key == "inject_rate") return row.inject_rate;
    throw std::invalid_argument("unknown comparison axis '" + axis_key + "'");
}

}  // namespace

std::vector<DeltaRow> pair_deltas(const std::vector<ComparisonRow>& rows,
                                  const std::string& axis_key, const std::string& old_value,
                                  const std::string& new_value) {
    std::vector<DeltaRow> deltas;
    for (const auto& row : rows) {
        ComparisonRow probe = row;
        if (axis_field(probe, axis_key) != old_value) continue;
        axis_field(probe, axis_key) = new_value;
        const auto match = std::find_if(rows.begin(), rows.end(), [&](const ComparisonRow& r) {
            return r.loss == probe.loss && r.anomaly_mode == probe.anomaly_mode &&
                   r.seasonality_mode == probe.seasonality_mode &&
                   r.inject_rate == probe.inject_rate;
        });
        DeltaRow delta;
        delta.old_row = row;
        if (match == rows.end()) {
            delta.notice = "no matching row with " + axis_key + "=" + new_value;
        } else {
            delta.new_row = *match;
            if (row.mean_under_rmse && match->mean_under_rmse && *row.mean_under_rmse != 0.0)
                delta.under_delta_pct =
                    percent_delta(*row.mean_under_rmse, *match->mean_under_rmse);
            if (row.mean_over_rmse && match->mean_over_rmse && *row.mean_over_rmse != 0.0)
                delta.over_delta_pct =
                    percent_delta(*row.mean_over_rmse, *match->mean_over_rmse);
            if (!delta.under_delta_pct && !delta.over_delta_pct)
                delta.notice = "no overlapping metrics to compare";
        }
        deltas.push_back(std::move(delta));
    }
    return deltas;
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream out;
    out << "loss,anomaly_mode,seasonality_mode,inject_rate,mean_under_rmse,mean_over_rmse,"
           "n_reports\n";
    char buf[40];
    auto field = [&](const std::optional<double>& v) -> std::string {
        if (!v) return "";
        std::snprintf(buf, sizeof(buf), "%.17g", *v);
        return buf;
    };
    for (const auto& row : rows) {
        out << row.loss << ',' << row.anomaly_mode << ',' << row.seasonality_mode << ','
            << row.inject_rate << ',' << field(row.mean_under_rmse) << ','
            << field(row.mean_over_rmse) << ',' << row.n_reports << '\n';
    }
    return out.str();
}

}  // namespace loadcast
