#include "loadcast/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "loadcast/rng.hpp"

namespace loadcast {

void DbscanParams::validate() const {
    if (!(eps > 0.0)) throw std::invalid_argument("dbscan eps must be > 0");
    if (min_samples < 1) throw std::invalid_argument("dbscan min_samples must be >= 1");
}

ClusterLabeling dbscan(const std::vector<double>& points, const DbscanParams& params) {
    params.validate();
    const std::size_t n = points.size();
    ClusterLabeling out;
    out.labels.assign(n, -1);
    if (n == 0) return out;

    // Sort once; every eps-neighbourhood is then a contiguous run.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    std::vector<char> core(n, 0);
    {
        std::size_t left = 0, right = 0;
        for (std::size_t s = 0; s < n; ++s) {
            const double v = points[order[s]];
            while (points[order[left]] < v - params.eps) ++left;
            while (right < n && points[order[right]] <= v + params.eps) ++right;
            core[order[s]] = (right - left) >= static_cast<std::size_t>(params.min_samples);
        }
    }

    // Core components: in 1-D two cores chain together exactly when every
    // consecutive core gap between them is <= eps, so components are maximal
    // runs over the sorted cores.
    std::vector<int> component(n, -1);
    int n_runs = 0;
    {
        bool have_prev = false;
        double prev_value = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t i = order[s];
            if (!core[i]) continue;
            if (!have_prev || points[i] - prev_value > params.eps) ++n_runs;
            component[i] = n_runs - 1;
            prev_value = points[i];
            have_prev = true;
        }
    }

    // Cluster ids follow first appearance in input order.
    std::vector<int> run_to_label(static_cast<std::size_t>(n_runs), -1);
    int next_label = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        int& label = run_to_label[static_cast<std::size_t>(component[i])];
        if (label < 0) label = next_label++;
    }
    out.n_clusters = next_label;

    std::vector<std::size_t> cluster_size(static_cast<std::size_t>(next_label), 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) {
            out.labels[i] = run_to_label[static_cast<std::size_t>(component[i])];
            ++cluster_size[static_cast<std::size_t>(out.labels[i])];
        }
    }

    // Border points: nearest core within eps is the closest core on either
    // side in sorted order; ties go to the smaller value so the partition is
    // independent of input order.
    std::vector<std::int64_t> prev_core(n), next_core(n);
    {
        std::int64_t last = -1;
        for (std::size_t s = 0; s < n; ++s) {
            if (core[order[s]]) last = static_cast<std::int64_t>(s);
            prev_core[s] = last;
        }
        std::int64_t next = -1;
        for (std::int64_t s = static_cast<std::int64_t>(n) - 1; s >= 0; --s) {
            if (core[order[static_cast<std::size_t>(s)]]) next = s;
            next_core[static_cast<std::size_t>(s)] = next;
        }
    }
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t i = order[s];
        if (core[i]) continue;
        const double v = points[i];
        int best = -1;
        double best_dist = 0.0;
        if (prev_core[s] >= 0) {
            const std::size_t j = order[static_cast<std::size_t>(prev_core[s])];
            best_dist = v - points[j];
            if (best_dist <= params.eps) best = out.labels[j];
        }
        if (next_core[s] >= 0) {
            const std::size_t j = order[static_cast<std::size_t>(next_core[s])];
            const double dist = points[j] - v;
            // Strict: an equidistant left core (smaller value) wins.
            if (dist <= params.eps && (best < 0 || dist < best_dist)) best = out.labels[j];
        }
        if (best >= 0) {
            out.labels[i] = best;
            ++cluster_size[static_cast<std::size_t>(best)];
        }
    }

    for (int c = 0; c < next_label; ++c) {
        if (out.main_cluster < 0 ||
            cluster_size[static_cast<std::size_t>(c)] >
                cluster_size[static_cast<std::size_t>(out.main_cluster)])
            out.main_cluster = c;
    }
    return out;
}

SeasonalDataset flag_anomalies(SeasonalDataset dataset, const ClusterLabeling& labeling) {
    if (labeling.labels.size() != dataset.records.size())
        throw std::runtime_error("flag_anomalies: labeling length " +
                                 std::to_string(labeling.labels.size()) +
                                 " does not match dataset size " +
                                 std::to_string(dataset.records.size()));
    dataset.anomaly_flags.assign(dataset.records.size(), 0);
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        if (labeling.labels[i] != labeling.main_cluster &&
            dataset.records[i].is_holiday == 0)
            dataset.anomaly_flags[i] = 1;
    }
    return dataset;
}

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SeasonalDataset substitute(SeasonalDataset dataset, int train_cutoff_year) {
    const std::size_t n = dataset.records.size();
    if (dataset.anomaly_flags.size() != n)
        throw std::runtime_error("substitute: anomaly flags not populated");
    dataset.substituted.assign(n, 0);

    const std::vector<std::uint8_t> original_flags = dataset.anomaly_flags;
    std::unordered_map<HourStamp, std::size_t> by_time;
    by_time.reserve(n);
    for (std::size_t i = 0; i < n; ++i) by_time.emplace(dataset.records[i].timestamp, i);

    auto clean_source = [&](std::size_t j) {
        return original_flags[j] == 0 && dataset.records[j].is_holiday == 0;
    };

    const HourStamp dataset_start = n > 0 ? dataset.records.front().timestamp : 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (original_flags[i] == 0) continue;
        bool resolved = false;
        for (HourStamp t = dataset.records[i].timestamp - kHoursPerWeek; t >= dataset_start;
             t -= kHoursPerWeek) {
            auto it = by_time.find(t);
            if (it == by_time.end() || !clean_source(it->second)) continue;
            dataset.records[i].consumption = dataset.records[it->second].consumption;
            resolved = true;
            break;
        }
        if (!resolved) {
            const unsigned hour = hour_of_day(dataset.records[i].timestamp);
            std::vector<double> pool;
            for (std::size_t j = 0; j < n; ++j) {
                if (clean_source(j) && hour_of_day(dataset.records[j].timestamp) == hour &&
                    year_of(dataset.records[j].timestamp) <= train_cutoff_year)
                    pool.push_back(dataset.records[j].consumption);
            }
            if (pool.empty()) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (clean_source(j) && hour_of_day(dataset.records[j].timestamp) == hour)
                        pool.push_back(dataset.records[j].consumption);
                }
            }
            if (pool.empty())
                throw std::runtime_error(
                    "substitute: no clean record at hour-of-day " + std::to_string(hour) +
                    " to repair " + format_iso_hour(dataset.records[i].timestamp));
            dataset.records[i].consumption = median_of(std::move(pool));
        }
        dataset.anomaly_flags[i] = 0;
        dataset.substituted[i] = 1;
    }
    return dataset;
}

void InjectionSpec::validate() const {
    if (!(rate > 0.0 && rate < 1.0))
        throw std::invalid_argument("injection rate must be in (0, 1)");
    if (!(weather_share >= 0.0 && weather_share <= 1.0))
        throw std::invalid_argument("injection weather_share must be in [0, 1]");
}

InjectionResult inject_outliers(const SeasonalDataset& dataset, const InjectionSpec& spec) {
    spec.validate();
    const std::size_t n = dataset.records.size();
    const auto n_inject = static_cast<std::size_t>(spec.rate * static_cast<double>(n));
    if (n_inject < 1)
        throw std::runtime_error("inject_outliers: rate * N < 1 (N = " + std::to_string(n) +
                                 ")");

    std::vector<std::size_t> eligible;
    eligible.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (dataset.records[i].is_holiday == 0) eligible.push_back(i);
    if (eligible.size() < n_inject)
        throw std::runtime_error("inject_outliers: not enough non-holiday records");

    const auto n_weather = static_cast<std::size_t>(
        std::llround(spec.weather_share * static_cast<double>(n_inject)));

    // Coldest hours first; ties resolved by index for determinism.
    std::vector<std::size_t> by_temp = eligible;
    std::sort(by_temp.begin(), by_temp.end(), [&](std::size_t a, std::size_t b) {
        const double ta = dataset.records[a].temperature;
        const double tb = dataset.records[b].temperature;
        return ta != tb ? ta < tb : a < b;
    });

    std::vector<char> chosen(n, 0);
    std::vector<std::size_t> picks;
    picks.reserve(n_inject);
    for (std::size_t k = 0; k < n_weather && k < by_temp.size(); ++k) {
        picks.push_back(by_temp[k]);
        chosen[by_temp[k]] = 1;
    }

    Rng rng(spec.seed);
    std::vector<std::size_t> remaining;
    remaining.reserve(eligible.size());
    for (std::size_t i : eligible)
        if (!chosen[i]) remaining.push_back(i);
    while (picks.size() < n_inject) {
        const std::size_t slot = static_cast<std::size_t>(rng.next_below(remaining.size()));
        picks.push_back(remaining[slot]);
        remaining[slot] = remaining.back();
        remaining.pop_back();
    }

    InjectionResult result;
    result.dataset = dataset;
    std::sort(picks.begin(), picks.end());
    for (std::size_t i : picks) {
        const double sign = rng.next_bool() ? 1.0 : -1.0;
        result.dataset.records[i].consumption += sign * spec.magnitude;
    }
    result.ground_truth = std::move(picks);
    return result;
}

DetectionScore score_detection(const std::vector<std::uint8_t>& flags,
                               const std::vector<std::size_t>& ground_truth) {
    DetectionScore score;
    std::vector<char> truth(flags.size(), 0);
    for (std::size_t i : ground_truth)
        if (i < truth.size()) truth[i] = 1;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i] && truth[i]) ++score.true_positives;
        else if (flags[i] && !truth[i]) ++score.false_positives;
        else if (!flags[i] && truth[i]) ++score.false_negatives;
    }
    const auto flagged = score.true_positives + score.false_positives;
    const auto actual = score.true_positives + score.false_negatives;
    score.precision = flagged > 0 ? static_cast<double>(score.true_positives) /
                                        static_cast<double>(flagged)
                                  : 1.0;
    score.recall =
        actual > 0 ? static_cast<double>(score.true_positives) / static_cast<double>(actual)
                   : 1.0;
    return score;
}

}  // namespace loadcast
