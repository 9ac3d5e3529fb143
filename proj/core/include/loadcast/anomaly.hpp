#pragma once

#include <cstdint>
#include <vector>

#include "loadcast/seasons.hpp"

namespace loadcast {

struct DbscanParams {
    double eps = 0.11;
    int min_samples = 3;

    void validate() const;  // eps > 0, min_samples >= 1
};

struct ClusterLabeling {
    std::vector<int> labels;   // -1 = noise, 0..K-1 in discovery order
    int main_cluster = -1;     // largest cluster (ties -> lowest id); -1 if no clusters
    int n_clusters = 0;
};

// DBSCAN over 1-D points with |x - y| distances. A point is core when at
// least min_samples points (itself included) lie within eps. Clusters are the
// connected components of core points; a non-core point within eps of a core
// joins the cluster of its nearest core (ties broken toward the smaller core
// value) so the partition does not depend on input order. Cluster ids follow
// first appearance in input order.
ClusterLabeling dbscan(const std::vector<double>& points, const DbscanParams& params);

// anomaly_flag = 1 iff the point is outside the main cluster and not on a
// holiday. Throws when the labeling length does not match the dataset.
SeasonalDataset flag_anomalies(SeasonalDataset dataset, const ClusterLabeling& labeling);

// Replaces each flagged record's consumption with the value one week earlier,
// shifting back by further weeks past sources that are absent, were flagged
// themselves, or fall on a holiday. Source validity is judged against the
// flags as they were on entry, so repaired values never chain. When the
// backward search runs off the dataset, the hour-of-day median of clean
// training-year records is used instead (any year if the training years have
// none). Substituted records get anomaly_flag cleared and substituted set.
SeasonalDataset substitute(SeasonalDataset dataset, int train_cutoff_year = 2018);

struct InjectionSpec {
    double rate = 0.01;          // fraction of records to corrupt
    std::uint64_t seed = 1;
    double weather_share = 0.5;  // fraction placed at the coldest hours
    double magnitude = 6.0;      // scaled-unit offset, random sign per point

    void validate() const;
};

struct InjectionResult {
    SeasonalDataset dataset;
    std::vector<std::size_t> ground_truth;  // corrupted indices, ascending
};

// Corrupts floor(rate * N) records: a weather_share fraction at the
// coldest-temperature hours (ascending temperature), the rest uniformly at
// random among what is left. Holiday records are never chosen — the flagging
// rule exempts them, so an injection there could not be recovered by any
// detector honouring it. Deterministic under the spec seed.
InjectionResult inject_outliers(const SeasonalDataset& dataset, const InjectionSpec& spec);

struct DetectionScore {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    double precision = 0.0;
    double recall = 0.0;
};

DetectionScore score_detection(const std::vector<std::uint8_t>& flags,
                               const std::vector<std::size_t>& ground_truth);

}  // namespace loadcast
