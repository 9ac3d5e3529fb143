#pragma once

#include <array>
#include <vector>

#include "loadcast/series.hpp"

namespace loadcast {

// Per-feature robust scaling parameters for the continuous features.
// x' = (x - median) / iqr. Quartiles use linear interpolation between order
// statistics (the numpy 'linear' convention); a zero IQR is replaced by 1.0
// and the feature index recorded in degenerate_features.
struct RobustScalerParams {
    std::array<double, kNumContinuousFeatures> median{};
    std::array<double, kNumContinuousFeatures> iqr{};
    std::vector<int> degenerate_features;

    double transform(int feature, double x) const { return (x - median[feature]) / iqr[feature]; }
    double invert(int feature, double x) const { return x * iqr[feature] + median[feature]; }
};

// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

// Fits on records with year <= train_cutoff_year only, so later years never
// leak into the statistics. Requires >= 4 such records.
RobustScalerParams fit_robust_scaler(const MultiSeries& series, int train_cutoff_year);

// Scales the four continuous features; calendar flags pass through.
MultiSeries apply_scaler(MultiSeries series, const RobustScalerParams& params);

inline double invert_scaler(double scaled_consumption, const RobustScalerParams& params) {
    return params.invert(kConsumption, scaled_consumption);
}

}  // namespace loadcast
