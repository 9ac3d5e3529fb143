#include "loadcast/scaler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loadcast {

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

RobustScalerParams fit_robust_scaler(const MultiSeries& series, int train_cutoff_year) {
    std::vector<double> column;
    column.reserve(series.size());
    RobustScalerParams params;
    for (int f = 0; f < kNumContinuousFeatures; ++f) {
        column.clear();
        for (const auto& rec : series.records) {
            if (year_of(rec.timestamp) <= train_cutoff_year && !std::isnan(rec.feature(f)))
                column.push_back(rec.feature(f));
        }
        if (column.size() < 4)
            throw std::runtime_error(
                std::string("fit_robust_scaler: fewer than 4 training records for feature '") +
                kFeatureNames[f] + "'");
        params.median[f] = quantile(column, 0.5);
        const double iqr = quantile(column, 0.75) - quantile(column, 0.25);
        if (iqr > 0.0) {
            params.iqr[f] = iqr;
        } else {
            params.iqr[f] = 1.0;
            params.degenerate_features.push_back(f);
        }
    }
    return params;
}

MultiSeries apply_scaler(MultiSeries series, const RobustScalerParams& params) {
    for (auto& rec : series.records) {
        for (int f = 0; f < kNumContinuousFeatures; ++f)
            rec.set_feature(f, params.transform(f, rec.feature(f)));
    }
    return series;
}

}  // namespace loadcast
