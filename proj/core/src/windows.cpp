#include "loadcast/windows.hpp"

#include <stdexcept>

namespace loadcast {

std::vector<WindowedSample> make_windows(const SeasonalDataset& dataset, int width) {
    if (width < 1) throw std::invalid_argument("window width must be >= 1");
    std::vector<WindowedSample> samples;
    const auto w = static_cast<std::size_t>(width);
    const std::size_t n_segments = dataset.segment_starts.size();
    for (std::size_t s = 0; s < n_segments; ++s) {
        const std::size_t begin = dataset.segment_starts[s];
        const std::size_t end =
            s + 1 < n_segments ? dataset.segment_starts[s + 1] : dataset.records.size();
        if (end - begin < w + 1) continue;
        for (std::size_t pos = begin; pos + w < end; ++pos) {
            WindowedSample sample;
            sample.width = width;
            sample.inputs.resize(w * kNumFeatures);
            for (std::size_t row = 0; row < w; ++row) {
                const auto& rec = dataset.records[pos + row];
                for (int f = 0; f < kNumFeatures; ++f)
                    sample.inputs[row * kNumFeatures + f] = rec.feature(f);
            }
            const auto& target_rec = dataset.records[pos + w];
            sample.target = target_rec.consumption;
            sample.target_time = target_rec.timestamp;
            samples.push_back(std::move(sample));
        }
    }
    return samples;
}

TrainTestSplit split_train_test(const std::vector<WindowedSample>& samples,
                                int first_test_year) {
    TrainTestSplit split;
    for (const auto& sample : samples) {
        if (year_of(sample.target_time) >= first_test_year)
            split.test.push_back(sample);
        else
            split.train.push_back(sample);
    }
    if (split.train.empty()) split.warnings.push_back("train set is empty");
    if (split.test.empty()) split.warnings.push_back("test set is empty");
    return split;
}

}  // namespace loadcast
