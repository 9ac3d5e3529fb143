#pragma once

#include <string>
#include <vector>

#include "loadcast/seasons.hpp"

namespace loadcast {

// One sequence-to-one training sample: `width` consecutive hours of all six
// features (row-major, width x kNumFeatures) and the scaled consumption of
// the hour right after the window.
struct WindowedSample {
    std::vector<double> inputs;
    int width = 0;
    double target = 0.0;
    HourStamp target_time = 0;

    double input(int row, int feature) const { return inputs[row * kNumFeatures + feature]; }
};

// Slides a width-w window over every contiguous segment; a segment of N hours
// yields max(0, N - w) samples. Windows never span a segment gap.
std::vector<WindowedSample> make_windows(const SeasonalDataset& dataset, int width);

struct TrainTestSplit {
    std::vector<WindowedSample> train;
    std::vector<WindowedSample> test;
    std::vector<std::string> warnings;
};

// Test iff the target hour falls in first_test_year or later.
TrainTestSplit split_train_test(const std::vector<WindowedSample>& samples,
                                int first_test_year = 2019);

}  // namespace loadcast
