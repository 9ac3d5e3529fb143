#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loadcast/losses.hpp"
#include "loadcast/rng.hpp"
#include "loadcast/windows.hpp"

namespace loadcast {

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}
    double& operator()(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

// One gate's weights: W (hidden x input), U (hidden x hidden), bias (hidden).
struct GateWeights {
    Mat W;
    Mat U;
    std::vector<double> b;
};

struct LstmLayerParams {
    int input_size = 0;
    int hidden_size = 0;
    GateWeights gi, gf, gc, go;  // input, forget, cell candidate, output
};

struct DenseParams {
    std::vector<double> w;
    double b = 0.0;
};

struct LstmParams {
    LstmLayerParams layer1;
    LstmLayerParams layer2;
    DenseParams head;
};

// Named view over every parameter tensor; Adam, gradient checks and the
// checkpoint format all iterate the same list.
struct BlockRef {
    std::string name;
    double* data = nullptr;
    std::size_t size = 0;
};
std::vector<BlockRef> param_blocks(LstmParams& p);

LstmParams zeros_like(const LstmParams& p);

struct LstmConfig {
    int input_size = kNumFeatures;
    int hidden1 = 64;
    int hidden2 = 32;
    int window = 4;
    double dropout_rate = 0.2;
    bool relu_head = false;  // head activation is identity unless enabled
};

struct LstmModel {
    LstmParams params;
    int window = 4;
    double dropout_rate = 0.2;
    bool relu_head = false;
    std::uint64_t rng_seed = 0;
};

// Xavier-uniform weights from the seeded generator; forget-gate biases start
// at 1.0, every other bias at 0.
LstmModel init_lstm_model(const LstmConfig& config, std::uint64_t seed);

struct LayerCache {
    std::vector<std::vector<double>> x, gi, gf, gc, go, c, tanh_c, h, mask;
};

struct ForwardCache {
    LayerCache l1, l2;
    std::vector<double> head_in;
    double head_pre = 0.0;
    double prediction = 0.0;
    bool train_mode = false;
};

// Runs the window through both layers and the dense head. Train mode draws
// inverted-dropout masks from `dropout_rng` (layer-1 output per timestep,
// layer-2 final hidden state); eval mode is deterministic and needs no RNG.
// `cache` may be null when only the prediction is wanted.
double lstm_forward(const LstmModel& model, std::span<const double> window_inputs,
                    bool train_mode, Rng* dropout_rng, ForwardCache* cache);

inline double lstm_predict_one(const LstmModel& model, const WindowedSample& sample) {
    return lstm_forward(model, sample.inputs, false, nullptr, nullptr);
}

// Backpropagation through time over the cached forward pass; dropout masks
// are reused from the cache. Returns gradients for every parameter.
LstmParams lstm_backward(const LstmModel& model, const ForwardCache& cache,
                         double dloss_dprediction);

// Same, accumulating into an existing gradient buffer (the hot path during
// batched training).
void lstm_backward_into(const LstmModel& model, const ForwardCache& cache,
                        double dloss_dprediction, LstmParams& grad);

struct AdamState {
    std::size_t step = 0;
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    LstmParams m;
    LstmParams v;
};

AdamState init_adam(const LstmParams& params, double learning_rate = 0.001);

// Bias-corrected Adam update. Throws on a non-finite gradient, naming the
// parameter block.
void adam_step(LstmParams& params, const LstmParams& grads, AdamState& state);

struct TrainConfig {
    int epochs = 100;
    int batch_size = 64;
    std::uint64_t shuffle_seed = 0;
    LossSpec loss;
    double learning_rate = 0.001;
    double clip_norm = 0.0;  // 0 disables gradient clipping
};

struct TrainResult {
    LstmModel model;
    std::vector<double> epoch_losses;  // one entry per epoch
};

// Shuffled mini-batch training: per sample e = prediction - target, batch
// loss is the mean per-sample loss, gradients are loss_grad(e)/batch_size
// through BPTT, one Adam step per batch. Deterministic given the model seed
// and shuffle seed. Throws on a non-finite loss, naming epoch and batch.
TrainResult train(LstmModel model, std::span<const WindowedSample> samples,
                  const TrainConfig& config);

std::vector<double> predict(const LstmModel& model,
                            std::span<const WindowedSample> samples);

}  // namespace loadcast
