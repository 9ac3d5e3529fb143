#include "loadcast/lstm.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace loadcast {

namespace {

std::vector<BlockRef> layer_blocks(const std::string& prefix, LstmLayerParams& l) {
    std::vector<BlockRef> blocks;
    const std::pair<const char*, GateWeights*> gates[] = {
        {"gi", &l.gi}, {"gf", &l.gf}, {"gc", &l.gc}, {"go", &l.go}};
    for (const auto& [gate, w] : gates) {
        blocks.push_back({prefix + "." + gate + ".W", w->W.v.data(), w->W.v.size()});
        blocks.push_back({prefix + "." + gate + ".U", w->U.v.data(), w->U.v.size()});
        blocks.push_back({prefix + "." + gate + ".b", w->b.data(), w->b.size()});
    }
    return blocks;
}

}  // namespace

std::vector<BlockRef> param_blocks(LstmParams& p) {
    std::vector<BlockRef> blocks = layer_blocks("layer1", p.layer1);
    auto l2 = layer_blocks("layer2", p.layer2);
    blocks.insert(blocks.end(), l2.begin(), l2.end());
    blocks.push_back({"head.w", p.head.w.data(), p.head.w.size()});
    blocks.push_back({"head.b", &p.head.b, 1});
    return blocks;
}

namespace {

LstmLayerParams make_layer(int input_size, int hidden_size) {
    LstmLayerParams l;
    l.input_size = input_size;
    l.hidden_size = hidden_size;
    for (GateWeights* g : {&l.gi, &l.gf, &l.gc, &l.go}) {
        g->W = Mat(hidden_size, input_size);
        g->U = Mat(hidden_size, hidden_size);
        g->b.assign(static_cast<std::size_t>(hidden_size), 0.0);
    }
    return l;
}

void xavier_fill(Mat& m, int fan_in, int fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& x : m.v) x = rng.uniform(-limit, limit);
}

void init_layer(LstmLayerParams& l, Rng& rng) {
    for (GateWeights* g : {&l.gi, &l.gf, &l.gc, &l.go}) {
        xavier_fill(g->W, l.input_size, l.hidden_size, rng);
        xavier_fill(g->U, l.hidden_size, l.hidden_size, rng);
    }
    // Forget-gate bias at 1 keeps early memory open.
    for (double& b : l.gf.b) b = 1.0;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmParams zeros_like(const LstmParams& p) {
    LstmParams z;
    z.layer1 = make_layer(p.layer1.input_size, p.layer1.hidden_size);
    z.layer2 = make_layer(p.layer2.input_size, p.layer2.hidden_size);
    z.head.w.assign(p.head.w.size(), 0.0);
    z.head.b = 0.0;
    return z;
}

LstmModel init_lstm_model(const LstmConfig& config, std::uint64_t seed) {
    if (config.dropout_rate < 0.0 || config.dropout_rate >= 1.0)
        throw std::invalid_argument("dropout_rate must be in [0, 1)");
    LstmModel model;
    model.window = config.window;
    model.dropout_rate = config.dropout_rate;
    model.relu_head = config.relu_head;
    model.rng_seed = seed;
    model.params.layer1 = make_layer(config.input_size, config.hidden1);
    model.params.layer2 = make_layer(config.hidden1, config.hidden2);
    model.params.head.w.assign(static_cast<std::size_t>(config.hidden2), 0.0);

    Rng rng(seed);
    init_layer(model.params.layer1, rng);
    init_layer(model.params.layer2, rng);
    {
        const double limit = std::sqrt(6.0 / static_cast<double>(config.hidden2 + 1));
        for (double& x : model.params.head.w) x = rng.uniform(-limit, limit);
    }
    return model;
}

namespace {

// One LSTM layer over the whole window. `inputs[t]` is the layer input at
// step t; returns the (pre-dropout) hidden sequence and fills the cache.
std::vector<std::vector<double>> run_layer(const LstmLayerParams& l,
                                           const std::vector<std::vector<double>>& inputs,
                                           LayerCache* cache) {
    const int H = l.hidden_size;
    const int I = l.input_size;
    const std::size_t T = inputs.size();
    std::vector<double> h(static_cast<std::size_t>(H), 0.0);
    std::vector<double> c(static_cast<std::size_t>(H), 0.0);
    std::vector<std::vector<double>> h_seq(T);

    std::vector<double> gi(H), gf(H), gc(H), go(H), tanh_c(H);
    for (std::size_t t = 0; t < T; ++t) {
        const std::vector<double>& x = inputs[t];
        if (static_cast<int>(x.size()) != I)
            throw std::runtime_error("lstm_forward: input size " + std::to_string(x.size()) +
                                     " does not match layer input size " + std::to_string(I));
        for (int u = 0; u < H; ++u) {
            double zi = l.gi.b[u], zf = l.gf.b[u], zc = l.gc.b[u], zo = l.go.b[u];
            for (int k = 0; k < I; ++k) {
                const double xk = x[k];
                zi += l.gi.W(u, k) * xk;
                zf += l.gf.W(u, k) * xk;
                zc += l.gc.W(u, k) * xk;
                zo += l.go.W(u, k) * xk;
            }
            for (int k = 0; k < H; ++k) {
                const double hk = h[k];
                zi += l.gi.U(u, k) * hk;
                zf += l.gf.U(u, k) * hk;
                zc += l.gc.U(u, k) * hk;
                zo += l.go.U(u, k) * hk;
            }
            gi[u] = sigmoid(zi);
            gf[u] = sigmoid(zf);
            gc[u] = std::tanh(zc);
            go[u] = sigmoid(zo);
        }
        for (int u = 0; u < H; ++u) {
            c[u] = gf[u] * c[u] + gi[u] * gc[u];
            tanh_c[u] = std::tanh(c[u]);
            h[u] = go[u] * tanh_c[u];
        }
        h_seq[t] = h;
        if (cache) {
            cache->x.push_back(x);
            cache->gi.push_back(gi);
            cache->gf.push_back(gf);
            cache->gc.push_back(gc);
            cache->go.push_back(go);
            cache->c.push_back(c);
            cache->tanh_c.push_back(tanh_c);
            cache->h.push_back(h);
        }
    }
    return h_seq;
}

std::vector<double> draw_mask(std::size_t n, double p, bool train_mode, Rng* rng) {
    std::vector<double> mask(n, 1.0);
    if (!train_mode || p <= 0.0) return mask;
    if (rng == nullptr)
        throw std::runtime_error("lstm_forward: train mode with dropout needs an RNG");
    const double scale = 1.0 / (1.0 - p);
    for (double& m : mask) m = rng->next_double() < p ? 0.0 : scale;
    return mask;
}

// Backward pass over one layer; `upstream[t]` is dLoss/d(pre-dropout h_t).
// Returns dLoss/dx_t and accumulates parameter gradients into `grad`.
std::vector<std::vector<double>> layer_backward(const LstmLayerParams& l,
                                                const LayerCache& cache,
                                                const std::vector<std::vector<double>>& upstream,
                                                LstmLayerParams& grad) {
    const int H = l.hidden_size;
    const int I = l.input_size;
    const auto T = static_cast<std::int64_t>(cache.x.size());
    std::vector<std::vector<double>> dx(static_cast<std::size_t>(T));

    std::vector<double> dh_carry(H, 0.0), dc_carry(H, 0.0);
    std::vector<double> dpre_i(H), dpre_f(H), dpre_c(H), dpre_o(H);
    for (std::int64_t t = T - 1; t >= 0; --t) {
        const auto ti = static_cast<std::size_t>(t);
        const std::vector<double>& gi = cache.gi[ti];
        const std::vector<double>& gf = cache.gf[ti];
        const std::vector<double>& gc = cache.gc[ti];
        const std::vector<double>& go = cache.go[ti];
        const std::vector<double>& tc = cache.tanh_c[ti];
        const std::vector<double>* c_prev = t > 0 ? &cache.c[ti - 1] : nullptr;
        const std::vector<double>* h_prev = t > 0 ? &cache.h[ti - 1] : nullptr;

        for (int u = 0; u < H; ++u) {
            const double dh = upstream[ti][u] + dh_carry[u];
            const double dc = dc_carry[u] + dh * go[u] * (1.0 - tc[u] * tc[u]);
            const double cp = c_prev ? (*c_prev)[u] : 0.0;
            dpre_o[u] = dh * tc[u] * go[u] * (1.0 - go[u]);
            dpre_i[u] = dc * gc[u] * gi[u] * (1.0 - gi[u]);
            dpre_f[u] = dc * cp * gf[u] * (1.0 - gf[u]);
            dpre_c[u] = dc * gi[u] * (1.0 - gc[u] * gc[u]);
            dc_carry[u] = dc * gf[u];
        }

        const std::vector<double>& x = cache.x[ti];
        const std::pair<const GateWeights*, std::vector<double>*> gates[] = {
            {&l.gi, &dpre_i}, {&l.gf, &dpre_f}, {&l.gc, &dpre_c}, {&l.go, &dpre_o}};
        GateWeights* gate_grads[] = {&grad.gi, &grad.gf, &grad.gc, &grad.go};

        std::vector<double>& dxt = dx[ti];
        dxt.assign(static_cast<std::size_t>(I), 0.0);
        std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
        for (int q = 0; q < 4; ++q) {
            const GateWeights& w = *gates[q].first;
            const std::vector<double>& dpre = *gates[q].second;
            GateWeights& gw = *gate_grads[q];
            for (int u = 0; u < H; ++u) {
                const double d = dpre[u];
                if (d == 0.0) continue;
                gw.b[u] += d;
                for (int k = 0; k < I; ++k) {
                    gw.W(u, k) += d * x[k];
                    dxt[k] += w.W(u, k) * d;
                }
                if (h_prev) {
                    for (int k = 0; k < H; ++k) {
                        gw.U(u, k) += d * (*h_prev)[k];
                        dh_carry[k] += w.U(u, k) * d;
                    }
                } else {
                    for (int k = 0; k < H; ++k) dh_carry[k] += w.U(u, k) * d;
                }
            }
        }
    }
    return dx;
}

}  // namespace

double lstm_forward(const LstmModel& model, std::span<const double> window_inputs,
                    bool train_mode, Rng* dropout_rng, ForwardCache* cache) {
    const int I = model.params.layer1.input_size;
    if (window_inputs.size() % static_cast<std::size_t>(I) != 0)
        throw std::runtime_error("lstm_forward: window size " +
                                 std::to_string(window_inputs.size()) +
                                 " is not a multiple of the feature count " +
                                 std::to_string(I));
    const std::size_t T = window_inputs.size() / static_cast<std::size_t>(I);
    if (T == 0) throw std::runtime_error("lstm_forward: empty window");

    std::vector<std::vector<double>> x1(T);
    for (std::size_t t = 0; t < T; ++t)
        x1[t].assign(window_inputs.begin() + static_cast<std::ptrdiff_t>(t * I),
                     window_inputs.begin() + static_cast<std::ptrdiff_t>((t + 1) * I));

    if (cache) {
        *cache = ForwardCache{};
        cache->train_mode = train_mode;
    }
    auto h1 = run_layer(model.params.layer1, x1, cache ? &cache->l1 : nullptr);

    // Layer-1 output sequence, dropped per timestep.
    std::vector<std::vector<double>> x2(T);
    for (std::size_t t = 0; t < T; ++t) {
        auto mask = draw_mask(h1[t].size(), model.dropout_rate, train_mode, dropout_rng);
        x2[t].resize(h1[t].size());
        for (std::size_t u = 0; u < h1[t].size(); ++u) x2[t][u] = h1[t][u] * mask[u];
        if (cache) cache->l1.mask.push_back(std::move(mask));
    }

    auto h2 = run_layer(model.params.layer2, x2, cache ? &cache->l2 : nullptr);

    auto mask2 = draw_mask(h2.back().size(), model.dropout_rate, train_mode, dropout_rng);
    std::vector<double> head_in(h2.back().size());
    for (std::size_t u = 0; u < head_in.size(); ++u) head_in[u] = h2.back()[u] * mask2[u];

    double z = model.params.head.b;
    for (std::size_t u = 0; u < head_in.size(); ++u)
        z += model.params.head.w[u] * head_in[u];
    const double prediction = model.relu_head ? std::max(0.0, z) : z;

    if (cache) {
        cache->l2.mask.assign(cache->l2.x.size(), {});
        cache->l2.mask.back() = std::move(mask2);
        cache->head_in = std::move(head_in);
        cache->head_pre = z;
        cache->prediction = prediction;
    }
    return prediction;
}

void lstm_backward_into(const LstmModel& model, const ForwardCache& cache,
                        double dloss_dprediction, LstmParams& grad) {
    const std::size_t T = cache.l1.x.size();
    if (T == 0 || cache.l2.x.size() != T)
        throw std::runtime_error("lstm_backward: cache does not match model");
    if (cache.head_in.size() != model.params.head.w.size())
        throw std::runtime_error("lstm_backward: cache head size mismatch");

    const int H2 = model.params.layer2.hidden_size;
    const int H1 = model.params.layer1.hidden_size;

    double dpre = dloss_dprediction;
    if (model.relu_head && cache.head_pre <= 0.0) dpre = 0.0;

    grad.head.b += dpre;
    std::vector<double> dhead_in(static_cast<std::size_t>(H2));
    for (int u = 0; u < H2; ++u) {
        grad.head.w[static_cast<std::size_t>(u)] +=
            dpre * cache.head_in[static_cast<std::size_t>(u)];
        dhead_in[static_cast<std::size_t>(u)] =
            dpre * model.params.head.w[static_cast<std::size_t>(u)];
    }

    // Only the final timestep of layer 2 feeds the head.
    std::vector<std::vector<double>> up2(T, std::vector<double>(static_cast<std::size_t>(H2), 0.0));
    const std::vector<double>& mask2 = cache.l2.mask.back();
    for (int u = 0; u < H2; ++u)
        up2[T - 1][static_cast<std::size_t>(u)] =
            dhead_in[static_cast<std::size_t>(u)] * mask2[static_cast<std::size_t>(u)];

    auto dx2 = layer_backward(model.params.layer2, cache.l2, up2, grad.layer2);

    std::vector<std::vector<double>> up1(T, std::vector<double>(static_cast<std::size_t>(H1), 0.0));
    for (std::size_t t = 0; t < T; ++t) {
        const std::vector<double>& mask1 = cache.l1.mask[t];
        for (int u = 0; u < H1; ++u)
            up1[t][static_cast<std::size_t>(u)] =
                dx2[t][static_cast<std::size_t>(u)] * mask1[static_cast<std::size_t>(u)];
    }
    layer_backward(model.params.layer1, cache.l1, up1, grad.layer1);
}

LstmParams lstm_backward(const LstmModel& model, const ForwardCache& cache,
                         double dloss_dprediction) {
    LstmParams grad = zeros_like(model.params);
    lstm_backward_into(model, cache, dloss_dprediction, grad);
    return grad;
}

AdamState init_adam(const LstmParams& params, double learning_rate) {
    AdamState state;
    state.learning_rate = learning_rate;
    state.m = zeros_like(params);
    state.v = zeros_like(params);
    return state;
}

void adam_step(LstmParams& params, const LstmParams& grads, AdamState& state) {
    ++state.step;
    auto p_blocks = param_blocks(params);
    auto g_blocks = param_blocks(const_cast<LstmParams&>(grads));
    auto m_blocks = param_blocks(state.m);
    auto v_blocks = param_blocks(state.v);
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t blk = 0; blk < p_blocks.size(); ++blk) {
        double* p = p_blocks[blk].data;
        const double* g = g_blocks[blk].data;
        double* m = m_blocks[blk].data;
        double* v = v_blocks[blk].data;
        for (std::size_t i = 0; i < p_blocks[blk].size; ++i) {
            if (!std::isfinite(g[i]))
                throw std::runtime_error("adam_step: non-finite gradient in block " +
                                         p_blocks[blk].name);
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

namespace {

void clip_gradients(LstmParams& grads, double max_norm) {
    auto blocks = param_blocks(grads);
    double sq = 0.0;
    for (const auto& blk : blocks)
        sq = std::inner_product(blk.data, blk.data + blk.size, blk.data, sq);
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return;
    const double scale = max_norm / norm;
    for (auto& blk : blocks)
        for (std::size_t i = 0; i < blk.size; ++i) blk.data[i] *= scale;
}

}  // namespace

TrainResult train(LstmModel model, std::span<const WindowedSample> samples,
                  const TrainConfig& config) {
    if (samples.empty()) throw std::runtime_error("train: empty training set");
    if (config.epochs < 1 || config.batch_size < 1)
        throw std::invalid_argument("train: epochs and batch_size must be >= 1");
    config.loss.validate();

    Rng shuffle_rng(config.shuffle_seed);
    Rng dropout_rng(derive_seed(model.rng_seed, 0xd120));
    AdamState adam = init_adam(model.params, config.learning_rate);

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    result.epoch_losses.reserve(static_cast<std::size_t>(config.epochs));

    ForwardCache cache;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(order, shuffle_rng);
        double epoch_loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const auto batch_n = static_cast<double>(end - start);
            LstmParams batch_grad = zeros_like(model.params);
            double batch_loss_sum = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const WindowedSample& sample = samples[order[k]];
                const double pred =
                    lstm_forward(model, sample.inputs, true, &dropout_rng, &cache);
                const double e = pred - sample.target;
                batch_loss_sum += loss_value(e, config.loss);
                const double dpred = loss_grad(e, config.loss) / batch_n;
                lstm_backward_into(model, cache, dpred, batch_grad);
            }
            if (!std::isfinite(batch_loss_sum))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(start / config.batch_size));
            if (config.clip_norm > 0.0) clip_gradients(batch_grad, config.clip_norm);
            adam_step(model.params, batch_grad, adam);
            epoch_loss_sum += batch_loss_sum;
        }
        result.epoch_losses.push_back(epoch_loss_sum / static_cast<double>(samples.size()));
    }
    result.model = std::move(model);
    return result;
}

std::vector<double> predict(const LstmModel& model,
                            std::span<const WindowedSample> samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& sample : samples) out.push_back(lstm_predict_one(model, sample));
    return out;
}

}  // namespace loadcast
