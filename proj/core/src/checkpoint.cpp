#include "loadcast/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace loadcast {

namespace {

constexpr const char* kMagic = "loadcast-checkpoint v1";

std::string hex_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_hex_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::runtime_error("checkpoint: bad value '" + s + "'");
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
    out << kMagic << '\n';
    out << "window " << ckpt.model.window << '\n';
    out << "dropout_rate " << hex_double(ckpt.model.dropout_rate) << '\n';
    out << "relu_head " << (ckpt.model.relu_head ? 1 : 0) << '\n';
    out << "rng_seed " << ckpt.model.rng_seed << '\n';
    out << "layer1 " << ckpt.model.params.layer1.input_size << ' '
        << ckpt.model.params.layer1.hidden_size << '\n';
    out << "layer2 " << ckpt.model.params.layer2.input_size << ' '
        << ckpt.model.params.layer2.hidden_size << '\n';
    out << "meta " << ckpt.meta.size() << '\n';
    for (const auto& [key, value] : ckpt.meta) out << key << ' ' << value << '\n';

    auto blocks = param_blocks(const_cast<LstmParams&>(ckpt.model.params));
    out << "blocks " << blocks.size() << '\n';
    for (const auto& blk : blocks) {
        out << blk.name << ' ' << blk.size << '\n';
        for (std::size_t i = 0; i < blk.size; ++i)
            out << hex_double(blk.data[i]) << (i + 1 == blk.size ? '\n' : ' ');
    }
    out << "end\n";
    if (!out) throw std::runtime_error("error while writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        throw std::runtime_error("'" + path + "' is not a loadcast checkpoint");

    auto expect_key = [&](const std::string& key) -> std::istringstream {
        if (!std::getline(in, line))
            throw std::runtime_error("checkpoint truncated before '" + key + "'");
        std::istringstream ss(line);
        std::string got;
        ss >> got;
        if (got != key)
            throw std::runtime_error("checkpoint: expected '" + key + "', got '" + got + "'");
        return ss;
    };

    Checkpoint ckpt;
    LstmConfig config;
    {
        auto ss = expect_key("window");
        ss >> config.window;
    }
    {
        auto ss = expect_key("dropout_rate");
        std::string v;
        ss >> v;
        config.dropout_rate = parse_hex_double(v);
    }
    {
        auto ss = expect_key("relu_head");
        int v = 0;
        ss >> v;
        config.relu_head = v != 0;
    }
    std::uint64_t seed = 0;
    {
        auto ss = expect_key("rng_seed");
        ss >> seed;
    }
    int l2_input = 0;
    {
        auto ss = expect_key("layer1");
        ss >> config.input_size >> config.hidden1;
    }
    {
        auto ss = expect_key("layer2");
        ss >> l2_input >> config.hidden2;
    }
    if (l2_input != config.hidden1)
        throw std::runtime_error("checkpoint: layer sizes are inconsistent");

    std::size_t n_meta = 0;
    {
        auto ss = expect_key("meta");
        ss >> n_meta;
    }
    for (std::size_t i = 0; i < n_meta; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated meta");
        const auto space = line.find(' ');
        if (space == std::string::npos)
            throw std::runtime_error("checkpoint: bad meta line '" + line + "'");
        ckpt.meta[line.substr(0, space)] = line.substr(space + 1);
    }

    ckpt.model = init_lstm_model(config, seed);
    auto blocks = param_blocks(ckpt.model.params);

    std::size_t n_blocks = 0;
    {
        auto ss = expect_key("blocks");
        ss >> n_blocks;
    }
    if (n_blocks != blocks.size())
        throw std::runtime_error("checkpoint: block count mismatch");
    for (auto& blk : blocks) {
        std::string name;
        std::size_t size = 0;
        if (!(in >> name >> size) || name != blk.name || size != blk.size)
            throw std::runtime_error("checkpoint: unexpected block '" + name +
                                     "' (wanted '" + blk.name + "')");
        std::string value;
        for (std::size_t i = 0; i < blk.size; ++i) {
            if (!(in >> value)) throw std::runtime_error("checkpoint: truncated block values");
            blk.data[i] = parse_hex_double(value);
        }
    }
    std::string tail;
    in >> tail;
    if (tail != "end") throw std::runtime_error("checkpoint: missing end marker");
    return ckpt;
}

}  // namespace loadcast
