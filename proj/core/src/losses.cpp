#include "loadcast/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace loadcast {

const char* to_string(LossKind kind) {
    switch (kind) {
        case LossKind::MSE: return "mse";
        case LossKind::AL1: return "al1";
        case LossKind::AL2: return "al2";
    }
    return "?";
}

LossKind loss_from_string(const std::string& s) {
    if (s == "mse") return LossKind::MSE;
    if (s == "al1") return LossKind::AL1;
    if (s == "al2") return LossKind::AL2;
    throw std::runtime_error("unknown loss '" + s + "' (expected mse|al1|al2)");
}

void LossSpec::validate() const {
    if (!(a > b && b > 0.0))
        throw std::invalid_argument("loss spec requires a > b > 0");
    if (!(eps1 > 0.0 && eps1 < eps2))
        throw std::invalid_argument("loss spec requires 0 < eps1 < eps2");
}

double loss_mse(double e) { return e * e; }

double loss_al1(double e, const LossSpec& spec) {
    if (e <= -1.0) return spec.a * e * e;
    if (e <= 0.0) return spec.a * std::abs(e);
    if (e < 1.0) return spec.b * e * e;
    return spec.b * e;
}

double loss_al2(double e, const LossSpec& spec) {
    if (e < 0.0) return spec.a * std::abs(e);
    if (e < spec.eps1) return 0.0;
    if (e < spec.eps2) return spec.b * e * e;
    return spec.b * e;
}

double loss_value(double e, const LossSpec& spec) {
    switch (spec.kind) {
        case LossKind::MSE: return loss_mse(e);
        case LossKind::AL1: return loss_al1(e, spec);
        case LossKind::AL2: return loss_al2(e, spec);
    }
    return 0.0;
}

double batch_loss(std::span<const double> errors, const LossSpec& spec) {
    if (errors.empty()) throw std::invalid_argument("batch_loss: empty batch");
    double sum = 0.0;
    for (double e : errors) sum += loss_value(e, spec);
    return sum / static_cast<double>(errors.size());
}

double loss_grad(double e, const LossSpec& spec) {
    switch (spec.kind) {
        case LossKind::MSE:
            return 2.0 * e;
        case LossKind::AL1:
            if (e <= -1.0) return 2.0 * spec.a * e;
            if (e <= 0.0) return -spec.a;
            if (e < 1.0) return 2.0 * spec.b * e;
            return spec.b;
        case LossKind::AL2:
            if (e < 0.0) return -spec.a;
            if (e < spec.eps1) return 0.0;
            if (e < spec.eps2) return 2.0 * spec.b * e;
            return spec.b;
    }
    return 0.0;
}

}  // namespace loadcast
