#pragma once

#include <span>
#include <string>

namespace loadcast {

enum class LossKind { MSE, AL1, AL2 };

const char* to_string(LossKind kind);
LossKind loss_from_string(const std::string& s);

// Loss selection plus its constants. `a` weights underestimation (e < 0),
// `b` overestimation; eps1/eps2 bound AL2's overestimation dead zone and its
// quadratic-to-linear switch.
struct LossSpec {
    LossKind kind = LossKind::MSE;
    double a = 5.0;
    double b = 2.0;
    double eps1 = 0.005;
    double eps2 = 0.01;

    void validate() const;  // a > b > 0 and 0 < eps1 < eps2
};

// Errors are e = predicted - actual, in scaled units.
double loss_mse(double e);

// Reversed-Huber pair: linear under / quadratic over inside |e| < 1, the
// regimes swap outside. Continuous at e = -1 and e = +1.
//   e in (-1, 0?  -> a*|e|      e <= -1 -> a*e^2
//   e in (0, 1)   -> b*e^2      e >= 1  -> b*|e|
double loss_al1(double e, const LossSpec& spec);

// Linear under; dead zone then Huber over:
//   e < 0             -> a*|e|
//   0 <= e < eps1     -> 0
//   eps1 <= e < eps2  -> b*e^2
//   e >= eps2         -> b*|e|
// Note the deliberate jump at e = eps2 (b*eps2^2 vs b*eps2); it is kept
// exactly as defined, not smoothed.
double loss_al2(double e, const LossSpec& spec);

double loss_value(double e, const LossSpec& spec);

// Mean of per-sample losses; dead-zone samples stay in the denominator.
// Throws on an empty batch.
double batch_loss(std::span<const double> errors, const LossSpec& spec);

// dLoss/de. At kinks and jumps the value follows the branch that contains
// the point in the definitions above (AL1 at e = 0 gives -a; AL2 at
// e = eps2 gives b).
double loss_grad(double e, const LossSpec& spec);

}  // namespace loadcast
