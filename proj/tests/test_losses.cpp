#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "loadcast/losses.hpp"
#include "loadcast/rng.hpp"

using namespace loadcast;

namespace {

LossSpec spec_of(LossKind kind) {
    LossSpec spec;
    spec.kind = kind;
    return spec;  // defaults: a=5, b=2, eps1=0.005, eps2=0.01
}

// Central finite difference of the loss at e, step h.
double fd_grad(double e, const LossSpec& spec, double h = 1e-6) {
    return (loss_value(e + h, spec) - loss_value(e - h, spec)) / (2.0 * h);
}

// Distance to the nearest branch boundary of any loss.
double boundary_distance(double e, const LossSpec& spec) {
    double d = 1e30;
    for (double b : {-1.0, 0.0, spec.eps1, spec.eps2, 1.0}) d = std::min(d, std::abs(e - b));
    return d;
}

}  // namespace

TEST_CASE("mse values") {
    CHECK(loss_mse(0.0) == 0.0);
    CHECK(loss_mse(-0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(loss_mse(2.0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("al1 piecewise values") {
    const LossSpec spec = spec_of(LossKind::AL1);
    CHECK(loss_al1(0.0, spec) == 0.0);
    CHECK(loss_al1(-0.5, spec) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(loss_al1(-2.0, spec) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(loss_al1(0.5, spec) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(loss_al1(2.0, spec) == doctest::Approx(4.0).epsilon(1e-12));
    // e = -1 lands on the quadratic branch: 5 * 1^2.
    CHECK(loss_al1(-1.0, spec) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("al1 continuity at |e| = 1") {
    const LossSpec spec = spec_of(LossKind::AL1);
    CHECK(std::abs(loss_al1(-1.0 - 1e-9, spec) - loss_al1(-1.0 + 1e-9, spec)) < 1e-6);
    CHECK(std::abs(loss_al1(1.0 - 1e-9, spec) - loss_al1(1.0 + 1e-9, spec)) < 1e-6);
}

TEST_CASE("al2 piecewise values") {
    const LossSpec spec = spec_of(LossKind::AL2);
    CHECK(loss_al2(-0.5, spec) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(loss_al2(0.003, spec) == 0.0);
    CHECK(loss_al2(0.007, spec) == doctest::Approx(9.8e-5).epsilon(1e-12));
    CHECK(loss_al2(0.5, spec) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("al2 dead zone is exactly [0, eps1)") {
    const LossSpec spec = spec_of(LossKind::AL2);
    CHECK(loss_al2(0.0, spec) == 0.0);
    CHECK(loss_al2(0.00499999, spec) == 0.0);
    CHECK(loss_al2(spec.eps1, spec) > 0.0);
    CHECK(loss_al2(-1e-12, spec) > 0.0);
}

TEST_CASE("batch loss is the mean over samples") {
    const LossSpec al1 = spec_of(LossKind::AL1);
    const std::vector<double> errors = {-0.5, 0.5};
    CHECK(batch_loss(errors, al1) == doctest::Approx(1.5).epsilon(1e-12));

    const std::vector<double> zeros = {0.0, 0.0, 0.0};
    CHECK(batch_loss(zeros, spec_of(LossKind::MSE)) == 0.0);
    CHECK(batch_loss(zeros, al1) == 0.0);
    CHECK(batch_loss(zeros, spec_of(LossKind::AL2)) == 0.0);

    const std::vector<double> boundary = {-1.0};
    CHECK(batch_loss(boundary, al1) == doctest::Approx(5.0).epsilon(1e-12));

    CHECK(batch_loss(std::vector<double>{-0.3}, al1) ==
          doctest::Approx(loss_al1(-0.3, al1)).epsilon(1e-12));

    CHECK_THROWS_AS(batch_loss(std::vector<double>{}, al1), std::invalid_argument);
}

TEST_CASE("gradient values at kinks follow the branch that owns the point") {
    const LossSpec al1 = spec_of(LossKind::AL1);
    const LossSpec al2 = spec_of(LossKind::AL2);
    const LossSpec mse = spec_of(LossKind::MSE);
    CHECK(loss_grad(0.3, mse) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(loss_grad(-0.5, al1) == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(loss_grad(-2.0, al1) == doctest::Approx(-20.0).epsilon(1e-12));
    CHECK(loss_grad(0.003, al2) == 0.0);
    // Kink conventions.
    CHECK(loss_grad(0.0, al1) == -5.0);                 // underestimation branch
    CHECK(loss_grad(-1.0, al1) == -10.0);               // quadratic branch owns e = -1
    CHECK(loss_grad(1.0, al1) == 2.0);                  // linear branch owns e = 1
    CHECK(loss_grad(al2.eps2, al2) == 2.0);             // right branch at the jump
    CHECK(loss_grad(0.0, al2) == 0.0);                  // dead zone owns 0
    CHECK(loss_grad(al2.eps1, al2) ==
          doctest::Approx(2.0 * al2.b * al2.eps1).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central differences away from boundaries") {
    Rng rng(2024);
    for (LossKind kind : {LossKind::MSE, LossKind::AL1, LossKind::AL2}) {
        const LossSpec spec = spec_of(kind);
        int tested = 0;
        while (tested < 1000) {
            const double e = rng.uniform(-3.0, 3.0);
            if (boundary_distance(e, spec) <= 1e-4) continue;
            ++tested;
            const double analytic = loss_grad(e, spec);
            const double fd = fd_grad(e, spec);
            const double rel = std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
            CHECK(rel <= 1e-6);
        }
    }
}

TEST_CASE("asymmetry: underestimation always costs at least as much") {
    Rng rng(7);
    const LossSpec al1 = spec_of(LossKind::AL1);
    const LossSpec al2 = spec_of(LossKind::AL2);
    for (int i = 0; i < 500; ++i) {
        const double mag = rng.uniform(1e-6, 3.0);
        CHECK(loss_al1(-mag, al1) >= loss_al1(mag, al1));
        CHECK(loss_al2(-mag, al2) > loss_al2(mag, al2));
    }
}

TEST_CASE("non-negative and zero at zero") {
    Rng rng(99);
    const LossSpec specs[] = {spec_of(LossKind::MSE), spec_of(LossKind::AL1),
                              spec_of(LossKind::AL2)};
    for (const auto& spec : specs) {
        CHECK(loss_value(0.0, spec) == 0.0);
        for (int i = 0; i < 300; ++i) CHECK(loss_value(rng.uniform(-4.0, 4.0), spec) >= 0.0);
    }
}

TEST_CASE("al2 jump at eps2 is kept as defined") {
    const LossSpec spec = spec_of(LossKind::AL2);
    CHECK(loss_al2(spec.eps2 - 1e-9, spec) == doctest::Approx(2e-4).epsilon(1e-3));
    CHECK(loss_al2(spec.eps2, spec) == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("loss spec validation") {
    LossSpec spec;
    CHECK_NOTHROW(spec.validate());
    spec.a = 1.0;  // violates a > b
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = LossSpec{};
    spec.eps1 = 0.02;  // violates eps1 < eps2
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = LossSpec{};
    spec.b = -1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
