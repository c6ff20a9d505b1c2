#include <doctest.h>

#include <cmath>
#include <random>

#include "nncdf/errors.hpp"
#include "nncdf/model.hpp"
#include "nncdf/relu_bounding.hpp"
#include "oracles.hpp"

using namespace nncdf;

namespace {

double max_gap_on_grid(const PiecewiseLinearScalar& up, const PiecewiseLinearScalar& lo,
                       const Interval& iv, int samples) {
    double gap = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = iv.lo + iv.width() * i / samples;
        gap = std::max(gap, up.eval(t) - lo.eval(t));
    }
    return gap;
}

}  // namespace

TEST_CASE("plan_segments: tanh splits at 0 into n convex + n concave segments") {
    const auto plan = plan_segments(ActivationKind::Tanh, {-2.0, 2.0}, 5);
    REQUIRE(plan.breakpoints.size() == 11);
    CHECK(plan.breakpoints.front() == -2.0);
    CHECK(plan.breakpoints[5] == 0.0);
    CHECK(plan.breakpoints.back() == 2.0);
    for (int i = 0; i < 5; ++i) CHECK(plan.tags[i] == Curvature::Convex);
    for (int i = 5; i < 10; ++i) CHECK(plan.tags[i] == Curvature::Concave);
}

TEST_CASE("plan_segments: identity is a single linear segment") {
    const auto plan = plan_segments(ActivationKind::Identity, {0.0, 1.0}, 7);
    REQUIRE(plan.breakpoints.size() == 2);
    CHECK(plan.tags[0] == Curvature::Linear);
}

TEST_CASE("plan_segments: logistic right of 0 is concave, no interior split") {
    const auto plan = plan_segments(ActivationKind::Logistic, {1.0, 3.0}, 2);
    REQUIRE(plan.tags.size() == 2);
    CHECK(plan.tags[0] == Curvature::Concave);
    CHECK(plan.tags[1] == Curvature::Concave);
    CHECK(plan.breakpoints[1] == doctest::Approx(2.0));
}

TEST_CASE("plan_segments: ReLU splits at the kink into two linear regions") {
    const auto plan = plan_segments(ActivationKind::ReLU, {-1.0, 1.0}, 4);
    REQUIRE(plan.breakpoints.size() == 3);
    CHECK(plan.breakpoints[1] == 0.0);
    CHECK(plan.tags[0] == Curvature::Linear);
    CHECK(plan.tags[1] == Curvature::Linear);
}

TEST_CASE("chord_bound: x^2 on [0,1] pieces are 0.5x and 1.5x - 0.5") {
    // SquarePos equals x^2 on [0, 1].
    const auto pl = chord_bound(ActivationKind::SquarePos, {0.0, 1.0, Curvature::Convex});
    REQUIRE(pl.piece_count() == 2);
    CHECK(pl.slopes[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pl.intercepts[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(pl.slopes[1] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(pl.intercepts[1] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(pl.eval(0.5) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("tangent_bound: x^2 on [0,1] tangents meet at 0.5") {
    const auto pl = tangent_bound(ActivationKind::SquarePos, {0.0, 1.0, Curvature::Convex});
    REQUIRE(pl.piece_count() == 2);
    CHECK(pl.breakpoints[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pl.slopes[0] == doctest::Approx(0.0));
    CHECK(pl.slopes[1] == doctest::Approx(2.0));
    CHECK(pl.intercepts[1] == doctest::Approx(-1.0));
    CHECK(pl.eval(0.0) == doctest::Approx(0.0));
    CHECK(pl.eval(1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("chord stays above tanh's concave side, tangents below the convex side") {
    const auto chord = chord_bound(ActivationKind::Tanh, {0.0, 1.0, Curvature::Concave});
    for (int i = 0; i <= 200; ++i) {
        const double t = i / 200.0;
        CHECK(chord.eval(t) <= std::tanh(t) + 1e-12);
    }
    const auto tang = tangent_bound(ActivationKind::Tanh, {-1.0, 0.0, Curvature::Convex});
    for (int i = 0; i <= 200; ++i) {
        const double t = -1.0 + i / 200.0;
        CHECK(tang.eval(t) <= std::tanh(t) + 1e-12);
    }
}

TEST_CASE("bound_activation lemma suite on random tanh/logistic intervals") {
    std::mt19937_64 rng(137);
    for (int rep = 0; rep < 50; ++rep) {
        const ActivationKind act =
            rep % 2 == 0 ? ActivationKind::Tanh : ActivationKind::Logistic;
        const double a = oracle::uniform(rng, -3.0, 2.5);
        const Interval iv{a, a + oracle::uniform(rng, 0.2, 2.0)};
        const int n = 1 + static_cast<int>(oracle::uniform(rng, 0.0, 4.0));
        const auto [up, lo] = bound_activation(act, iv, n);
        const double scale = std::max({1.0, std::fabs(iv.lo), std::fabs(iv.hi)});

        // Endpoint interpolation at every plan breakpoint (both bounds).
        const auto plan = plan_segments(act, iv, n);
        for (double bp : plan.breakpoints) {
            CHECK(std::fabs(up.eval(bp) - act_eval(act, bp)) <= 1e-12 * scale);
            CHECK(std::fabs(lo.eval(bp) - act_eval(act, bp)) <= 1e-12 * scale);
        }
        // Sandwich + monotone slopes.
        for (double v : up.slopes) CHECK(v >= 0.0);
        for (double v : lo.slopes) CHECK(v >= 0.0);
        for (int i = 0; i <= 400; ++i) {
            const double t = iv.lo + iv.width() * i / 400.0;
            const double f = act_eval(act, t);
            REQUIRE(up.eval(t) >= f - 1e-12 * scale);
            REQUIRE(lo.eval(t) <= f + 1e-12 * scale);
        }
        // Image preservation: bounds hit the activation exactly at interval ends.
        CHECK(std::fabs(up.eval(iv.lo) - act_eval(act, iv.lo)) <= 1e-12 * scale);
        CHECK(std::fabs(up.eval(iv.hi) - act_eval(act, iv.hi)) <= 1e-12 * scale);
        CHECK(std::fabs(lo.eval(iv.lo) - act_eval(act, iv.lo)) <= 1e-12 * scale);
        CHECK(std::fabs(lo.eval(iv.hi) - act_eval(act, iv.hi)) <= 1e-12 * scale);

        // Dyadic refinement monotonicity at sampled points.
        const auto [up2, lo2] = bound_activation(act, iv, 2 * n);
        for (int i = 0; i <= 100; ++i) {
            const double t = iv.lo + iv.width() * i / 100.0;
            CHECK(up2.eval(t) <= up.eval(t) + 1e-12 * scale);
            CHECK(lo2.eval(t) >= lo.eval(t) - 1e-12 * scale);
        }
    }
}

TEST_CASE("bound gap decays quadratically under segment doubling") {
    // In the quadratic regime the max gap shrinks by ~4x per doubling; the
    // pre-asymptotic first step (n=1 -> 2) can dip to ~3.3, so the ratio is
    // measured from n=4 on.
    for (const ActivationKind act : {ActivationKind::Tanh, ActivationKind::Logistic}) {
        const Interval iv{0.25, 1.75};  // strictly concave region for both
        double prev = -1.0;
        for (int n : {4, 8, 16}) {
            const auto [up, lo] = bound_activation(act, iv, n);
            const double gap = max_gap_on_grid(up, lo, iv, 4000);
            if (prev > 0.0) CHECK(prev / gap >= 3.5);
            prev = gap;
        }
    }
}

TEST_CASE("bound_activation: identity and ReLU pass through exactly") {
    const auto [uid, lid] = bound_activation(ActivationKind::Identity, {0.0, 1.0}, 3);
    CHECK(uid.piece_count() == 1);
    CHECK(uid.slopes[0] == 1.0);
    CHECK(lid.slopes[0] == 1.0);

    const auto [ur, lr] = bound_activation(ActivationKind::ReLU, {-1.0, 1.0}, 4);
    for (int i = 0; i <= 100; ++i) {
        const double t = -1.0 + 2.0 * i / 100.0;
        const double f = t < 0 ? 0.0 : t;
        CHECK(ur.eval(t) == doctest::Approx(f).epsilon(1e-15));
        CHECK(lr.eval(t) == doctest::Approx(f).epsilon(1e-15));
    }
}

TEST_CASE("validate_piecewise_linear rejects negative slopes and jumps") {
    PiecewiseLinearScalar ok;  // concave but monotone: decreasing slopes are fine
    ok.breakpoints = {0.0, 0.5, 1.0};
    ok.slopes = {1.0, 0.5};
    ok.intercepts = {0.0, 0.25};
    CHECK_NOTHROW(validate_piecewise_linear(ok));

    PiecewiseLinearScalar bad;
    bad.breakpoints = {0.0, 0.5, 1.0};
    bad.slopes = {1.0, -0.1};  // not monotone nondecreasing
    bad.intercepts = {0.0, 0.55};
    CHECK_THROWS_AS(validate_piecewise_linear(bad), internal_error);

    PiecewiseLinearScalar jump;
    jump.breakpoints = {0.0, 0.5, 1.0};
    jump.slopes = {1.0, 1.0};
    jump.intercepts = {0.0, 0.3};  // discontinuity at 0.5
    CHECK_THROWS_AS(validate_piecewise_linear(jump), internal_error);

    PiecewiseLinearScalar order;
    order.breakpoints = {0.0, 0.6, 0.5};
    order.slopes = {1.0, 1.0};
    order.intercepts = {0.0, 0.0};
    CHECK_THROWS_AS(validate_piecewise_linear(order), internal_error);
}

TEST_CASE("to_relu_form: single ReLU unit reproduces ReLU") {
    PiecewiseLinearScalar pl;
    pl.breakpoints = {-1.0, 0.0, 1.0};
    pl.slopes = {0.0, 1.0};
    pl.intercepts = {0.0, 0.0};
    const auto net = to_relu_form(pl);
    // One hidden ReLU layer with one unit, one identity output layer.
    REQUIRE(net.layers.size() == 2);
    CHECK(net.layers[0].activation == ActivationKind::ReLU);
    CHECK(net.layers[0].weights.size() == 1);
    for (double t : {-1.0, -0.4, 0.0, 0.3, 1.0})
        CHECK(net.eval({t})[0] == doctest::Approx(t < 0 ? 0.0 : t).epsilon(1e-15));
}

TEST_CASE("to_relu_form: chord of x^2 evaluates via the ReLU form") {
    const auto pl = chord_bound(ActivationKind::SquarePos, {0.0, 1.0, Curvature::Convex});
    const auto net = to_relu_form(pl);
    // Second piece 1.5x - 0.5 at x = 0.75.
    CHECK(net.eval({0.75})[0] == doctest::Approx(0.625).epsilon(1e-13));
    for (int i = 0; i <= 50; ++i) {
        const double t = i / 50.0;
        CHECK(net.eval({t})[0] == doctest::Approx(pl.eval(t)).epsilon(1e-12));
    }
}

TEST_CASE("to_relu_form: 10-piece tanh bound matches piecewise evaluation") {
    const auto [up, lo] = bound_activation(ActivationKind::Tanh, {-2.0, 2.0}, 5);
    for (const auto& pl : {up, lo}) {
        const auto net = to_relu_form(pl);
        for (int i = 0; i <= 1000; ++i) {
            const double t = -2.0 + 4.0 * i / 1000.0;
            REQUIRE(std::fabs(net.eval({t})[0] - pl.eval(t)) <= 1e-12 * 2.0);
        }
    }
}

TEST_CASE("to_relu_form: slope changes map to ReLU units one-for-one") {
    // One piece with nonzero slope: one unit for the slope step from v_0 = 0.
    PiecewiseLinearScalar pl;
    pl.breakpoints = {0.0, 1.0};
    pl.slopes = {2.0};
    pl.intercepts = {0.5};
    const auto net = to_relu_form(pl);
    REQUIRE(net.layers.size() == 2);
    CHECK(net.layers[0].out_dim() == 1);
    CHECK(net.eval({0.3})[0] == doctest::Approx(1.1).epsilon(1e-15));

    // Zero slope everywhere: no units remain, a single affine layer suffices.
    PiecewiseLinearScalar flat;
    flat.breakpoints = {0.0, 1.0};
    flat.slopes = {0.0};
    flat.intercepts = {0.75};
    const auto fnet = to_relu_form(flat);
    CHECK(fnet.layers.size() == 1);
    CHECK(fnet.eval({0.6})[0] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("bound_network: all-ReLU source passes through unchanged") {
    std::mt19937_64 rng(139);
    const auto net = oracle::random_network(
        {2, 5, 1}, {ActivationKind::ReLU, ActivationKind::Identity}, rng);
    const auto pair = bound_network(net, Box{{0.0, 0.0}, {1.0, 1.0}}, 3);
    CHECK(pair.upper.layers.size() == net.layers.size());
    std::mt19937_64 prng(1);
    for (int s = 0; s < 100; ++s) {
        const std::vector<double> x{oracle::uniform(prng, 0, 1), oracle::uniform(prng, 0, 1)};
        CHECK(pair.upper.eval(x)[0] == net.eval(x)[0]);
        CHECK(pair.lower.eval(x)[0] == net.eval(x)[0]);
    }
}

TEST_CASE("bound_network: tanh net sandwich holds and tightens with refinement") {
    std::mt19937_64 rng(149);
    const auto net = oracle::random_network(
        {2, 6, 6, 2}, {ActivationKind::Tanh, ActivationKind::Tanh, ActivationKind::Identity},
        rng);
    const Box box{{-1.0, -1.0}, {1.0, 1.0}};
    const auto p5 = bound_network(net, box, 5);
    const auto p10 = bound_network(net, box, 10);
    CHECK(p5.upper.relu_identity_only());
    CHECK(p5.lower.relu_identity_only());

    std::mt19937_64 prng(2);
    double gap5 = 0.0, gap10 = 0.0;
    for (int s = 0; s < 5000; ++s) {
        const std::vector<double> x{oracle::uniform(prng, -1, 1), oracle::uniform(prng, -1, 1)};
        const auto src = net.eval(x);
        const auto u5 = p5.upper.eval(x), l5 = p5.lower.eval(x);
        const auto u10 = p10.upper.eval(x), l10 = p10.lower.eval(x);
        for (std::size_t j = 0; j < src.size(); ++j) {
            const double slack = 1e-9 * (1.0 + std::fabs(src[j]));
            REQUIRE(u5[j] >= src[j] - slack);
            REQUIRE(l5[j] <= src[j] + slack);
            REQUIRE(u10[j] >= src[j] - slack);
            REQUIRE(l10[j] <= src[j] + slack);
            // Dyadic refinement never widens the sandwich.
            REQUIRE(u10[j] <= u5[j] + slack);
            REQUIRE(l10[j] >= l5[j] - slack);
            gap5 = std::max(gap5, u5[j] - l5[j]);
            gap10 = std::max(gap10, u10[j] - l10[j]);
        }
    }
    CHECK(gap10 < gap5);
}

TEST_CASE("bound_network: negative output weight consumes the opposite-side bound") {
    // y = -tanh(x): the upper bound of y must come from the lower bound of tanh.
    FeedforwardNetwork net;
    net.layers = {Layer{{{1.0}}, {0.0}, ActivationKind::Tanh},
                  Layer{{{-1.0}}, {0.0}, ActivationKind::Identity}};
    const Box box{{-1.5}, {1.5}};
    const auto pair = bound_network(net, box, 2);
    for (int i = 0; i <= 500; ++i) {
        const double x = -1.5 + 3.0 * i / 500.0;
        const double y = -std::tanh(x);
        REQUIRE(pair.upper.eval({x})[0] >= y - 1e-12);
        REQUIRE(pair.lower.eval({x})[0] <= y + 1e-12);
    }
}

TEST_CASE("bound_network: upper and lower share every layer except the selector") {
    std::mt19937_64 rng(151);
    const auto net = oracle::random_network(
        {1, 4, 1}, {ActivationKind::Tanh, ActivationKind::Identity}, rng);
    const auto pair = bound_network(net, Box{{-1.0}, {1.0}}, 3);
    REQUIRE(pair.upper.layers.size() == pair.lower.layers.size());
    for (std::size_t l = 0; l + 1 < pair.upper.layers.size(); ++l) {
        CHECK(pair.upper.layers[l].weights == pair.lower.layers[l].weights);
        CHECK(pair.upper.layers[l].bias == pair.lower.layers[l].bias);
        CHECK(pair.upper.layers[l].activation == pair.lower.layers[l].activation);
    }
    CHECK(pair.upper.layers.back().weights != pair.lower.layers.back().weights);
}

TEST_CASE("gadgets: abs and max are exact ReLU constructions") {
    const auto abs_g = gadget(GadgetKind::Abs, 1);
    CHECK(abs_g.exact);
    CHECK(abs_g.net.relu_identity_only());
    CHECK(abs_g.net.eval({-2.0})[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(abs_g.net.eval({1.3})[0] == doctest::Approx(1.3).epsilon(1e-15));

    const auto max_g = gadget(GadgetKind::Max, 2);
    CHECK(max_g.exact);
    CHECK(max_g.net.relu_identity_only());
    CHECK(max_g.net.eval({0.3, 0.7})[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(max_g.net.eval({-1.0, -3.0})[0] == doctest::Approx(-1.0).epsilon(1e-15));

    std::mt19937_64 rng(157);
    for (int i = 0; i < 1000; ++i) {
        const double a = oracle::uniform(rng, -5, 5), b = oracle::uniform(rng, -5, 5);
        REQUIRE(std::fabs(max_g.net.eval({a, b})[0] - std::max(a, b)) <= 1e-12 * 5);
        REQUIRE(std::fabs(abs_g.net.eval({a})[0] - std::fabs(a)) <= 1e-12 * 5);
    }
}

TEST_CASE("gadgets: square and product are exact before bounding") {
    const auto sq = gadget(GadgetKind::Square, 1);
    CHECK_FALSE(sq.exact);
    CHECK(sq.net.eval({-1.5})[0] == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(sq.net.eval({2.0})[0] == doctest::Approx(4.0).epsilon(1e-15));

    const auto prod = gadget(GadgetKind::Product, 2);
    CHECK_FALSE(prod.exact);
    CHECK(prod.net.eval({1.5, -2.0})[0] == doctest::Approx(-3.0).epsilon(1e-13));
    CHECK(prod.net.eval({0.5, 0.5})[0] == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("gadgets: product bounds contain the true product, gap shrinks") {
    const auto prod = gadget(GadgetKind::Product, 2);
    const Box box{{-1.0, -1.0}, {1.0, 1.0}};
    double prev_gap = -1.0;
    for (int n : {2, 4, 8}) {
        const auto pair = bound_network(prod.net, box, n);
        double gap = 0.0;
        std::mt19937_64 rng(163);
        for (int s = 0; s < 2000; ++s) {
            const std::vector<double> x{oracle::uniform(rng, -1, 1),
                                        oracle::uniform(rng, -1, 1)};
            const double want = x[0] * x[1];
            const double up = pair.upper.eval(x)[0];
            const double lo = pair.lower.eval(x)[0];
            REQUIRE(up >= want - 1e-9);
            REQUIRE(lo <= want + 1e-9);
            gap = std::max(gap, up - lo);
        }
        if (prev_gap > 0.0) CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 0.2);
}

TEST_CASE("gadgets: softmax-log component is a monotone composition") {
    const auto sm = gadget(GadgetKind::SoftmaxLog, 3);
    CHECK_FALSE(sm.exact);
    // log softmax first component: x0 - log(sum exp(xi)).
    const std::vector<double> x{0.2, -0.4, 1.1};
    const double want =
        x[0] - std::log(std::exp(x[0]) + std::exp(x[1]) + std::exp(x[2]));
    CHECK(sm.net.eval(x)[0] == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("gadget arity validation") {
    CHECK_THROWS_AS((void)gadget(GadgetKind::Abs, 2), config_error);
    CHECK_THROWS_AS((void)gadget(GadgetKind::Product, 3), config_error);
    CHECK_THROWS_AS((void)gadget(GadgetKind::SoftmaxLog, 1), config_error);
}
