#pragma once

#include <utility>
#include <vector>

#include "nncdf/model.hpp"

namespace nncdf {

enum class Curvature { Convex, Concave, Linear };

// Breakpoints a_1 < ... < a_{m+1} covering a neuron's pre-activation
// interval, with one curvature tag per segment.  Segment boundaries include
// every inflection point and every derivative discontinuity of the
// activation inside the interval.
struct SegmentPlan {
    std::vector<double> breakpoints;
    std::vector<Curvature> tags;
};

struct Segment {
    double lo, hi;
    Curvature tag;
};

// Continuous monotone piecewise-linear scalar function on [x_0, x_n]:
// breakpoints x_0 < ... < x_n with pieces y = slopes[i] * x + intercepts[i]
// on [x_i, x_{i+1}].
struct PiecewiseLinearScalar {
    std::vector<double> breakpoints;
    std::vector<double> slopes;
    std::vector<double> intercepts;

    int piece_count() const { return static_cast<int>(slopes.size()); }
    double domain_lo() const { return breakpoints.front(); }
    double domain_hi() const { return breakpoints.back(); }
    double eval(double tau) const;
    // ReLU-form output coefficients: sign(v_i - v_{i-1}) with v_0 = 0.
    std::vector<double> relu_signs() const;
};

// Checks continuity at interior breakpoints (1e-12 * scale), increasing
// breakpoints, and nonnegative slopes; throws internal_error on violation.
void validate_piecewise_linear(const PiecewiseLinearScalar& pl);

// Source network sandwiched between two ReLU/Identity networks:
// lower(x) <= source(x) <= upper(x) on the analysis box.  Upper and lower
// share every layer except the final output selector, so their activation
// cells coincide.
struct BoundedNetworkPair {
    FeedforwardNetwork upper;
    FeedforwardNetwork lower;
    FeedforwardNetwork source;
    int segments_per_region = 1;
};

// Splits `iv` at the activation's inflection / derivative-discontinuity
// points, tags each macro-area by the sign of the second derivative at its
// midpoint, and subdivides curved macro-areas into n_per_region equal
// subsegments (linear ones stay whole).
SegmentPlan plan_segments(ActivationKind act, const Interval& iv, int n_per_region);

// Secant pair through (lo, f(lo)), (mid, f(mid)), (hi, f(hi)) with
// mid = (lo+hi)/2: an upper bound on convex segments, lower on concave.
PiecewiseLinearScalar chord_bound(ActivationKind act, const Segment& seg);

// Tangent pair at the segment endpoints, meeting where the tangents
// intersect: a lower bound on convex segments, upper on concave.  Falls back
// to the exact secant when the endpoint derivatives coincide (the segment is
// then linear).
PiecewiseLinearScalar tangent_bound(ActivationKind act, const Segment& seg);

// Piecewise-linear upper and lower bounds of the activation on `iv`:
// chord above / tangents below on convex segments, the reverse on concave,
// the exact line on linear ones.  Both bounds are continuous, monotone
// nondecreasing, and equal the activation at every plan breakpoint.
std::pair<PiecewiseLinearScalar, PiecewiseLinearScalar> bound_activation(ActivationKind act,
                                                                         const Interval& iv,
                                                                         int n_per_region);

// One-hidden-layer ReLU network computing
//   f(tau) = x_0 v_1 + c_1 + sum_i sign(v_i - v_{i-1}) ReLU(|v_i - v_{i-1}| (tau - x_{i-1}))
// which equals pl on [x_0, x_n]; one ReLU unit per slope change, the step
// from v_0 = 0 included.  An everywhere-flat pl (all slopes zero) keeps no
// units and degenerates to a single affine layer.
FeedforwardNetwork to_relu_form(const PiecewiseLinearScalar& pl);

// Sign-aware composition of per-neuron activation bounds into full bounding
// networks over `box`.  Hidden state carries an upper and a lower channel
// per source neuron; positive downstream weights read the same-side channel
// and negative weights the opposite side.  All-ReLU/Identity sources pass
// through exactly (upper = lower = source).
BoundedNetworkPair bound_network(const FeedforwardNetwork& net, const Box& box, int n_per_region);

enum class GadgetKind { Abs, Square, Product, Max, SoftmaxLog };

struct GadgetResult {
    FeedforwardNetwork net;
    bool exact = false;  // true when the fragment is already pure ReLU/Identity
};

// Network fragments for non-monotone primitives: abs and max are exact ReLU
// constructions; square, product, and softmax-log contain a monotone
// nonlinear stage (t^2 on t >= 0, exp, log) meant to be bounded by
// bound_network afterwards.  softmax_log emits the first log-softmax
// component over `arity` inputs.
GadgetResult gadget(GadgetKind kind, int arity);

}  // namespace nncdf
