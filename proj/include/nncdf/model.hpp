#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nncdf {

// ---------------------------------------------------------------------------
// Scalar interval [lo, hi].
// ---------------------------------------------------------------------------
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool valid() const { return lo <= hi; }
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

// Axis-aligned compact box: the analysis domain K.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dim() const { return lower.size(); }
    double volume() const;
    bool contains(const std::vector<double>& x, double tol = 0.0) const;
    Interval axis(std::size_t i) const { return {lower[i], upper[i]}; }
};

// Throws config_error unless lower/upper are finite, same length, ordered.
void validate_box(const Box& box);

// ---------------------------------------------------------------------------
// Activations.
//
// Beyond the four user-facing kinds, three internal kinds exist so that the
// gadget subnetworks (square/product/log-softmax) are expressible:
//   SquarePos: t^2 for t >= 0, 0 for t < 0 (monotone, convex on t > 0)
//   Exp, Log: strictly monotone, fixed curvature sign.
// All kinds are monotone nondecreasing; that property is what the piecewise-
// linear bounding machinery relies on.
// ---------------------------------------------------------------------------
enum class ActivationKind {
    Identity,
    ReLU,
    Tanh,
    Logistic,
    SquarePos,
    Exp,
    Log,
};

double act_eval(ActivationKind k, double x);
// One-sided first derivatives (differ only at kink points, e.g. ReLU at 0).
double act_deriv_left(ActivationKind k, double x);
double act_deriv_right(ActivationKind k, double x);
double act_second_deriv(ActivationKind k, double x);
// Points inside which curvature changes sign or a derivative jumps:
// {0} for Tanh/Logistic (inflection) and ReLU/SquarePos (kink); empty else.
std::vector<double> act_split_points(ActivationKind k);
// Identity and ReLU are exactly piecewise linear.
bool act_piecewise_linear(ActivationKind k);
// Log is defined only for positive inputs.
bool act_requires_positive_input(ActivationKind k);
std::string act_tag(ActivationKind k);          // JSON tag, e.g. "relu"
ActivationKind act_from_tag(const std::string&); // throws config_error

// ---------------------------------------------------------------------------
// Feedforward network: x -> sigma_L(W_L ... sigma_1(W_1 x + b_1) ... + b_L).
// One activation kind per layer, applied to every neuron of that layer.
// ---------------------------------------------------------------------------
struct Layer {
    // weights[r] is the r-th row (length = previous layer's width).
    std::vector<std::vector<double>> weights;
    std::vector<double> bias;
    ActivationKind activation = ActivationKind::Identity;

    std::size_t out_dim() const { return weights.size(); }
    std::size_t in_dim() const { return weights.empty() ? 0 : weights[0].size(); }
};

struct FeedforwardNetwork {
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }
    bool relu_identity_only() const;

    // Plain single-point evaluation (reference semantics; kernels.hpp has the
    // batched fast path, bit-identical by construction).
    std::vector<double> eval(const std::vector<double>& x) const;
};

// Throws config_error on ragged rows, chained-dimension mismatch (names the
// offending layer), empty network, or non-finite entries.
void validate_network(const FeedforwardNetwork& net);

FeedforwardNetwork load_network(const std::string& path);
FeedforwardNetwork parse_network_json(const std::string& json_text);
std::string network_to_json(const FeedforwardNetwork& net); // shortest round-trip doubles
void save_network(const FeedforwardNetwork& net, const std::string& path);

// ---------------------------------------------------------------------------
// Interval bound propagation.
// ---------------------------------------------------------------------------
struct IbpResult {
    // pre[l][j] / post[l][j]: pre-/post-activation range superset of neuron j
    // in layer l, valid for every input in the queried box.
    std::vector<std::vector<Interval>> pre;
    std::vector<std::vector<Interval>> post;
    Box output; // post ranges of the last layer, as a box
};

// Sound range propagation: affine rule splits weights by sign; activations
// use the monotone image rule [act(lo), act(hi)].
IbpResult propagate_box(const FeedforwardNetwork& net, const Box& box);

} // namespace nncdf
