#include "nncdf/relu_bounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nncdf/errors.hpp"

namespace nncdf {

namespace {

double pl_scale(const PiecewiseLinearScalar& pl) {
    double s = 1.0;
    for (double x : pl.breakpoints) s = std::max(s, std::fabs(x));
    for (std::size_t i = 0; i < pl.slopes.size(); ++i)
        s = std::max(s, std::fabs(pl.slopes[i] * pl.breakpoints[i] + pl.intercepts[i]));
    return s;
}

// Single exact linear piece through the segment endpoints.
PiecewiseLinearScalar line_piece(ActivationKind act, double lo, double hi) {
    const double fl = act_eval(act, lo), fh = act_eval(act, hi);
    const double v = (fh - fl) / (hi - lo);
    PiecewiseLinearScalar pl;
    pl.breakpoints = {lo, hi};
    pl.slopes = {v};
    pl.intercepts = {fl - v * lo};
    return pl;
}

void append_pieces(PiecewiseLinearScalar& dst, const PiecewiseLinearScalar& src) {
    if (dst.breakpoints.empty()) {
        dst = src;
        return;
    }
    // Segments tile the interval, so src starts where dst ends.
    for (std::size_t i = 0; i < src.slopes.size(); ++i) {
        dst.breakpoints.push_back(src.breakpoints[i + 1]);
        dst.slopes.push_back(src.slopes[i]);
        dst.intercepts.push_back(src.intercepts[i]);
    }
}

}  // namespace

double PiecewiseLinearScalar::eval(double tau) const {
    // Piece i covers [x_i, x_{i+1}]; points outside the domain extend the
    // first/last piece.
    std::size_t i = 0;
    while (i + 1 < slopes.size() && tau > breakpoints[i + 1]) ++i;
    return slopes[i] * tau + intercepts[i];
}

std::vector<double> PiecewiseLinearScalar::relu_signs() const {
    std::vector<double> xi(slopes.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < slopes.size(); ++i) {
        const double dv = slopes[i] - prev;
        xi[i] = dv > 0.0 ? 1.0 : (dv < 0.0 ? -1.0 : 0.0);
        prev = slopes[i];
    }
    return xi;
}

void validate_piecewise_linear(const PiecewiseLinearScalar& pl) {
    if (pl.breakpoints.size() < 2 || pl.slopes.size() + 1 != pl.breakpoints.size() ||
        pl.intercepts.size() != pl.slopes.size())
        throw internal_error("piecewise linear: inconsistent sizes");
    const double scale = pl_scale(pl);
    for (std::size_t i = 0; i + 1 < pl.breakpoints.size(); ++i)
        if (!(pl.breakpoints[i] < pl.breakpoints[i + 1]))
            throw internal_error("piecewise linear: breakpoints not increasing");
    for (double v : pl.slopes)
        if (v < 0.0) throw internal_error("piecewise linear: negative slope");
    for (std::size_t i = 0; i + 1 < pl.slopes.size(); ++i) {
        const double x = pl.breakpoints[i + 1];
        const double a = pl.slopes[i] * x + pl.intercepts[i];
        const double b = pl.slopes[i + 1] * x + pl.intercepts[i + 1];
        if (std::fabs(a - b) > 1e-12 * scale)
            throw internal_error("piecewise linear: discontinuity at breakpoint");
    }
}

SegmentPlan plan_segments(ActivationKind act, const Interval& iv, int n_per_region) {
    if (n_per_region < 1) throw config_error("plan_segments: n_per_region must be >= 1");
    if (!(iv.lo < iv.hi)) throw config_error("plan_segments: empty interval");

    std::vector<double> macro{iv.lo};
    for (double s : act_split_points(act))
        if (s > iv.lo && s < iv.hi) macro.push_back(s);
    macro.push_back(iv.hi);
    std::sort(macro.begin(), macro.end());

    SegmentPlan plan;
    plan.breakpoints.push_back(macro.front());
    for (std::size_t k = 0; k + 1 < macro.size(); ++k) {
        const double a = macro[k], b = macro[k + 1];
        const double d2 = act_second_deriv(act, 0.5 * (a + b));
        Curvature tag = Curvature::Linear;
        if (d2 > 1e-12)
            tag = Curvature::Convex;
        else if (d2 < -1e-12)
            tag = Curvature::Concave;
        if (tag == Curvature::Linear) {
            plan.breakpoints.push_back(b);
            plan.tags.push_back(tag);
            continue;
        }
        for (int i = 1; i <= n_per_region; ++i) {
            plan.breakpoints.push_back(a + (b - a) * static_cast<double>(i) /
                                               static_cast<double>(n_per_region));
            plan.tags.push_back(tag);
        }
        plan.breakpoints.back() = b;  // avoid accumulation drift at the join
    }
    return plan;
}

PiecewiseLinearScalar chord_bound(ActivationKind act, const Segment& seg) {
    if (seg.tag == Curvature::Linear) return line_piece(act, seg.lo, seg.hi);
    const double a = seg.lo, b = seg.hi, m = 0.5 * (a + b);
    const double fa = act_eval(act, a), fm = act_eval(act, m), fb = act_eval(act, b);
    const double k1 = (fm - fa) / (m - a);
    const double k2 = (fb - fm) / (b - m);
    PiecewiseLinearScalar pl;
    pl.breakpoints = {a, m, b};
    pl.slopes = {k1, k2};
    pl.intercepts = {fa - k1 * a, fm - k2 * m};
    return pl;
}

PiecewiseLinearScalar tangent_bound(ActivationKind act, const Segment& seg) {
    if (seg.tag == Curvature::Linear) return line_piece(act, seg.lo, seg.hi);
    const double a = seg.lo, b = seg.hi;
    const double fa = act_eval(act, a), fb = act_eval(act, b);
    const double da = act_deriv_right(act, a);
    const double db = act_deriv_left(act, b);
    const double denom = db - da;
    const double scale = std::max({1.0, std::fabs(da), std::fabs(db)});
    if (std::fabs(denom) <= 1e-12 * scale) {
        // Equal endpoint derivatives on a constant-curvature segment mean the
        // segment is linear; the secant is exact.
        return line_piece(act, a, b);
    }
    const double mid = (fa - fb - (da * a - db * b)) / denom;
    if (!(mid > a && mid < b)) return line_piece(act, a, b);
    PiecewiseLinearScalar pl;
    pl.breakpoints = {a, mid, b};
    pl.slopes = {da, db};
    pl.intercepts = {fa - da * a, fb - db * b};
    return pl;
}

std::pair<PiecewiseLinearScalar, PiecewiseLinearScalar> bound_activation(ActivationKind act,
                                                                         const Interval& iv,
                                                                         int n_per_region) {
    const SegmentPlan plan = plan_segments(act, iv, n_per_region);
    PiecewiseLinearScalar upper, lower;
    for (std::size_t k = 0; k < plan.tags.size(); ++k) {
        Segment seg{plan.breakpoints[k], plan.breakpoints[k + 1], plan.tags[k]};
        switch (seg.tag) {
            case Curvature::Linear: {
                const PiecewiseLinearScalar line = line_piece(act, seg.lo, seg.hi);
                append_pieces(upper, line);
                append_pieces(lower, line);
                break;
            }
            case Curvature::Convex:
                append_pieces(upper, chord_bound(act, seg));
                append_pieces(lower, tangent_bound(act, seg));
                break;
            case Curvature::Concave:
                append_pieces(upper, tangent_bound(act, seg));
                append_pieces(lower, chord_bound(act, seg));
                break;
        }
    }
    validate_piecewise_linear(upper);
    validate_piecewise_linear(lower);
    return {std::move(upper), std::move(lower)};
}

FeedforwardNetwork to_relu_form(const PiecewiseLinearScalar& pl) {
    const double x0 = pl.breakpoints.front();
    const double base = x0 * pl.slopes.front() + pl.intercepts.front();
    const std::vector<double> xi = pl.relu_signs();

    Layer hidden;
    hidden.activation = ActivationKind::ReLU;
    Layer out;
    out.activation = ActivationKind::Identity;
    out.weights.push_back({});
    out.bias = {base};

    double prev = 0.0;
    for (std::size_t i = 0; i < pl.slopes.size(); ++i) {
        const double dv = std::fabs(pl.slopes[i] - prev);
        prev = pl.slopes[i];
        if (dv == 0.0) continue;
        hidden.weights.push_back({dv});
        hidden.bias.push_back(-dv * pl.breakpoints[i]);
        out.weights[0].push_back(xi[i]);
    }

    FeedforwardNetwork net;
    if (hidden.bias.empty()) {
        // Constant slope: a single affine layer is exact.
        Layer only;
        only.activation = ActivationKind::Identity;
        only.weights = {{pl.slopes.front()}};
        only.bias = {pl.intercepts.front()};
        net.layers = {std::move(only)};
    } else {
        net.layers = {std::move(hidden), std::move(out)};
    }
    validate_network(net);
    return net;
}

namespace {

// Affine pre-activation rows of one source layer over the doubled
// [upper; lower] state: positive weights read the same-side channel,
// negative weights the opposite side.
struct DualRows {
    std::vector<std::vector<double>> upper, lower;  // n x 2m
    std::vector<double> bias;
};

DualRows dual_rows(const Layer& layer) {
    const int n = layer.out_dim();
    const int m = layer.in_dim();
    DualRows d;
    d.upper.assign(n, std::vector<double>(2 * static_cast<std::size_t>(m), 0.0));
    d.lower.assign(n, std::vector<double>(2 * static_cast<std::size_t>(m), 0.0));
    d.bias = layer.bias;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < m; ++k) {
            const double w = layer.weights[j][k];
            if (w >= 0.0) {
                d.upper[j][k] = w;
                d.lower[j][m + k] = w;
            } else {
                d.upper[j][m + k] = w;
                d.lower[j][k] = w;
            }
        }
    }
    return d;
}

// ReLU-form data of one scalar bound, ready to splice into a wide layer.
struct FragmentPlan {
    std::vector<double> unit_scale;   // |dv| per kept unit
    std::vector<double> unit_shift;   // breakpoint x_{i-1} per kept unit
    std::vector<double> unit_sign;    // xi per kept unit
    double base = 0.0;                // x_0 v_1 + c_1
};

FragmentPlan fragment_plan(const PiecewiseLinearScalar& pl) {
    FragmentPlan f;
    f.base = pl.breakpoints.front() * pl.slopes.front() + pl.intercepts.front();
    double prev = 0.0;
    for (std::size_t i = 0; i < pl.slopes.size(); ++i) {
        const double dv = pl.slopes[i] - prev;
        prev = pl.slopes[i];
        if (dv == 0.0) continue;
        f.unit_scale.push_back(std::fabs(dv));
        f.unit_shift.push_back(pl.breakpoints[i]);
        f.unit_sign.push_back(dv > 0.0 ? 1.0 : -1.0);
    }
    return f;
}

Interval widen_if_degenerate(ActivationKind act, Interval iv) {
    if (iv.hi - iv.lo >= 1e-12) return iv;
    const double mid = 0.5 * (iv.lo + iv.hi);
    const double h = std::max(1e-9, 1e-9 * std::fabs(mid));
    iv.lo = mid - h;
    iv.hi = mid + h;
    if (act_requires_positive_input(act) && iv.lo <= 0.0) iv.lo = 0.5 * mid;
    return iv;
}

}  // namespace

BoundedNetworkPair bound_network(const FeedforwardNetwork& net, const Box& box,
                                 int n_per_region) {
    if (n_per_region < 1) throw config_error("bound_network: n_per_region must be >= 1");
    validate_network(net);
    validate_box(box);
    if (net.input_dim() != static_cast<std::size_t>(box.dim()))
        throw config_error("bound_network: box dimension != network input dimension");

    BoundedNetworkPair pair;
    pair.source = net;
    pair.segments_per_region = n_per_region;
    if (net.relu_identity_only()) {
        pair.upper = net;
        pair.lower = net;
        return pair;
    }

    const IbpResult ibp = propagate_box(net, box);

    std::vector<Layer> trunk;
    // Duplicate the input into the [upper; lower] channel pair.
    {
        Layer dup;
        dup.activation = ActivationKind::Identity;
        const int n0 = static_cast<int>(net.input_dim());
        dup.weights.assign(2 * static_cast<std::size_t>(n0),
                           std::vector<double>(static_cast<std::size_t>(n0), 0.0));
        dup.bias.assign(2 * static_cast<std::size_t>(n0), 0.0);
        for (int i = 0; i < n0; ++i) {
            dup.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
            dup.weights[static_cast<std::size_t>(n0 + i)][static_cast<std::size_t>(i)] = 1.0;
        }
        trunk.push_back(std::move(dup));
    }

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        const int n = layer.out_dim();
        DualRows rows = dual_rows(layer);

        if (layer.activation == ActivationKind::Identity ||
            layer.activation == ActivationKind::ReLU) {
            // Exact for monotone piecewise-linear activations: apply the
            // activation to both channels.
            Layer wide;
            wide.activation = layer.activation;
            wide.weights.reserve(2 * static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) wide.weights.push_back(std::move(rows.upper[j]));
            for (int j = 0; j < n; ++j) wide.weights.push_back(std::move(rows.lower[j]));
            wide.bias = rows.bias;
            wide.bias.insert(wide.bias.end(), rows.bias.begin(), rows.bias.end());
            trunk.push_back(std::move(wide));
            continue;
        }

        // Curved activation: one ReLU layer holding every fragment unit of
        // both channels, then an identity layer recombining them.
        Layer units;
        units.activation = ActivationKind::ReLU;
        Layer combine;
        combine.activation = ActivationKind::Identity;
        combine.weights.assign(2 * static_cast<std::size_t>(n), {});
        combine.bias.assign(2 * static_cast<std::size_t>(n), 0.0);

        std::vector<std::vector<double>> combine_rows(2 * static_cast<std::size_t>(n));
        std::size_t unit_count = 0;

        const auto emit_fragment = [&](const FragmentPlan& f,
                                       const std::vector<double>& pre_row, double pre_bias,
                                       std::size_t combine_index) {
            combine.bias[combine_index] = f.base;
            for (std::size_t u = 0; u < f.unit_scale.size(); ++u) {
                std::vector<double> w = pre_row;
                for (double& x : w) x *= f.unit_scale[u];
                units.weights.push_back(std::move(w));
                units.bias.push_back(f.unit_scale[u] * (pre_bias - f.unit_shift[u]));
                combine_rows[combine_index].push_back(f.unit_sign[u]);
                ++unit_count;
            }
        };

        std::vector<std::size_t> unit_start(2 * static_cast<std::size_t>(n) + 1, 0);
        for (int j = 0; j < n; ++j) {
            const Interval iv =
                widen_if_degenerate(layer.activation, ibp.pre[l][static_cast<std::size_t>(j)]);
            const auto [ub, lb] = bound_activation(layer.activation, iv, n_per_region);
            unit_start[static_cast<std::size_t>(j)] = unit_count;
            emit_fragment(fragment_plan(ub), rows.upper[static_cast<std::size_t>(j)],
                          rows.bias[static_cast<std::size_t>(j)], static_cast<std::size_t>(j));
            unit_start[static_cast<std::size_t>(n + j)] = unit_count;
            emit_fragment(fragment_plan(lb), rows.lower[static_cast<std::size_t>(j)],
                          rows.bias[static_cast<std::size_t>(j)], static_cast<std::size_t>(n + j));
        }
        unit_start[2 * static_cast<std::size_t>(n)] = unit_count;

        // Scatter each fragment's output coefficients into full-width rows.
        for (std::size_t r = 0; r < combine_rows.size(); ++r) {
            std::vector<double> row(unit_count, 0.0);
            for (std::size_t u = 0; u < combine_rows[r].size(); ++u)
                row[unit_start[r] + u] = combine_rows[r][u];
            combine.weights[r] = std::move(row);
        }
        trunk.push_back(std::move(units));
        trunk.push_back(std::move(combine));
    }

    const int nl = static_cast<int>(net.output_dim());
    const auto selector = [&](bool upper_side) {
        Layer sel;
        sel.activation = ActivationKind::Identity;
        sel.weights.assign(static_cast<std::size_t>(nl),
                           std::vector<double>(2 * static_cast<std::size_t>(nl), 0.0));
        sel.bias.assign(static_cast<std::size_t>(nl), 0.0);
        for (int j = 0; j < nl; ++j)
            sel.weights[static_cast<std::size_t>(j)]
                       [static_cast<std::size_t>(upper_side ? j : nl + j)] = 1.0;
        FeedforwardNetwork out;
        out.layers = trunk;
        out.layers.push_back(std::move(sel));
        validate_network(out);
        return out;
    };
    pair.upper = selector(true);
    pair.lower = selector(false);
    return pair;
}

GadgetResult gadget(GadgetKind kind, int arity) {
    GadgetResult res;
    const auto relu_layer = [](std::vector<std::vector<double>> w) {
        Layer l;
        l.activation = ActivationKind::ReLU;
        l.bias.assign(w.size(), 0.0);
        l.weights = std::move(w);
        return l;
    };
    const auto identity_layer = [](std::vector<std::vector<double>> w) {
        Layer l;
        l.activation = ActivationKind::Identity;
        l.bias.assign(w.size(), 0.0);
        l.weights = std::move(w);
        return l;
    };
    const auto square_pos_layer = [](std::size_t width) {
        Layer l;
        l.activation = ActivationKind::SquarePos;
        l.bias.assign(width, 0.0);
        l.weights.assign(width, std::vector<double>(width, 0.0));
        for (std::size_t i = 0; i < width; ++i) l.weights[i][i] = 1.0;
        return l;
    };

    switch (kind) {
        case GadgetKind::Abs:
            if (arity != 1) throw config_error("gadget: abs takes one input");
            res.net.layers = {relu_layer({{1.0}, {-1.0}}), identity_layer({{1.0, 1.0}})};
            res.exact = true;
            break;
        case GadgetKind::Max:
            if (arity != 2) throw config_error("gadget: max takes two inputs");
            // max(a, b) = 0.5 (a + b + |a - b|) with a, b carried through
            // ReLU(t) - ReLU(-t).
            res.net.layers = {
                relu_layer({{1.0, -1.0}, {-1.0, 1.0}, {1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0},
                            {0.0, -1.0}}),
                identity_layer({{0.5, 0.5, 0.5, -0.5, 0.5, -0.5}})};
            res.exact = true;
            break;
        case GadgetKind::Square:
            if (arity != 1) throw config_error("gadget: square takes one input");
            // x^2 = (x+)^2 + (x-)^2.
            res.net.layers = {relu_layer({{1.0}, {-1.0}}), square_pos_layer(2),
                              identity_layer({{1.0, 1.0}})};
            break;
        case GadgetKind::Product:
            if (arity != 2) throw config_error("gadget: product takes two inputs");
            // a b = 0.5 ((a+b)^2 - a^2 - b^2), each square via SquarePos pairs.
            res.net.layers = {
                relu_layer({{1.0, 1.0}, {-1.0, -1.0}, {1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0},
                            {0.0, -1.0}}),
                square_pos_layer(6),
                identity_layer({{0.5, 0.5, -0.5, -0.5, -0.5, -0.5}})};
            break;
        case GadgetKind::SoftmaxLog: {
            if (arity < 2) throw config_error("gadget: softmax_log needs arity >= 2");
            const std::size_t k = static_cast<std::size_t>(arity);
            Layer exps;
            exps.activation = ActivationKind::Exp;
            exps.bias.assign(k, 0.0);
            exps.weights.assign(k, std::vector<double>(k, 0.0));
            for (std::size_t i = 0; i < k; ++i) exps.weights[i][i] = 1.0;
            Layer logs;
            logs.activation = ActivationKind::Log;
            logs.bias.assign(2, 0.0);
            logs.weights = {std::vector<double>(k, 1.0), std::vector<double>(k, 0.0)};
            logs.weights[1][0] = 1.0;  // log(exp(x_0)) = x_0
            res.net.layers = {std::move(exps), std::move(logs),
                              identity_layer({{-1.0, 1.0}})};
            break;
        }
    }
    validate_network(res.net);
    return res;
}

}  // namespace nncdf
