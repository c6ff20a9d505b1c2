#include "nncdf/model.hpp"

#include "nncdf/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace nncdf {

// ---------------------------------------------------------------------------
// Box
// ---------------------------------------------------------------------------
double Box::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
    return v;
}

bool Box::contains(const std::vector<double>& x, double tol) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
    return true;
}

void validate_box(const Box& box) {
    if (box.lower.size() != box.upper.size())
        throw config_error("box: lower/upper length mismatch");
    if (box.lower.empty()) throw config_error("box: empty");
    for (std::size_t i = 0; i < box.lower.size(); ++i) {
        if (!std::isfinite(box.lower[i]) || !std::isfinite(box.upper[i]))
            throw config_error("box: non-finite bound at axis " + std::to_string(i));
        if (box.lower[i] > box.upper[i])
            throw config_error("box: lower > upper at axis " + std::to_string(i));
    }
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------
double act_eval(ActivationKind k, double x) {
    switch (k) {
        case ActivationKind::Identity: return x;
        case ActivationKind::ReLU: return x > 0.0 ? x : 0.0;
        case ActivationKind::Tanh: return std::tanh(x);
        case ActivationKind::Logistic: return 1.0 / (1.0 + std::exp(-x));
        case ActivationKind::SquarePos: return x > 0.0 ? x * x : 0.0;
        case ActivationKind::Exp: return std::exp(x);
        case ActivationKind::Log: return std::log(x);
    }
    return 0.0;
}

namespace {
double act_deriv(ActivationKind k, double x) {
    switch (k) {
        case ActivationKind::Identity: return 1.0;
        case ActivationKind::ReLU: return x > 0.0 ? 1.0 : 0.0;
        case ActivationKind::Tanh: {
            double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case ActivationKind::Logistic: {
            double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
        case ActivationKind::SquarePos: return x > 0.0 ? 2.0 * x : 0.0;
        case ActivationKind::Exp: return std::exp(x);
        case ActivationKind::Log: return 1.0 / x;
    }
    return 0.0;
}
} // namespace

double act_deriv_left(ActivationKind k, double x) {
    if (x == 0.0) {
        if (k == ActivationKind::ReLU) return 0.0;
        if (k == ActivationKind::SquarePos) return 0.0;
    }
    return act_deriv(k, x);
}

double act_deriv_right(ActivationKind k, double x) {
    if (x == 0.0) {
        if (k == ActivationKind::ReLU) return 1.0;
        if (k == ActivationKind::SquarePos) return 0.0;
    }
    return act_deriv(k, x);
}

double act_second_deriv(ActivationKind k, double x) {
    switch (k) {
        case ActivationKind::Identity: return 0.0;
        case ActivationKind::ReLU: return 0.0;
        case ActivationKind::Tanh: {
            double t = std::tanh(x);
            return -2.0 * t * (1.0 - t * t);
        }
        case ActivationKind::Logistic: {
            double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s) * (1.0 - 2.0 * s);
        }
        case ActivationKind::SquarePos: return x > 0.0 ? 2.0 : 0.0;
        case ActivationKind::Exp: return std::exp(x);
        case ActivationKind::Log: return -1.0 / (x * x);
    }
    return 0.0;
}

std::vector<double> act_split_points(ActivationKind k) {
    switch (k) {
        case ActivationKind::Tanh:
        case ActivationKind::Logistic:
        case ActivationKind::ReLU:
        case ActivationKind::SquarePos:
            return {0.0};
        default:
            return {};
    }
}

bool act_piecewise_linear(ActivationKind k) {
    return k == ActivationKind::Identity || k == ActivationKind::ReLU;
}

bool act_requires_positive_input(ActivationKind k) {
    return k == ActivationKind::Log;
}

std::string act_tag(ActivationKind k) {
    switch (k) {
        case ActivationKind::Identity: return "identity";
        case ActivationKind::ReLU: return "relu";
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::Logistic: return "logistic";
        case ActivationKind::SquarePos: return "square_pos";
        case ActivationKind::Exp: return "exp";
        case ActivationKind::Log: return "log";
    }
    return "identity";
}

ActivationKind act_from_tag(const std::string& tag) {
    if (tag == "identity") return ActivationKind::Identity;
    if (tag == "relu") return ActivationKind::ReLU;
    if (tag == "tanh") return ActivationKind::Tanh;
    if (tag == "logistic") return ActivationKind::Logistic;
    if (tag == "square_pos") return ActivationKind::SquarePos;
    if (tag == "exp") return ActivationKind::Exp;
    if (tag == "log") return ActivationKind::Log;
    throw config_error("unknown activation tag \"" + tag +
                       "\" (expected identity|relu|tanh|logistic|square_pos|exp|log)");
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------
bool FeedforwardNetwork::relu_identity_only() const {
    for (const auto& l : layers)
        if (l.activation != ActivationKind::ReLU && l.activation != ActivationKind::Identity)
            return false;
    return true;
}

std::vector<double> FeedforwardNetwork::eval(const std::vector<double>& x) const {
    if (x.size() != input_dim())
        throw config_error("eval: input dimension mismatch");
    std::vector<double> cur = x;
    std::vector<double> next;
    for (const auto& layer : layers) {
        next.assign(layer.out_dim(), 0.0);
        for (std::size_t j = 0; j < layer.out_dim(); ++j) {
            double acc = layer.bias[j];
            const auto& row = layer.weights[j];
            for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * cur[k];
            next[j] = act_eval(layer.activation, acc);
        }
        cur.swap(next);
    }
    return cur;
}

void validate_network(const FeedforwardNetwork& net) {
    if (net.layers.empty()) throw config_error("network: needs at least one layer");
    std::size_t prev = net.layers.front().in_dim();
    if (prev == 0) throw config_error("network: layer 0 has no inputs");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        if (layer.weights.empty())
            throw config_error("network: layer " + std::to_string(l) + " has no rows");
        const std::size_t in = layer.weights[0].size();
        if (in == 0) throw config_error("network: layer " + std::to_string(l) + " has empty rows");
        for (const auto& row : layer.weights)
            if (row.size() != in)
                throw config_error("network: layer " + std::to_string(l) + " has ragged weight rows");
        if (layer.bias.size() != layer.weights.size())
            throw config_error("network: layer " + std::to_string(l) + " bias length mismatch");
        if (in != prev)
            throw config_error("network: layer " + std::to_string(l) + " expects " +
                               std::to_string(in) + " inputs but layer " + std::to_string(l - 1) +
                               " produces " + std::to_string(prev));
        for (const auto& row : layer.weights)
            for (double w : row)
                if (!std::isfinite(w))
                    throw config_error("network: layer " + std::to_string(l) + " has non-finite weight");
        for (double b : layer.bias)
            if (!std::isfinite(b))
                throw config_error("network: layer " + std::to_string(l) + " has non-finite bias");
        prev = layer.out_dim();
    }
}

// ---------------------------------------------------------------------------
// JSON I/O
// ---------------------------------------------------------------------------
FeedforwardNetwork parse_network_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("network JSON parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array())
        throw config_error("network JSON: expected object with a \"layers\" array");
    FeedforwardNetwork net;
    for (const auto& jl : j["layers"]) {
        if (!jl.is_object() || !jl.contains("weights") || !jl.contains("bias") ||
            !jl.contains("activation"))
            throw config_error("network JSON: each layer needs weights, bias, activation");
        Layer layer;
        for (const auto& jrow : jl["weights"]) {
            std::vector<double> row;
            for (const auto& v : jrow) {
                if (!v.is_number()) throw config_error("network JSON: weight entries must be numbers");
                row.push_back(v.get<double>());
            }
            layer.weights.push_back(std::move(row));
        }
        for (const auto& v : jl["bias"]) {
            if (!v.is_number()) throw config_error("network JSON: bias entries must be numbers");
            layer.bias.push_back(v.get<double>());
        }
        layer.activation = act_from_tag(jl["activation"].get<std::string>());
        net.layers.push_back(std::move(layer));
    }
    validate_network(net);
    return net;
}

FeedforwardNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open network file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_network_json(ss.str());
}

std::string network_to_json(const FeedforwardNetwork& net) {
    nlohmann::json j;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : net.layers) {
        nlohmann::json jl;
        jl["weights"] = layer.weights;
        jl["bias"] = layer.bias;
        jl["activation"] = act_tag(layer.activation);
        j["layers"].push_back(std::move(jl));
    }
    return j.dump(2);
}

void save_network(const FeedforwardNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write network file: " + path);
    out << network_to_json(net) << "\n";
}

// ---------------------------------------------------------------------------
// Interval bound propagation
// ---------------------------------------------------------------------------
IbpResult propagate_box(const FeedforwardNetwork& net, const Box& box) {
    validate_network(net);
    validate_box(box);
    if (box.dim() != net.input_dim())
        throw config_error("propagate_box: box dimension " + std::to_string(box.dim()) +
                           " != network input dimension " + std::to_string(net.input_dim()));
    IbpResult r;
    std::vector<Interval> cur(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) cur[i] = box.axis(i);

    for (const auto& layer : net.layers) {
        std::vector<Interval> pre(layer.out_dim());
        std::vector<Interval> post(layer.out_dim());
        for (std::size_t j = 0; j < layer.out_dim(); ++j) {
            double lo = layer.bias[j], hi = layer.bias[j];
            const auto& row = layer.weights[j];
            for (std::size_t k = 0; k < row.size(); ++k) {
                double w = row[k];
                if (w >= 0.0) {
                    lo += w * cur[k].lo;
                    hi += w * cur[k].hi;
                } else {
                    lo += w * cur[k].hi;
                    hi += w * cur[k].lo;
                }
            }
            pre[j] = {lo, hi};
            if (act_requires_positive_input(layer.activation) && lo <= 0.0)
                throw config_error("propagate_box: log layer receives non-positive inputs");
            post[j] = {act_eval(layer.activation, lo), act_eval(layer.activation, hi)};
        }
        r.pre.push_back(pre);
        r.post.push_back(std::move(post));
        cur = r.post.back();
    }
    r.output.lower.resize(cur.size());
    r.output.upper.resize(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) {
        r.output.lower[i] = cur[i].lo;
        r.output.upper[i] = cur[i].hi;
    }
    return r;
}

} // namespace nncdf
