#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "nncdf/distribution.hpp"
#include "nncdf/errors.hpp"
#include "nncdf/geometry.hpp"
#include "nncdf/model.hpp"
#include "nncdf/piecewise_pdf.hpp"
#include "oracles.hpp"

using namespace nncdf;

namespace {

FeedforwardNetwork one_layer(std::vector<std::vector<double>> w, std::vector<double> b,
                             ActivationKind act) {
    Layer l;
    l.weights = std::move(w);
    l.bias = std::move(b);
    l.activation = act;
    return FeedforwardNetwork{{l}};
}

}  // namespace

TEST_CASE("activation values and derivatives") {
    CHECK(act_eval(ActivationKind::Identity, 1.5) == 1.5);
    CHECK(act_eval(ActivationKind::ReLU, -2.0) == 0.0);
    CHECK(act_eval(ActivationKind::ReLU, 3.0) == 3.0);
    CHECK(act_eval(ActivationKind::Tanh, 0.0) == 0.0);
    CHECK(act_eval(ActivationKind::Logistic, 0.0) == doctest::Approx(0.5));
    CHECK(act_eval(ActivationKind::SquarePos, 2.0) == 4.0);
    CHECK(act_eval(ActivationKind::SquarePos, -2.0) == 0.0);
    CHECK(act_eval(ActivationKind::Exp, 0.0) == 1.0);
    CHECK(act_eval(ActivationKind::Log, 1.0) == 0.0);

    // One-sided derivatives at the ReLU kink.
    CHECK(act_deriv_left(ActivationKind::ReLU, 0.0) == 0.0);
    CHECK(act_deriv_right(ActivationKind::ReLU, 0.0) == 1.0);

    // tanh' = 1 - tanh^2, logistic' = s(1-s).
    CHECK(act_deriv_left(ActivationKind::Tanh, 0.7) ==
          doctest::Approx(1.0 - std::tanh(0.7) * std::tanh(0.7)));
    const double s = 1.0 / (1.0 + std::exp(-0.3));
    CHECK(act_deriv_right(ActivationKind::Logistic, 0.3) == doctest::Approx(s * (1.0 - s)));

    // Curvature signs: tanh convex left of 0, concave right of 0.
    CHECK(act_second_deriv(ActivationKind::Tanh, -1.0) > 0.0);
    CHECK(act_second_deriv(ActivationKind::Tanh, 1.0) < 0.0);
    CHECK(act_second_deriv(ActivationKind::Logistic, 1.0) < 0.0);
    CHECK(act_second_deriv(ActivationKind::Exp, 0.5) > 0.0);
    CHECK(act_second_deriv(ActivationKind::Log, 0.5) < 0.0);

    CHECK(act_split_points(ActivationKind::Tanh) == std::vector<double>{0.0});
    CHECK(act_split_points(ActivationKind::ReLU) == std::vector<double>{0.0});
    CHECK(act_split_points(ActivationKind::Identity).empty());
    CHECK(act_split_points(ActivationKind::Exp).empty());

    CHECK(act_piecewise_linear(ActivationKind::ReLU));
    CHECK(act_piecewise_linear(ActivationKind::Identity));
    CHECK_FALSE(act_piecewise_linear(ActivationKind::Tanh));
    CHECK(act_requires_positive_input(ActivationKind::Log));

    CHECK(act_from_tag("relu") == ActivationKind::ReLU);
    CHECK(act_tag(ActivationKind::Logistic) == "logistic");
    CHECK_THROWS_AS((void)act_from_tag("swish"), config_error);
}

TEST_CASE("network JSON parsing and identity case") {
    const auto net =
        parse_network_json(R"({"layers":[{"weights":[[1]],"bias":[0],"activation":"identity"}]})");
    CHECK(net.input_dim() == 1);
    CHECK(net.output_dim() == 1);
    CHECK(net.eval({0.7})[0] == 0.7);
    CHECK(net.relu_identity_only());
}

TEST_CASE("network JSON dimension mismatch names the offending layer") {
    const std::string bad = R"({"layers":[
        {"weights":[[1,2],[3,4],[5,6]],"bias":[0,0,0],"activation":"relu"},
        {"weights":[[1,2,3,4]],"bias":[0],"activation":"identity"}]})";
    CHECK_THROWS_WITH_AS((void)parse_network_json(bad),
                         doctest::Contains("layer 1"), config_error);
}

TEST_CASE("network JSON rejects unknown activation and non-finite entries") {
    CHECK_THROWS_AS(
        (void)parse_network_json(
            R"({"layers":[{"weights":[[1]],"bias":[0],"activation":"gelu"}]})"),
        config_error);
    FeedforwardNetwork nan_net =
        one_layer({{std::numeric_limits<double>::quiet_NaN()}}, {0.0},
                  ActivationKind::Identity);
    CHECK_THROWS_AS(validate_network(nan_net), config_error);
    CHECK_THROWS_AS(validate_network(FeedforwardNetwork{}), config_error);
}

TEST_CASE("serialization round-trip is bit-exact") {
    std::mt19937_64 rng(7);
    const auto net = oracle::random_network(
        {2, 16, 16, 1},
        {ActivationKind::ReLU, ActivationKind::ReLU, ActivationKind::Identity}, rng);
    const auto path = std::filesystem::temp_directory_path() / "nncdf_roundtrip.json";
    save_network(net, path.string());
    const auto back = load_network(path.string());
    REQUIRE(back.layers.size() == net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        CHECK(back.layers[l].activation == net.layers[l].activation);
        CHECK(back.layers[l].bias == net.layers[l].bias);
        CHECK(back.layers[l].weights == net.layers[l].weights);
    }
    std::filesystem::remove(path);
}

TEST_CASE("IBP: identity and single ReLU neuron") {
    const auto id = one_layer({{1.0}}, {0.0}, ActivationKind::Identity);
    const auto r1 = propagate_box(id, Box{{0.0}, {1.0}});
    CHECK(r1.output.lower[0] == 0.0);
    CHECK(r1.output.upper[0] == 1.0);

    const auto relu = one_layer({{1.0}}, {-0.5}, ActivationKind::ReLU);
    const auto r2 = propagate_box(relu, Box{{0.0}, {1.0}});
    CHECK(r2.pre[0][0].lo == doctest::Approx(-0.5));
    CHECK(r2.pre[0][0].hi == doctest::Approx(0.5));
    CHECK(r2.post[0][0].lo == 0.0);
    CHECK(r2.post[0][0].hi == doctest::Approx(0.5));
}

TEST_CASE("IBP soundness on a random ReLU net (sampled)") {
    std::mt19937_64 rng(11);
    const auto net = oracle::random_network(
        {2, 8, 8, 1},
        {ActivationKind::ReLU, ActivationKind::ReLU, ActivationKind::Identity}, rng);
    const Box box{{0.0, 0.0}, {1.0, 1.0}};
    const auto ibp = propagate_box(net, box);
    for (int s = 0; s < 10000; ++s) {
        std::vector<double> x{oracle::uniform(rng, 0, 1), oracle::uniform(rng, 0, 1)};
        // Walk the layers manually and compare against the reported intervals.
        std::vector<double> cur = x;
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const Layer& layer = net.layers[l];
            std::vector<double> pre(layer.out_dim(), 0.0);
            for (std::size_t r = 0; r < layer.out_dim(); ++r) {
                double acc = layer.bias[r];
                for (std::size_t c = 0; c < layer.in_dim(); ++c)
                    acc += layer.weights[r][c] * cur[c];
                pre[r] = acc;
                REQUIRE(ibp.pre[l][r].lo <= acc);
                REQUIRE(acc <= ibp.pre[l][r].hi);
            }
            for (std::size_t r = 0; r < layer.out_dim(); ++r) {
                pre[r] = act_eval(layer.activation, pre[r]);
                REQUIRE(ibp.post[l][r].lo <= pre[r]);
                REQUIRE(pre[r] <= ibp.post[l][r].hi);
            }
            cur = std::move(pre);
        }
        REQUIRE(ibp.output.contains(cur));
    }
}

TEST_CASE("IBP monotonicity: shrinking the box never widens intervals") {
    std::mt19937_64 rng(13);
    const auto net = oracle::random_network(
        {2, 6, 1}, {ActivationKind::Tanh, ActivationKind::Identity}, rng);
    const auto wide = propagate_box(net, Box{{-1.0, -1.0}, {1.0, 1.0}});
    const auto narrow = propagate_box(net, Box{{-0.5, -0.3}, {0.4, 0.8}});
    for (std::size_t l = 0; l < wide.pre.size(); ++l)
        for (std::size_t r = 0; r < wide.pre[l].size(); ++r) {
            CHECK(narrow.pre[l][r].lo >= wide.pre[l][r].lo);
            CHECK(narrow.pre[l][r].hi <= wide.pre[l][r].hi);
        }
}

TEST_CASE("Beta-product density is exactly polynomial and normalized") {
    InputDistribution dist;
    dist.kind = InputDistribution::Kind::BetaProduct;
    dist.shapes = {{2, 2}, {3, 2}};
    dist.box = Box{{0.0, 0.0}, {1.0, 1.0}};
    const auto pdf = pdf_as_piecewise_polynomial(dist);
    REQUIRE(pdf.has_value());
    // 72 x y^2 (1-x)(1-y), degree 5.
    for (const auto& [s, p] : pdf->pieces) CHECK(p.degree() == 5);
    double mass = 0.0;
    for (const auto& [s, p] : pdf->pieces) mass += integrate_polynomial_over_simplex(p, s);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    // Density value matches the closed form at a sample point.
    const double x = 0.3, y = 0.6;
    CHECK(density_eval(dist, {x, y}) ==
          doctest::Approx(6.0 * x * (1 - x) * 12.0 * y * y * (1 - y)).epsilon(1e-12));
}

TEST_CASE("uniform pdf is the constant 1/vol on a Kuhn split") {
    InputDistribution dist;
    dist.kind = InputDistribution::Kind::UniformBox;
    dist.box = Box{{0.0, 0.0}, {1.0, 1.0}};
    const auto pdf = pdf_as_piecewise_polynomial(dist);
    REQUIRE(pdf.has_value());
    CHECK(pdf->pieces.size() == 2);
    for (const auto& [s, p] : pdf->pieces) {
        REQUIRE(p.terms.size() == 1);
        CHECK(p.terms[0].second == doctest::Approx(1.0));
    }
}

TEST_CASE("gaussian mixture is not exactly polynomial") {
    InputDistribution dist;
    dist.kind = InputDistribution::Kind::TruncatedGaussianMixture;
    dist.box = Box{{0.0}, {1.0}};
    dist.components = {{1.0, {0.5}, {0.2}}};
    CHECK_FALSE(pdf_as_piecewise_polynomial(dist).has_value());
    CHECK(mass_on_box(dist) < 1.0);
    CHECK(mass_on_box(dist) > 0.97);  // ±2.5 sigma covers most of the mass
}
