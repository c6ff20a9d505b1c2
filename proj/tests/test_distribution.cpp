#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nncdf/distribution.hpp"
#include "nncdf/errors.hpp"
#include "nncdf/geometry.hpp"
#include "oracles.hpp"

using namespace nncdf;

namespace {

InputDistribution beta22_32() {
    InputDistribution d;
    d.kind = InputDistribution::Kind::BetaProduct;
    d.shapes = {{2, 2}, {3, 2}};
    d.box = Box{{0.0, 0.0}, {1.0, 1.0}};
    return d;
}

}  // namespace

TEST_CASE("distribution JSON: uniform, beta, mixture, explicit") {
    const auto u = parse_distribution_json(
        R"({"kind":"uniform","box":{"lower":[0,0],"upper":[1,2]}})");
    CHECK(u.kind == InputDistribution::Kind::UniformBox);
    CHECK(density_eval(u, {0.5, 1.0}) == doctest::Approx(0.5));

    const auto b = parse_distribution_json(R"({"kind":"beta_product","shapes":[[2,2],[3,2]]})");
    CHECK(b.kind == InputDistribution::Kind::BetaProduct);
    CHECK(b.box.dim() == 2);

    const auto g = parse_distribution_json(
        R"({"kind":"gaussian_mixture","box":{"lower":[0],"upper":[1]},
            "weights":[1.0],"means":[[0.5]],"covariances":[[[0.04]]]})");
    CHECK(g.kind == InputDistribution::Kind::TruncatedGaussianMixture);
    CHECK(g.components[0].sigma[0] == doctest::Approx(0.2));

    CHECK_THROWS_AS((void)parse_distribution_json(R"({"kind":"dirichlet"})"), config_error);
    CHECK_THROWS_AS((void)parse_distribution_json(
                        R"({"kind":"beta_product","shapes":[[2.5,2]]})"),
                    config_error);
    CHECK_THROWS_AS((void)parse_distribution_json(
                        R"({"kind":"gaussian_mixture","box":{"lower":[0,0],"upper":[1,1]},
                            "weights":[1.0],"means":[[0.5,0.5]],
                            "covariances":[[[0.1,0.05],[0.05,0.1]]]})"),
                    config_error);
}

TEST_CASE("mass_on_box: exact variants integrate to 1") {
    const auto d = beta22_32();
    CHECK(mass_on_box(d) == doctest::Approx(1.0).epsilon(1e-9));
    InputDistribution u;
    u.kind = InputDistribution::Kind::UniformBox;
    u.box = Box{{-2.0}, {3.0}};
    CHECK(mass_on_box(u) == doctest::Approx(1.0));
}

TEST_CASE("beta_axis_density matches the closed form") {
    CHECK(beta_axis_density({2, 2}, 0.3) == doctest::Approx(6.0 * 0.3 * 0.7).epsilon(1e-13));
    CHECK(beta_axis_density({3, 2}, 0.6) ==
          doctest::Approx(12.0 * 0.36 * 0.4).epsilon(1e-13));
    CHECK(beta_axis_density({1, 1}, 0.9) == doctest::Approx(1.0));
}

TEST_CASE("sampling: deterministic for fixed seed, supported on the box") {
    const auto d = beta22_32();
    std::mt19937_64 r1(99), r2(99);
    for (int i = 0; i < 1000; ++i) {
        const auto a = sample(d, r1);
        const auto b = sample(d, r2);
        CHECK(a == b);
        REQUIRE(d.box.contains(a));
    }
}

TEST_CASE("sampling: Beta(2,2) empirical cdf tracks the analytic cdf") {
    InputDistribution d;
    d.kind = InputDistribution::Kind::BetaProduct;
    d.shapes = {{2, 2}};
    d.box = Box{{0.0}, {1.0}};
    std::mt19937_64 rng(123);
    const int n = 200000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = sample(d, rng)[0];
    std::sort(xs.begin(), xs.end());
    // F(x) = 3x^2 - 2x^3 for Beta(2,2); check at a few quantiles within a
    // generous DKW-style band.
    for (double q : {0.2, 0.4, 0.5, 0.7, 0.9}) {
        const double emp =
            static_cast<double>(std::upper_bound(xs.begin(), xs.end(), q) - xs.begin()) / n;
        const double exact = 3 * q * q - 2 * q * q * q;
        CHECK(std::fabs(emp - exact) < 0.005);
    }
}

TEST_CASE("sampling: truncated gaussian stays in the box and is deterministic") {
    InputDistribution g;
    g.kind = InputDistribution::Kind::TruncatedGaussianMixture;
    g.box = Box{{0.0, 0.0}, {1.0, 1.0}};
    g.components = {{0.7, {0.2, 0.2}, {0.3, 0.3}}, {0.3, {0.9, 0.9}, {0.1, 0.2}}};
    std::mt19937_64 r1(5), r2(5);
    for (int i = 0; i < 2000; ++i) {
        const auto a = sample(g, r1);
        CHECK(a == sample(g, r2));
        REQUIRE(g.box.contains(a));
    }
}

TEST_CASE("explicit pdf sampling is unsupported in v1") {
    InputDistribution e;
    e.kind = InputDistribution::Kind::ExplicitPiecewisePolynomial;
    e.box = Box{{0.0}, {1.0}};
    auto pdf = std::make_shared<PiecewisePolynomialPdf>();
    pdf->support = e.box;
    pdf->pieces.emplace_back(Simplex{{{0.0}, {1.0}}}, poly_constant(1, 1.0));
    e.explicit_pdf = pdf;
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS((void)sample(e, rng), config_error);
}

TEST_CASE("validate_distribution rejects bad shapes") {
    InputDistribution d;
    d.kind = InputDistribution::Kind::BetaProduct;
    d.shapes = {{0, 2}};  // alpha must be >= 1
    d.box = Box{{0.0}, {1.0}};
    CHECK_THROWS_AS(validate_distribution(d), config_error);

    InputDistribution g;
    g.kind = InputDistribution::Kind::TruncatedGaussianMixture;
    g.box = Box{{0.0}, {1.0}};
    g.components = {{-0.5, {0.5}, {0.1}}};  // negative weight
    CHECK_THROWS_AS(validate_distribution(g), config_error);
}

TEST_CASE("explicit pdf mass validation") {
    // A density of constant 2 on [0,1] fails the normalized-mass check.
    InputDistribution e;
    e.kind = InputDistribution::Kind::ExplicitPiecewisePolynomial;
    e.box = Box{{0.0}, {1.0}};
    auto pdf = std::make_shared<PiecewisePolynomialPdf>();
    pdf->support = e.box;
    pdf->pieces.emplace_back(Simplex{{{0.0}, {1.0}}}, poly_constant(1, 2.0));
    e.explicit_pdf = pdf;
    CHECK_THROWS_AS(validate_distribution(e), config_error);
}
