#pragma once

#include "nncdf/model.hpp"
#include "nncdf/piecewise_pdf.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace nncdf {

// Integer-shape Beta(alpha, beta) on [0, 1]: density is exactly polynomial
// and order-statistics sampling is exact. Non-integer shapes are rejected.
struct BetaShape {
    int alpha = 1;
    int beta = 1;
};

// One mixture component with diagonal covariance (v1 restriction; full
// matrices are accepted on input only when off-diagonal entries are zero).
struct GaussianComponent {
    double weight = 1.0;
    std::vector<double> mean;
    std::vector<double> sigma; // per-axis standard deviation
};

struct InputDistribution {
    enum class Kind {
        UniformBox,
        BetaProduct,
        TruncatedGaussianMixture,
        ExplicitPiecewisePolynomial,
    };
    Kind kind = Kind::UniformBox;
    Box box;
    std::vector<BetaShape> shapes;              // BetaProduct
    std::vector<GaussianComponent> components;  // TruncatedGaussianMixture
    std::shared_ptr<const PiecewisePolynomialPdf> explicit_pdf;

    std::size_t dim() const { return box.dim(); }
};

void validate_distribution(const InputDistribution& dist);
InputDistribution load_distribution(const std::string& path);
InputDistribution parse_distribution_json(const std::string& json_text);

// Density value at a point of the box (the *un-renormalized* density for
// truncated mixtures; uniform is 1/vol(box)).
double density_eval(const InputDistribution& dist, const std::vector<double>& x);

// One-dimensional Beta(alpha, beta) density at x in [0, 1].
double beta_axis_density(const BetaShape& shape, double x);

// Mass the density places on the box. 1 for exact variants; mixtures may be
// sub-normalized after truncation — the deficit 1 - mass is reported, never
// silently renormalized.
double mass_on_box(const InputDistribution& dist);

// Exact polynomial representation on a simplicial partition of the box, or
// nullopt when the density is not exactly polynomial (mixtures).
std::optional<PiecewisePolynomialPdf> pdf_as_piecewise_polynomial(
    const InputDistribution& dist);

// One sample, bit-reproducible for a fixed generator state (no reliance on
// implementation-defined std:: distributions). Mixture sampling draws the
// conditional-on-box law by rejection. ExplicitPiecewisePolynomial has no
// sampler in v1 (throws config_error).
std::vector<double> sample(const InputDistribution& dist, std::mt19937_64& rng);

// Uniform double in [0, 1) from the top 53 bits (portable).
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace nncdf
