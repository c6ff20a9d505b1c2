#pragma once

#include "nncdf/geometry.hpp"

#include <utility>
#include <vector>

namespace nncdf {

// Density that is polynomial on each simplex of a partition of a compact box.
struct PiecewisePolynomialPdf {
    std::vector<std::pair<Simplex, Polynomial>> pieces;
    Box support;

    // Sum of exact piece integrals (1 for normalized densities; bounding
    // densities may be sub- or super-normalized).
    double total_mass() const;
};

// Checks the structural invariants: piece simplex volumes sum to the box
// volume (relative 1e-6), sampled nonnegativity of each local polynomial,
// and (when expect_normalized) total mass within [1 - 1e-6, 1 + 1e-6].
// Throws config_error naming the violated clause.
void validate_piecewise_pdf(const PiecewisePolynomialPdf& pdf, bool expect_normalized);

} // namespace nncdf
