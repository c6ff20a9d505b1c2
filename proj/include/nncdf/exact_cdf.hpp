#pragma once

#include <utility>
#include <vector>

#include "nncdf/piecewise_pdf.hpp"
#include "nncdf/regions.hpp"

namespace nncdf {

// Evaluation point for the output cdf; one coordinate per network output.
struct QueryPoint {
    std::vector<double> y;
};

// Exact cdf of the network output at `q` under the piecewise-polynomial input
// pdf: the sum over (cell, pdf piece) of the polynomial mass on the polytope
//   cell ∩ piece ∩ {map(x) <= y coordinatewise},
// clamped to [0, 1].  The cells must come from enumerate_cells over the pdf's
// support box.
double exact_cdf_at(const std::vector<ActivationCell>& cells, const PiecewisePolynomialPdf& pdf,
                    const QueryPoint& q);

// Cdf at every grid point, in grid order.  A one-point grid is bit-identical
// to exact_cdf_at.  Grid points are evaluated in parallel; per-point
// accumulation order is fixed, so results do not depend on the thread count.
std::vector<std::pair<QueryPoint, double>> exact_cdf_curve(
    const std::vector<ActivationCell>& cells, const PiecewisePolynomialPdf& pdf,
    const std::vector<QueryPoint>& grid);

// Same evaluation without the final clamp to [0, 1]; used to monitor
// accumulated floating-point error.
std::vector<double> exact_cdf_curve_raw(const std::vector<ActivationCell>& cells,
                                        const PiecewisePolynomialPdf& pdf,
                                        const std::vector<QueryPoint>& grid);

}  // namespace nncdf
