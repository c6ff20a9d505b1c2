#pragma once

#include <cstddef>
#include <vector>

#include "nncdf/distribution.hpp"
#include "nncdf/geometry.hpp"

namespace nncdf {

// Simplicial cover of a box: almost-disjoint simplices whose union is the
// box, plus the number of distinct vertices they use.
struct SimplicialPartition {
    std::vector<Simplex> simplices;
    std::size_t vertex_count = 0;
};

// Guaranteed piecewise-constant envelope of a (renormalized, truncated-to-box)
// density: lo[i] <= pdf(x) <= hi[i] for every x in simplices[i].  `source`
// carries the distribution so the pair can be refined later.
struct PdfBoundsPair {
    SimplicialPartition partition;
    std::vector<double> lo, hi;
    InputDistribution source;

    // Total over-approximation mass: sum (hi - lo) * volume.
    double gap_mass() const;
};

// Regular grid of cells_per_axis^dim boxes, each Kuhn-split into dim()!
// simplices.  Throws budget_error when (cells_per_axis+1)^dim distinct grid
// vertices exceed the budget.
SimplicialPartition partition_box(const Box& box, int cells_per_axis,
                                  std::size_t vertex_budget = 50000);

// Per-simplex constant bounds on the distribution's box-truncated density,
// evaluated by monotone per-axis range analysis (Beta / Gaussian factors are
// unimodal) over each simplex's bounding box.  Uniform densities bound
// exactly.  Throws config_error for explicit piecewise-polynomial inputs —
// those bypass bounding entirely.
PdfBoundsPair bound_pdf(const InputDistribution& dist, const SimplicialPartition& part);

// Greedy refinement: repeatedly bisect the simplex with the largest
// (hi - lo) * volume at the midpoint of its longest edge and re-bound the two
// halves, until the next split would exceed the vertex budget.  Bounds are
// nested: lo never decreases and hi never increases at any point.
PdfBoundsPair refine(const PdfBoundsPair& pair, std::size_t vertex_budget);

}  // namespace nncdf
