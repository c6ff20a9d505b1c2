#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nncdf/geometry.hpp"
#include "nncdf/model.hpp"

namespace nncdf {

// Composed affine map x -> matrix*x + offset valid on one activation cell.
struct AffineMap {
    std::vector<std::vector<double>> matrix;  // out_dim x in_dim
    std::vector<double> offset;               // out_dim

    int out_dim() const { return static_cast<int>(offset.size()); }
    int in_dim() const { return matrix.empty() ? 0 : static_cast<int>(matrix.front().size()); }
    std::vector<double> apply(const std::vector<double>& x) const;
};

// One linear region of a ReLU network: the polytope of inputs sharing an
// activation pattern, the affine map the network computes there, and the
// pattern itself ('1' = active) with one character per ReLU neuron in
// layer-major order.
struct ActivationCell {
    HPolytope polytope;  // analysis-box rows followed by one row per ReLU neuron
    AffineMap map;
    std::string pattern;
};

// Upper bound on the number of activation cells over a box:
// (max ReLU layer width + 1)^(input_dim * number_of_ReLU_layers),
// saturated at the largest representable value.
std::int64_t cell_count_bound(const FeedforwardNetwork& net, const Box& box);

// Enumerates all full-dimensional activation cells of a ReLU/Identity network
// over `box`, layer by layer with infeasible-branch pruning.  Cells are
// returned sorted by pattern string and the run is deterministic.  Throws
// config_error for unsupported activations and budget_error when the number
// of live cells exceeds `max_cells`.
std::vector<ActivationCell> enumerate_cells(const FeedforwardNetwork& net, const Box& box,
                                            std::size_t max_cells = 1000000);

// Debug dump: pattern, halfspace rows, and affine map of every cell.
nlohmann::json cells_to_json(const std::vector<ActivationCell>& cells);

}  // namespace nncdf
