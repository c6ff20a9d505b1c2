#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nncdf/distribution.hpp"
#include "nncdf/exact_cdf.hpp"
#include "nncdf/pdf_bounds.hpp"
#include "nncdf/relu_bounding.hpp"

namespace nncdf {

// Guaranteed cdf bounds on a sorted grid: lower[i] <= F(grid[i]) <= upper[i],
// both curves in [0, 1] and nondecreasing.  The curves are *bounds*, not
// cdfs themselves: the lower one need not reach 1 on the right and the upper
// one need not reach 0 on the left.
struct CdfBounds {
    std::vector<double> grid;
    std::vector<double> lower;
    std::vector<double> upper;

    // Provenance / cost metadata.
    bool exact = false;  // all-ReLU net + exactly polynomial pdf: lower == upper
    int segments_per_region = 0;
    std::size_t vertex_budget = 0;
    std::size_t cell_count = 0;      // activation cells integrated per side
    std::size_t pdf_piece_count = 0; // simplices of the pdf partition
    double pdf_gap_mass = 0.0;       // integral of (phi_hi - phi_lo)
    double seconds_bounding = 0.0;   // network + pdf bounding construction
    double seconds_cells = 0.0;      // activation-cell enumeration
    double seconds_integration = 0.0;
    double seconds_total = 0.0;

    double gap_mean() const;
    double gap_std() const;
    double gap_max() const;
};

// `count` uniformly spaced thresholds across the interval-propagated output
// range of the network over `box` (a superset of the true output range, so
// the bounds reach 0 and 1 near the grid ends). Requires a scalar output.
std::vector<double> default_grid(const FeedforwardNetwork& net, const Box& box,
                                 std::size_t count = 1000);

// Network with output restricted to one component (appends an identity
// selector layer; no-op pass-through when the network is already scalar and
// component == 0).
FeedforwardNetwork select_component(const FeedforwardNetwork& net, std::size_t component);

// Guaranteed cdf bounds of the scalar network output over the distribution's
// box.  The network is sandwiched between ReLU bounding networks (skipped
// when it is already ReLU/identity: both bounds then use the network itself)
// and the density between piecewise-constant bounds on a refined simplicial
// partition (skipped when the density is exactly polynomial: both sides then
// use the density itself).  The upper cdf bound integrates the upper density
// over {lower network <= y}, clamped by min(1, .); the lower bound integrates
// the lower density over {upper network <= y}, clamped by max(0, .).
CdfBounds cdf_bounds(const FeedforwardNetwork& net, const InputDistribution& dist,
                     const std::vector<double>& grid, int n_per_region,
                     std::size_t vertex_budget, std::size_t max_cells = 1000000);

// Empirical cdf of the scalar network output from `count` deterministic
// samples, optionally pre-evaluated on a grid.
struct EmpiricalCdf {
    std::vector<double> samples;  // sorted output values
    std::size_t count = 0;
    std::vector<std::pair<double, double>> grid_values;  // (y, fraction <= y)

    double value(double y) const;  // fraction of samples <= y
    // Dvoretzky–Kiefer–Wolfowitz uniform band half-width sqrt(ln(2/a)/(2n)).
    double dkw_half_width(double alpha) const;
};

EmpiricalCdf mc_cdf(const FeedforwardNetwork& net, const InputDistribution& dist,
                    std::size_t n_samples, const std::vector<double>& grid,
                    std::uint64_t seed);

struct OobTally {
    std::size_t below = 0;
    std::size_t above = 0;
    std::size_t total = 0;
};

// Counts estimate points falling outside [lower - allowance, upper +
// allowance] with 1e-12 slack.  Every estimate y must be a grid point of
// `bounds` (config_error otherwise).
OobTally oob_tally(const CdfBounds& bounds,
                   const std::vector<std::pair<double, double>>& estimate,
                   double allowance = 0.0);

// CSV row set "y,lower,upper[,mc]" (RFC 4180, '.' decimal separator, LF line
// endings, shortest round-trip doubles).
void write_bounds_csv(std::ostream& os, const CdfBounds& bounds,
                      const EmpiricalCdf* mc = nullptr);

// Metadata sidecar: parameters, cost counters, runtimes, gap statistics in
// "mean (std)" form, and the optional out-of-bounds tally.
nlohmann::json bounds_metadata(const CdfBounds& bounds, const OobTally* oob = nullptr);

}  // namespace nncdf
