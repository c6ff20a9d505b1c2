#include "nncdf/bounds_engine.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <future>
#include <ostream>
#include <string>

#include "nncdf/errors.hpp"
#include "nncdf/kernels.hpp"
#include "nncdf/parallel.hpp"

namespace nncdf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool layers_equal(const Layer& a, const Layer& b) {
    return a.activation == b.activation && a.bias == b.bias && a.weights == b.weights;
}

bool networks_equal(const FeedforwardNetwork& a, const FeedforwardNetwork& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i)
        if (!layers_equal(a.layers[i], b.layers[i])) return false;
    return true;
}

bool trunks_equal(const FeedforwardNetwork& a, const FeedforwardNetwork& b) {
    if (a.layers.size() != b.layers.size() || a.layers.empty()) return false;
    for (std::size_t i = 0; i + 1 < a.layers.size(); ++i)
        if (!layers_equal(a.layers[i], b.layers[i])) return false;
    return a.layers.back().activation == b.layers.back().activation;
}

// Cells with the affine map restricted to one output row.
std::vector<ActivationCell> project_row(const std::vector<ActivationCell>& cells,
                                        std::size_t row) {
    std::vector<ActivationCell> out = cells;
    for (ActivationCell& c : out) {
        c.map.matrix = {c.map.matrix[row]};
        c.map.offset = {c.map.offset[row]};
    }
    return out;
}

// Piecewise-constant density from per-simplex values.
PiecewisePolynomialPdf constant_pdf(const SimplicialPartition& part,
                                    const std::vector<double>& values, const Box& support) {
    PiecewisePolynomialPdf pdf;
    pdf.support = support;
    pdf.pieces.reserve(part.simplices.size());
    const std::size_t n = support.dim();
    for (std::size_t i = 0; i < part.simplices.size(); ++i)
        pdf.pieces.emplace_back(part.simplices[i], poly_constant(n, values[i]));
    return pdf;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

double CdfBounds::gap_mean() const {
    if (grid.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += upper[i] - lower[i];
    return s / static_cast<double>(grid.size());
}

double CdfBounds::gap_std() const {
    if (grid.empty()) return 0.0;
    const double m = gap_mean();
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = upper[i] - lower[i] - m;
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(grid.size()));
}

double CdfBounds::gap_max() const {
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) m = std::max(m, upper[i] - lower[i]);
    return m;
}

std::vector<double> default_grid(const FeedforwardNetwork& net, const Box& box,
                                 std::size_t count) {
    if (net.output_dim() != 1)
        throw config_error("default_grid: network output is not scalar; select a component");
    if (count < 2) throw config_error("default_grid: need at least 2 grid points");
    const IbpResult ibp = propagate_box(net, box);
    const Interval iv = ibp.output.axis(0);
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) /
                              static_cast<double>(count - 1);
    return grid;
}

FeedforwardNetwork select_component(const FeedforwardNetwork& net, std::size_t component) {
    if (component >= net.output_dim())
        throw config_error("select_component: component " + std::to_string(component) +
                           " out of range for " + std::to_string(net.output_dim()) +
                           " outputs");
    if (net.output_dim() == 1) return net;
    Layer sel;
    sel.activation = ActivationKind::Identity;
    sel.weights.assign(1, std::vector<double>(net.output_dim(), 0.0));
    sel.weights[0][component] = 1.0;
    sel.bias.assign(1, 0.0);
    FeedforwardNetwork out = net;
    out.layers.push_back(std::move(sel));
    return out;
}

CdfBounds cdf_bounds(const FeedforwardNetwork& net, const InputDistribution& dist,
                     const std::vector<double>& grid, int n_per_region,
                     std::size_t vertex_budget, std::size_t max_cells) {
    validate_network(net);
    validate_distribution(dist);
    if (net.input_dim() != dist.dim())
        throw config_error("cdf_bounds: network input dimension != distribution dimension");
    if (net.output_dim() != 1)
        throw config_error("cdf_bounds: network output is not scalar; select a component");
    if (grid.empty()) throw config_error("cdf_bounds: empty grid");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw config_error("cdf_bounds: grid must be sorted ascending");
    for (double y : grid)
        if (!std::isfinite(y)) throw config_error("cdf_bounds: non-finite grid point");

    const auto t0 = Clock::now();
    CdfBounds out;
    out.grid = grid;
    out.segments_per_region = n_per_region;
    out.vertex_budget = vertex_budget;

    // Network sandwich (identity pair when already piecewise linear).
    const BoundedNetworkPair pair = bound_network(net, dist.box, std::max(1, n_per_region));

    // Density sandwich (the density itself when exactly polynomial).
    const std::optional<PiecewisePolynomialPdf> exact_pdf = pdf_as_piecewise_polynomial(dist);
    PiecewisePolynomialPdf phi_hi, phi_lo;
    if (exact_pdf) {
        phi_hi = *exact_pdf;
        phi_lo = *exact_pdf;
        out.pdf_piece_count = exact_pdf->pieces.size();
        out.pdf_gap_mass = 0.0;
    } else {
        PdfBoundsPair pb = bound_pdf(dist, partition_box(dist.box, 1, vertex_budget));
        pb = refine(pb, vertex_budget);
        phi_hi = constant_pdf(pb.partition, pb.hi, dist.box);
        phi_lo = constant_pdf(pb.partition, pb.lo, dist.box);
        out.pdf_piece_count = pb.partition.simplices.size();
        out.pdf_gap_mass = pb.gap_mass();
    }
    out.exact = exact_pdf.has_value() && networks_equal(pair.upper, pair.lower);
    out.seconds_bounding = seconds_since(t0);

    // Activation cells.  Upper and lower networks share every layer except
    // the output selector, so one enumeration of a two-output network (row 0
    // = upper output, row 1 = lower output) covers both integrals.
    const auto t1 = Clock::now();
    std::vector<ActivationCell> cells_upper, cells_lower;
    if (networks_equal(pair.upper, pair.lower)) {
        cells_upper = enumerate_cells(pair.upper, dist.box, max_cells);
        cells_lower = cells_upper;
    } else if (trunks_equal(pair.upper, pair.lower)) {
        FeedforwardNetwork combined = pair.upper;
        const Layer& lsel = pair.lower.layers.back();
        combined.layers.back().weights.push_back(lsel.weights[0]);
        combined.layers.back().bias.push_back(lsel.bias[0]);
        const std::vector<ActivationCell> cells =
            enumerate_cells(combined, dist.box, max_cells);
        cells_upper = project_row(cells, 0);
        cells_lower = project_row(cells, 1);
    } else {
        cells_upper = enumerate_cells(pair.upper, dist.box, max_cells);
        cells_lower = enumerate_cells(pair.lower, dist.box, max_cells);
    }
    out.cell_count = cells_upper.size();
    out.seconds_cells = seconds_since(t1);

    // F_upper integrates the upper density over {lower network <= y};
    // F_lower integrates the lower density over {upper network <= y}.  The
    // two curves run concurrently; each is internally parallel with a fixed
    // accumulation order.
    const auto t2 = Clock::now();
    std::vector<QueryPoint> queries(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) queries[i].y = {grid[i]};
    auto upper_future = std::async(std::launch::async, [&] {
        return exact_cdf_curve_raw(cells_lower, phi_hi, queries);
    });
    const std::vector<double> raw_lower = exact_cdf_curve_raw(cells_upper, phi_lo, queries);
    const std::vector<double> raw_upper = upper_future.get();
    out.seconds_integration = seconds_since(t2);

    out.lower.resize(grid.size());
    out.upper.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.upper[i] = std::min(1.0, std::max(0.0, raw_upper[i]));
        out.lower[i] = std::max(0.0, std::min(1.0, raw_lower[i]));
    }
    // Both curves are mathematically nondecreasing; a running max absorbs
    // sub-1e-12 float wiggle and is sound for bounds of either side (an
    // earlier lower bound is still a lower bound at larger y, and raising an
    // upper bound keeps it an upper bound).
    for (std::size_t i = 1; i < grid.size(); ++i) {
        out.upper[i] = std::max(out.upper[i], out.upper[i - 1]);
        out.lower[i] = std::max(out.lower[i], out.lower[i - 1]);
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (out.lower[i] > out.upper[i] + 1e-9)
            throw internal_error("cdf_bounds: lower bound exceeds upper bound at y = " +
                                 format_double(grid[i]));
        out.lower[i] = std::min(out.lower[i], out.upper[i]);
    }
    out.seconds_total = seconds_since(t0);
    return out;
}

double EmpiricalCdf::value(double y) const {
    const auto it = std::upper_bound(samples.begin(), samples.end(), y);
    return static_cast<double>(it - samples.begin()) / static_cast<double>(count);
}

double EmpiricalCdf::dkw_half_width(double alpha) const {
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(count)));
}

EmpiricalCdf mc_cdf(const FeedforwardNetwork& net, const InputDistribution& dist,
                    std::size_t n_samples, const std::vector<double>& grid,
                    std::uint64_t seed) {
    validate_network(net);
    validate_distribution(dist);
    if (net.input_dim() != dist.dim())
        throw config_error("mc_cdf: network input dimension != distribution dimension");
    if (net.output_dim() != 1)
        throw config_error("mc_cdf: network output is not scalar; select a component");
    if (n_samples == 0) throw config_error("mc_cdf: need at least one sample");

    // Draw sequentially (the sample stream defines the result), evaluate in
    // batches through the runtime-selected kernels.
    std::mt19937_64 rng(seed);
    const std::size_t dim = dist.dim();
    EmpiricalCdf emp;
    emp.count = n_samples;
    emp.samples.resize(n_samples);

    const std::size_t chunk = 8192;
    std::vector<double> in(dim * chunk), outbuf(chunk);
    std::size_t done = 0;
    while (done < n_samples) {
        const std::size_t m = std::min(chunk, n_samples - done);
        for (std::size_t s = 0; s < m; ++s) {
            const std::vector<double> x = sample(dist, rng);
            for (std::size_t f = 0; f < dim; ++f) in[f * m + s] = x[f];
        }
        kern::forward_batch(net, in.data(), m, outbuf.data());
        std::copy(outbuf.begin(), outbuf.begin() + static_cast<std::ptrdiff_t>(m),
                  emp.samples.begin() + static_cast<std::ptrdiff_t>(done));
        done += m;
    }
    std::sort(emp.samples.begin(), emp.samples.end());
    emp.grid_values.reserve(grid.size());
    for (double y : grid) emp.grid_values.emplace_back(y, emp.value(y));
    return emp;
}

OobTally oob_tally(const CdfBounds& bounds,
                   const std::vector<std::pair<double, double>>& estimate,
                   double allowance) {
    OobTally tally;
    tally.total = estimate.size();
    for (const auto& [y, p] : estimate) {
        const auto it = std::lower_bound(bounds.grid.begin(), bounds.grid.end(), y);
        if (it == bounds.grid.end() || *it != y)
            throw config_error("oob_tally: estimate point y = " + format_double(y) +
                               " is not a grid point of the bounds");
        const std::size_t i = static_cast<std::size_t>(it - bounds.grid.begin());
        if (p < bounds.lower[i] - allowance - 1e-12) ++tally.below;
        if (p > bounds.upper[i] + allowance + 1e-12) ++tally.above;
    }
    return tally;
}

void write_bounds_csv(std::ostream& os, const CdfBounds& bounds, const EmpiricalCdf* mc) {
    if (mc && mc->grid_values.size() != bounds.grid.size())
        throw config_error("write_bounds_csv: mc grid size != bounds grid size");
    os << (mc ? "y,lower,upper,mc\n" : "y,lower,upper\n");
    for (std::size_t i = 0; i < bounds.grid.size(); ++i) {
        os << format_double(bounds.grid[i]) << ',' << format_double(bounds.lower[i]) << ','
           << format_double(bounds.upper[i]);
        if (mc) os << ',' << format_double(mc->grid_values[i].second);
        os << '\n';
    }
}

nlohmann::json bounds_metadata(const CdfBounds& bounds, const OobTally* oob) {
    char ul[64];
    std::snprintf(ul, sizeof(ul), "%.4f (%.4f)", bounds.gap_mean(), bounds.gap_std());
    nlohmann::json j{
        {"grid_size", bounds.grid.size()},
        {"exact", bounds.exact},
        {"segments_per_region", bounds.segments_per_region},
        {"vertex_budget", bounds.vertex_budget},
        {"cell_count", bounds.cell_count},
        {"pdf_piece_count", bounds.pdf_piece_count},
        {"pdf_gap_mass", bounds.pdf_gap_mass},
        {"gap_mean", bounds.gap_mean()},
        {"gap_std", bounds.gap_std()},
        {"gap_max", bounds.gap_max()},
        {"u_l_dist", ul},
        {"seconds",
         {{"bounding", bounds.seconds_bounding},
          {"cells", bounds.seconds_cells},
          {"integration", bounds.seconds_integration},
          {"total", bounds.seconds_total}}},
    };
    if (oob) {
        j["oob"] = {{"below", oob->below}, {"above", oob->above}, {"total", oob->total}};
    }
    return j;
}

}  // namespace nncdf
