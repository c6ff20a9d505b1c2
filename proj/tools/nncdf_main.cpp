// nncdf: guaranteed cdf bounds (and exact cdfs for piecewise-linear
// networks) of a feedforward network's output under random inputs supported
// on a compact box.
//
// Exit codes: 0 success, 2 configuration error (bad files, unsupported
// options, violated preconditions), 3 budget exceeded (activation-cell or
// vertex caps), 4 internal invariant violation (must never trigger).

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nncdf/bounds_engine.hpp"
#include "nncdf/distribution.hpp"
#include "nncdf/errors.hpp"
#include "nncdf/exact_cdf.hpp"
#include "nncdf/kernels.hpp"
#include "nncdf/parallel.hpp"
#include "nncdf/regions.hpp"
#include "nncdf/relu_bounding.hpp"

namespace {

using namespace nncdf;

struct CommonOpts {
    std::string net_path;
    std::string dist_path;
    std::size_t component = 0;
    std::size_t grid_count = 1000;
    std::string grid_file;
    int segments = 5;
    std::size_t vertex_budget = 50000;
    std::size_t mc_samples = 0;
    std::uint64_t seed = 12345;
    std::string out_path;
    unsigned threads = 0;  // 0 = all cores
};

void add_io_flags(CLI::App* cmd, CommonOpts& o, bool out_required) {
    cmd->add_option("--net", o.net_path, "Network JSON file")->required();
    cmd->add_option("--dist", o.dist_path, "Input-distribution JSON file")->required();
    cmd->add_option("--component", o.component, "Output component index (default 0)");
    auto* out = cmd->add_option("--out", o.out_path,
                                out_required ? "Output path" : "Output CSV path (default stdout)");
    if (out_required) out->required();
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

void add_grid_flags(CLI::App* cmd, CommonOpts& o) {
    auto* n = cmd->add_option("--grid", o.grid_count,
                              "Uniform grid size across the propagated output range");
    auto* f = cmd->add_option("--grid-file", o.grid_file,
                              "File with one threshold per line (overrides --grid)");
    n->excludes(f);
}

std::vector<double> load_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open grid file: " + path);
    std::vector<double> grid;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        double v = 0.0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
        if (res.ec != std::errc{} || res.ptr != line.data() + line.size())
            throw config_error("grid file: cannot parse line \"" + line + "\"");
        grid.push_back(v);
    }
    if (grid.size() < 2) throw config_error("grid file: need at least 2 thresholds");
    std::sort(grid.begin(), grid.end());
    return grid;
}

struct Loaded {
    FeedforwardNetwork net;  // component-selected, scalar output
    InputDistribution dist;
    std::vector<double> grid;
};

Loaded load_common(const CommonOpts& o) {
    set_thread_count(o.threads);
    Loaded l;
    l.net = select_component(load_network(o.net_path), o.component);
    l.dist = load_distribution(o.dist_path);
    if (l.net.input_dim() != l.dist.dim())
        throw config_error("network input dimension (" + std::to_string(l.net.input_dim()) +
                           ") != distribution dimension (" + std::to_string(l.dist.dim()) + ")");
    l.grid = o.grid_file.empty() ? default_grid(l.net, l.dist.box, o.grid_count)
                                 : load_grid_file(o.grid_file);
    return l;
}

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file: " + path);
    out << text;
}

int cmd_exact_cdf(const CommonOpts& o) {
    const Loaded l = load_common(o);
    if (!l.net.relu_identity_only())
        throw config_error(
            "exact-cdf requires a ReLU/identity network; found a non-ReLU activation "
            "(use bound-cdf for guaranteed bounds instead)");
    const auto pdf = pdf_as_piecewise_polynomial(l.dist);
    if (!pdf)
        throw config_error(
            "exact-cdf requires an exactly polynomial density (uniform, beta_product, or "
            "explicit); gaussian_mixture is not (use bound-cdf instead)");

    const auto cells = enumerate_cells(l.net, l.dist.box);
    std::vector<QueryPoint> queries(l.grid.size());
    for (std::size_t i = 0; i < l.grid.size(); ++i) queries[i].y = {l.grid[i]};
    const auto curve = exact_cdf_curve(cells, *pdf, queries);

    std::ostringstream csv;
    csv << "y,cdf\n";
    for (const auto& [q, v] : curve) csv << fmt(q.y[0]) << ',' << fmt(v) << '\n';
    write_text(o.out_path, csv.str());
    return 0;
}

int cmd_bound_cdf(const CommonOpts& o) {
    const Loaded l = load_common(o);
    const CdfBounds bounds =
        cdf_bounds(l.net, l.dist, l.grid, o.segments, o.vertex_budget);

    std::optional<EmpiricalCdf> mc;
    std::optional<OobTally> oob;
    if (o.mc_samples > 0) {
        mc = mc_cdf(l.net, l.dist, o.mc_samples, l.grid, o.seed);
        oob = oob_tally(bounds, mc->grid_values);
    }

    std::ostringstream csv;
    write_bounds_csv(csv, bounds, mc ? &*mc : nullptr);
    write_text(o.out_path, csv.str());

    nlohmann::json meta = bounds_metadata(bounds, oob ? &*oob : nullptr);
    if (mc) {
        meta["mc_samples"] = mc->count;
        meta["mc_seed"] = o.seed;
        meta["dkw_half_width_999"] = mc->dkw_half_width(0.001);
    }
    write_text(o.out_path + ".meta.json", meta.dump(2) + "\n");
    return 0;
}

int cmd_approx_net(const CommonOpts& o) {
    set_thread_count(o.threads);
    const FeedforwardNetwork net = load_network(o.net_path);
    const InputDistribution dist = load_distribution(o.dist_path);
    if (net.input_dim() != dist.dim())
        throw config_error("network input dimension != distribution dimension");

    const BoundedNetworkPair pair = bound_network(net, dist.box, o.segments);

    // Sandwich spot-check before anything is written: lower <= net <= upper
    // at 1000 deterministic points of the box.
    std::mt19937_64 rng(o.seed);
    const std::size_t dim = dist.dim();
    for (int s = 0; s < 1000; ++s) {
        std::vector<double> x(dim);
        for (std::size_t f = 0; f < dim; ++f) {
            const Interval iv = dist.box.axis(f);
            x[f] = iv.lo + iv.width() * uniform01(rng);
        }
        const auto src = net.eval(x);
        const auto up = pair.upper.eval(x);
        const auto dn = pair.lower.eval(x);
        for (std::size_t j = 0; j < src.size(); ++j) {
            const double slack = 1e-9 * (1.0 + std::fabs(src[j]));
            if (up[j] < src[j] - slack || dn[j] > src[j] + slack)
                throw internal_error("sandwich violated at a spot-check point, output " +
                                     std::to_string(j));
        }
    }

    save_network(pair.upper, o.out_path + ".upper.json");
    save_network(pair.lower, o.out_path + ".lower.json");
    std::cout << o.out_path << ".upper.json\n" << o.out_path << ".lower.json\n";
    return 0;
}

int cmd_pdf_curve(const std::string& cdf_path, const std::string& out_path) {
    std::ifstream in(cdf_path);
    if (!in) throw config_error("cannot open cdf CSV: " + cdf_path);
    std::vector<double> ys, fs;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;  // header
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw config_error("cdf CSV: row without a second column: \"" + line + "\"");
        double y = 0.0, f = 0.0;
        auto r1 = std::from_chars(line.data(), line.data() + comma, y);
        const char* p2 = line.data() + comma + 1;
        const char* e2 = line.data() + line.size();
        const auto next = line.find(',', comma + 1);
        if (next != std::string::npos) e2 = line.data() + next;
        auto r2 = std::from_chars(p2, e2, f);
        if (r1.ec != std::errc{} || r2.ec != std::errc{})
            throw config_error("cdf CSV: cannot parse row \"" + line + "\"");
        ys.push_back(y);
        fs.push_back(f);
    }
    if (ys.size() < 3)
        throw config_error("pdf-curve: need at least 3 grid points, got " +
                           std::to_string(ys.size()));
    for (std::size_t i = 1; i < ys.size(); ++i)
        if (!(ys[i] > ys[i - 1]))
            throw config_error("pdf-curve: grid must be strictly increasing");

    std::ostringstream csv;
    csv << "y,pdf\n";
    const std::size_t n = ys.size();
    for (std::size_t i = 0; i < n; ++i) {
        double d;
        if (i == 0)
            d = (fs[1] - fs[0]) / (ys[1] - ys[0]);
        else if (i == n - 1)
            d = (fs[n - 1] - fs[n - 2]) / (ys[n - 1] - ys[n - 2]);
        else
            d = (fs[i + 1] - fs[i - 1]) / (ys[i + 1] - ys[i - 1]);
        csv << fmt(ys[i]) << ',' << fmt(d) << '\n';
    }
    write_text(out_path, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Guaranteed cdf bounds of a feedforward network's output under random box-supported "
        "inputs.\n"
        "Exit codes: 0 ok, 2 configuration error, 3 budget exceeded, 4 internal invariant "
        "violation."};
    app.require_subcommand(1);

    CommonOpts exact_o, bound_o, approx_o;
    std::string pdf_in, pdf_out;

    auto* exact = app.add_subcommand(
        "exact-cdf", "Exact output cdf (ReLU/identity network, polynomial density)");
    add_io_flags(exact, exact_o, false);
    add_grid_flags(exact, exact_o);

    auto* bound = app.add_subcommand(
        "bound-cdf", "Guaranteed lower/upper cdf bounds (any supported network/density)");
    add_io_flags(bound, bound_o, true);
    add_grid_flags(bound, bound_o);
    bound->add_option("--segments", bound_o.segments,
                      "Linear segments per curved activation region (default 5)");
    bound->add_option("--vertex-budget", bound_o.vertex_budget,
                      "Pdf-partition vertex budget (default 50000)");
    bound->add_option("--mc", bound_o.mc_samples,
                      "Add a Monte-Carlo column with this many samples");
    bound->add_option("--seed", bound_o.seed, "Monte-Carlo seed (default 12345)");

    auto* approx = app.add_subcommand(
        "approx-net", "Emit the ReLU upper/lower bounding networks as <out>.{upper,lower}.json");
    add_io_flags(approx, approx_o, true);
    approx->add_option("--segments", approx_o.segments,
                       "Linear segments per curved activation region (default 5)");
    approx->add_option("--seed", approx_o.seed, "Sandwich spot-check seed");

    auto* pdfc = app.add_subcommand("pdf-curve",
                                    "Finite-difference density estimate from a cdf CSV");
    pdfc->add_option("--cdf", pdf_in, "Input cdf CSV (columns y,cdf)")->required();
    pdfc->add_option("--out", pdf_out, "Output CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (exact->parsed()) return cmd_exact_cdf(exact_o);
        if (bound->parsed()) return cmd_bound_cdf(bound_o);
        if (approx->parsed()) return cmd_approx_net(approx_o);
        if (pdfc->parsed()) return cmd_pdf_curve(pdf_in, pdf_out);
    } catch (const budget_error& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
