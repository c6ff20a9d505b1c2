#include "nncdf/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "nncdf/errors.hpp"
#include "nncdf/lp.hpp"

namespace nncdf {

namespace {

// Pre-activation affine forms of one layer, composed with the map that feeds
// it: A = W * V, a = W * c + b.
struct LayerForms {
    std::vector<std::vector<double>> A;
    std::vector<double> a;
};

LayerForms compose_forms(const Layer& layer, const std::vector<std::vector<double>>& V,
                         const std::vector<double>& c) {
    const int rows = layer.out_dim();
    const int mid = layer.in_dim();
    const int cols = V.empty() ? 0 : static_cast<int>(V.front().size());
    LayerForms f;
    f.A.assign(rows, std::vector<double>(cols, 0.0));
    f.a = layer.bias;
    for (int j = 0; j < rows; ++j) {
        const std::vector<double>& w = layer.weights[static_cast<std::size_t>(j)];
        for (int k = 0; k < mid; ++k) {
            const double wjk = w[static_cast<std::size_t>(k)];
            if (wjk == 0.0) continue;
            const std::vector<double>& vk = V[static_cast<std::size_t>(k)];
            for (int i = 0; i < cols; ++i) {
                f.A[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] +=
                    wjk * vk[static_cast<std::size_t>(i)];
            }
            f.a[static_cast<std::size_t>(j)] += wjk * c[static_cast<std::size_t>(k)];
        }
    }
    return f;
}

// One in-progress cell.  The geometry is tracked exactly for 1D/2D inputs
// (interval / polygon) so feasibility never needs an LP there; higher input
// dimensions fall back to LP tests over the halfspace rows.
struct PartialCell {
    std::vector<Halfspace> relu_rows;
    std::vector<std::vector<double>> V;  // post-activation map of the layers decided so far
    std::vector<double> c;
    std::string pattern;
    double lo = 0.0, hi = 0.0;  // input_dim == 1
    Poly2 poly;                 // input_dim == 2
};

// Range of the affine form row*x + off over the exact cell geometry (1D/2D)
// or over the box (interval arithmetic) otherwise.
Interval form_range(const PartialCell& cell, const Box& box, const std::vector<double>& row,
                    double off) {
    const int n0 = box.dim();
    if (n0 == 1) {
        const double at_lo = off + row[0] * cell.lo;
        const double at_hi = off + row[0] * cell.hi;
        return {std::min(at_lo, at_hi), std::max(at_lo, at_hi)};
    }
    if (n0 == 2) {
        double mn = std::numeric_limits<double>::infinity();
        double mx = -mn;
        for (const auto& v : cell.poly) {
            const double d = off + row[0] * v[0] + row[1] * v[1];
            mn = std::min(mn, d);
            mx = std::max(mx, d);
        }
        return {mn, mx};
    }
    double mn = off, mx = off;
    for (int i = 0; i < n0; ++i) {
        const double r = row[static_cast<std::size_t>(i)];
        const double a = r * box.lower[static_cast<std::size_t>(i)];
        const double b = r * box.upper[static_cast<std::size_t>(i)];
        mn += std::min(a, b);
        mx += std::max(a, b);
    }
    return {mn, mx};
}

constexpr double kSliverRadius = 1e-10;

// Chebyshev radius of a halfspace system; negative when infeasible.
double system_radius(const std::vector<Halfspace>& rows) {
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    A.reserve(rows.size());
    b.reserve(rows.size());
    for (const Halfspace& h : rows) {
        A.push_back(h.normal);
        b.push_back(h.offset);
    }
    const LpResult r = chebyshev_center(A, b);
    if (r.status != LpResult::Status::Optimal) return -1.0;
    return r.value;
}

// Feasibility of a candidate cell after adding one branching halfspace.
// Returns false for empty or measure-zero sliver cells.
bool cell_alive(PartialCell& cell, const Box& box, const std::vector<Halfspace>& box_rows,
                double box_area) {
    const int n0 = box.dim();
    if (n0 == 1) {
        return cell.hi - cell.lo >= 2.0 * kSliverRadius;
    }
    if (n0 == 2) {
        if (cell.poly.size() < 3) return false;
        const double area = polygon_area(cell.poly);
        if (area <= 0.0) return false;
        if (area >= 1e-6 * box_area) return true;
        // Tiny area: confirm against the sliver rule with an exact
        // Chebyshev-radius LP over the halfspace rows.
        std::vector<Halfspace> rows = box_rows;
        rows.insert(rows.end(), cell.relu_rows.begin(), cell.relu_rows.end());
        return system_radius(rows) >= kSliverRadius;
    }
    std::vector<Halfspace> rows = box_rows;
    rows.insert(rows.end(), cell.relu_rows.begin(), cell.relu_rows.end());
    return system_radius(rows) >= kSliverRadius;
}

}  // namespace

std::vector<double> AffineMap::apply(const std::vector<double>& x) const {
    std::vector<double> y = offset;
    for (std::size_t j = 0; j < matrix.size(); ++j) {
        double acc = y[j];
        const std::vector<double>& row = matrix[j];
        for (std::size_t i = 0; i < row.size(); ++i) acc += row[i] * x[i];
        y[j] = acc;
    }
    return y;
}

std::int64_t cell_count_bound(const FeedforwardNetwork& net, const Box& box) {
    const std::int64_t n0 = box.dim();
    std::int64_t relu_layers = 0;
    std::int64_t max_width = 0;
    for (const Layer& layer : net.layers) {
        if (layer.activation == ActivationKind::ReLU) {
            ++relu_layers;
            max_width = std::max<std::int64_t>(max_width, layer.out_dim());
        }
    }
    if (relu_layers == 0) return 1;
    const std::int64_t base = max_width + 1;
    std::int64_t exponent = n0 * relu_layers;
    std::int64_t result = 1;
    const std::int64_t cap = std::numeric_limits<std::int64_t>::max();
    while (exponent-- > 0) {
        if (result > cap / base) return cap;
        result *= base;
    }
    return result;
}

std::vector<ActivationCell> enumerate_cells(const FeedforwardNetwork& net, const Box& box,
                                            std::size_t max_cells) {
    for (const Layer& layer : net.layers) {
        if (layer.activation != ActivationKind::ReLU &&
            layer.activation != ActivationKind::Identity) {
            throw config_error("enumerate_cells: network must use only relu/identity activations");
        }
    }
    validate_box(box);
    const int n0 = box.dim();
    if (net.input_dim() != static_cast<std::size_t>(n0)) {
        throw config_error("enumerate_cells: box dimension does not match network input");
    }

    const std::vector<Halfspace> box_rows = box_halfspaces(box);
    const Poly2 box_poly = n0 == 2 ? box_polygon(box) : Poly2{};
    const double box_area = n0 == 2 ? polygon_area(box_poly) : 0.0;

    PartialCell root;
    root.V.assign(static_cast<std::size_t>(n0), std::vector<double>(static_cast<std::size_t>(n0), 0.0));
    for (int i = 0; i < n0; ++i) root.V[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    root.c.assign(static_cast<std::size_t>(n0), 0.0);
    if (n0 == 1) {
        root.lo = box.lower[0];
        root.hi = box.upper[0];
    } else if (n0 == 2) {
        root.poly = box_poly;
    }

    std::vector<PartialCell> live;
    live.push_back(std::move(root));

    for (const Layer& layer : net.layers) {
        if (layer.activation == ActivationKind::Identity) {
            for (PartialCell& cell : live) {
                LayerForms f = compose_forms(layer, cell.V, cell.c);
                cell.V = std::move(f.A);
                cell.c = std::move(f.a);
            }
            continue;
        }

        // ReLU layer: decide every neuron, branching where the pre-activation
        // straddles zero.  Ties (exact zero) go to the active side; both
        // branch halfspaces are closed, so shared boundaries have measure 0.
        std::vector<PartialCell> next;
        const int width = layer.out_dim();
        struct Item {
            PartialCell cell;
            LayerForms forms;
            std::vector<std::vector<double>> newV;
            std::vector<double> newc;
            int neuron;
        };
        std::vector<Item> stack;
        for (auto it = live.rbegin(); it != live.rend(); ++it) {
            Item item;
            item.forms = compose_forms(layer, it->V, it->c);
            item.cell = std::move(*it);
            item.newV.reserve(static_cast<std::size_t>(width));
            item.newc.reserve(static_cast<std::size_t>(width));
            item.neuron = 0;
            stack.push_back(std::move(item));
        }
        live.clear();

        while (!stack.empty()) {
            Item item = std::move(stack.back());
            stack.pop_back();
            bool dead = false;
            while (item.neuron < width) {
                const int j = item.neuron;
                const std::vector<double>& row = item.forms.A[static_cast<std::size_t>(j)];
                const double off = item.forms.a[static_cast<std::size_t>(j)];
                double norm = 0.0;
                for (double r : row) norm = std::max(norm, std::fabs(r));
                const Interval range = form_range(item.cell, box, row, off);

                const auto commit = [&](Item& target, bool active) {
                    if (norm > 0.0) {
                        // active: row*x + off >= 0  ->  -row*x <= off
                        // inactive: row*x + off <= 0 ->  row*x <= -off
                        Halfspace h;
                        h.normal = row;
                        h.offset = -off;
                        if (active) {
                            for (double& r : h.normal) r = -r;
                            h.offset = off;
                        }
                        target.cell.relu_rows.push_back(h.normalized());
                    }
                    target.newV.push_back(active ? row : std::vector<double>(row.size(), 0.0));
                    target.newc.push_back(active ? off : 0.0);
                    target.cell.pattern.push_back(active ? '1' : '0');
                    ++target.neuron;
                };

                // A constant form (norm == 0) always lands in one of these two
                // branches because its range degenerates to {off}.
                if (range.lo >= 0.0) {
                    commit(item, true);
                    continue;
                }
                if (range.hi <= 0.0) {
                    commit(item, false);
                    continue;
                }

                // Straddling neuron: branch.  The inactive copy goes on the
                // stack; this item continues as the active branch.
                Item inactive = item;
                commit(inactive, false);
                commit(item, true);
                if (n0 == 1) {
                    const double t = -off / row[0];
                    if (row[0] > 0.0) {
                        item.cell.lo = std::max(item.cell.lo, t);
                        inactive.cell.hi = std::min(inactive.cell.hi, t);
                    } else {
                        item.cell.hi = std::min(item.cell.hi, t);
                        inactive.cell.lo = std::max(inactive.cell.lo, t);
                    }
                } else if (n0 == 2) {
                    const Halfspace& act = item.cell.relu_rows.back();
                    const Halfspace& inact = inactive.cell.relu_rows.back();
                    item.cell.poly = clip_polygon(item.cell.poly, {act.normal[0], act.normal[1]},
                                                  act.offset);
                    inactive.cell.poly = clip_polygon(
                        inactive.cell.poly, {inact.normal[0], inact.normal[1]}, inact.offset);
                }
                if (cell_alive(inactive.cell, box, box_rows, box_area)) {
                    stack.push_back(std::move(inactive));
                }
                if (!cell_alive(item.cell, box, box_rows, box_area)) {
                    dead = true;
                    break;
                }
                if (stack.size() + next.size() + 1 > max_cells) {
                    throw budget_error("enumerate_cells: cell budget exceeded");
                }
            }
            if (dead) continue;
            item.cell.V = std::move(item.newV);
            item.cell.c = std::move(item.newc);
            next.push_back(std::move(item.cell));
            if (next.size() > max_cells) {
                throw budget_error("enumerate_cells: cell budget exceeded");
            }
        }
        live = std::move(next);
    }

    std::vector<ActivationCell> cells;
    cells.reserve(live.size());
    for (PartialCell& cell : live) {
        ActivationCell out;
        out.polytope.halfspaces = box_rows;
        out.polytope.halfspaces.insert(out.polytope.halfspaces.end(), cell.relu_rows.begin(),
                                       cell.relu_rows.end());
        out.map.matrix = std::move(cell.V);
        out.map.offset = std::move(cell.c);
        out.pattern = std::move(cell.pattern);
        cells.push_back(std::move(out));
    }
    std::sort(cells.begin(), cells.end(),
              [](const ActivationCell& a, const ActivationCell& b) { return a.pattern < b.pattern; });
    return cells;
}

nlohmann::json cells_to_json(const std::vector<ActivationCell>& cells) {
    nlohmann::json out = nlohmann::json::array();
    for (const ActivationCell& cell : cells) {
        nlohmann::json rows = nlohmann::json::array();
        for (const Halfspace& h : cell.polytope.halfspaces) {
            rows.push_back({{"normal", h.normal}, {"offset", h.offset}});
        }
        out.push_back({{"pattern", cell.pattern},
                       {"halfspaces", std::move(rows)},
                       {"map", {{"matrix", cell.map.matrix}, {"offset", cell.map.offset}}}});
    }
    return out;
}

}  // namespace nncdf
