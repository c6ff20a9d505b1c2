#include "nncdf/pdf_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "nncdf/errors.hpp"
#include "nncdf/parallel.hpp"

namespace nncdf {

namespace {

// Range of a nonnegative unimodal function on [lo, hi] given its mode and a
// pointwise evaluator.
template <typename F>
Interval unimodal_range(double lo, double hi, double mode, F&& f) {
    const double flo = f(lo), fhi = f(hi);
    Interval r{std::min(flo, fhi), std::max(flo, fhi)};
    if (mode > lo && mode < hi) r.hi = std::max(r.hi, f(mode));
    return r;
}

double beta_axis_mode(const BetaShape& s) {
    if (s.alpha == 1 && s.beta == 1) return 0.5;  // constant; any point works
    if (s.alpha == 1) return 0.0;
    if (s.beta == 1) return 1.0;
    return static_cast<double>(s.alpha - 1) / static_cast<double>(s.alpha + s.beta - 2);
}

double gauss_axis_pdf(double x, double mean, double sigma) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    const double z = (x - mean) / sigma;
    return inv_sqrt_2pi / sigma * std::exp(-0.5 * z * z);
}

// Guaranteed density range of the box-truncated (renormalized) density over
// an axis-aligned sub-box.
Interval density_range(const InputDistribution& dist, const Box& bbox, double z_mass) {
    const std::size_t n = dist.dim();
    switch (dist.kind) {
        case InputDistribution::Kind::UniformBox: {
            const double d = 1.0 / dist.box.volume();
            return {d, d};
        }
        case InputDistribution::Kind::BetaProduct: {
            Interval r{1.0, 1.0};
            for (std::size_t i = 0; i < n; ++i) {
                const BetaShape& s = dist.shapes[i];
                const Interval axis = unimodal_range(
                    bbox.lower[i], bbox.upper[i], beta_axis_mode(s),
                    [&](double x) { return beta_axis_density(s, x); });
                r.lo *= axis.lo;
                r.hi *= axis.hi;
            }
            return r;
        }
        case InputDistribution::Kind::TruncatedGaussianMixture: {
            Interval r{0.0, 0.0};
            for (const GaussianComponent& c : dist.components) {
                Interval comp{1.0, 1.0};
                for (std::size_t i = 0; i < n; ++i) {
                    const Interval axis = unimodal_range(
                        bbox.lower[i], bbox.upper[i], c.mean[i],
                        [&](double x) { return gauss_axis_pdf(x, c.mean[i], c.sigma[i]); });
                    comp.lo *= axis.lo;
                    comp.hi *= axis.hi;
                }
                r.lo += c.weight * comp.lo;
                r.hi += c.weight * comp.hi;
            }
            r.lo /= z_mass;
            r.hi /= z_mass;
            return r;
        }
        case InputDistribution::Kind::ExplicitPiecewisePolynomial:
            break;
    }
    throw config_error("bound_pdf: explicit piecewise-polynomial pdfs are already exact");
}

struct Entry {
    Simplex simplex;
    double lo = 0.0, hi = 0.0;
    double volume = 0.0;
    bool alive = true;
};

double entry_gap(const Entry& e) { return (e.hi - e.lo) * e.volume; }

}  // namespace

double PdfBoundsPair::gap_mass() const {
    double total = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i)
        total += (hi[i] - lo[i]) * partition.simplices[i].volume();
    return total;
}

SimplicialPartition partition_box(const Box& box, int cells_per_axis,
                                  std::size_t vertex_budget) {
    validate_box(box);
    if (cells_per_axis < 1) throw config_error("partition_box: cells_per_axis must be >= 1");
    const std::size_t n = box.dim();
    const std::size_t k = static_cast<std::size_t>(cells_per_axis);

    std::size_t vertex_count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (vertex_count > vertex_budget / (k + 1) + 1) {
            vertex_count = vertex_budget + 1;
            break;
        }
        vertex_count *= k + 1;
    }
    if (vertex_count > vertex_budget)
        throw budget_error("partition_box: " + std::to_string(k + 1) + "^" + std::to_string(n) +
                           " grid vertices exceed the budget of " +
                           std::to_string(vertex_budget));

    SimplicialPartition part;
    part.vertex_count = vertex_count;
    std::vector<std::size_t> idx(n, 0);
    const auto cell_edge = [&](std::size_t axis, std::size_t i) {
        // Shared faces must be bit-identical across neighboring cells.
        return box.lower[axis] +
               (box.upper[axis] - box.lower[axis]) * static_cast<double>(i) /
                   static_cast<double>(k);
    };
    while (true) {
        Box cell;
        cell.lower.resize(n);
        cell.upper.resize(n);
        for (std::size_t a = 0; a < n; ++a) {
            cell.lower[a] = cell_edge(a, idx[a]);
            cell.upper[a] = cell_edge(a, idx[a] + 1);
        }
        kuhn_split(cell, part.simplices);
        std::size_t a = 0;
        while (a < n && ++idx[a] == k) idx[a++] = 0;
        if (a == n) break;
    }
    return part;
}

PdfBoundsPair bound_pdf(const InputDistribution& dist, const SimplicialPartition& part) {
    validate_distribution(dist);
    if (part.simplices.empty()) throw config_error("bound_pdf: empty partition");
    double vol = 0.0;
    for (const Simplex& s : part.simplices) {
        if (s.dim() != dist.dim())
            throw config_error("bound_pdf: partition dimension != distribution dimension");
        vol += s.volume();
    }
    const double bvol = dist.box.volume();
    if (std::fabs(vol - bvol) > 1e-6 * std::max(1.0, bvol))
        throw config_error("bound_pdf: partition does not cover the distribution box");

    const double z = mass_on_box(dist);
    PdfBoundsPair pair;
    pair.partition = part;
    pair.source = dist;
    pair.lo.assign(part.simplices.size(), 0.0);
    pair.hi.assign(part.simplices.size(), 0.0);
    parallel_for(0, part.simplices.size(), [&](std::size_t i) {
        const Interval r = density_range(dist, part.simplices[i].bounding_box(), z);
        pair.lo[i] = std::max(0.0, r.lo);
        pair.hi[i] = r.hi;
    });
    return pair;
}

PdfBoundsPair refine(const PdfBoundsPair& pair, std::size_t vertex_budget) {
    if (vertex_budget < pair.partition.vertex_count)
        throw config_error("refine: budget below current vertex count");

    const double z = mass_on_box(pair.source);

    std::vector<Entry> entries;
    entries.reserve(pair.partition.simplices.size() * 2);
    // Queue ordered by gap mass (descending), entry id as tie-break.
    const auto cmp = [](const std::pair<double, std::size_t>& a,
                        const std::pair<double, std::size_t>& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    };
    std::set<std::pair<double, std::size_t>, decltype(cmp)> queue(cmp);
    std::set<Point> vertex_set;

    for (std::size_t i = 0; i < pair.partition.simplices.size(); ++i) {
        Entry e;
        e.simplex = pair.partition.simplices[i];
        e.lo = pair.lo[i];
        e.hi = pair.hi[i];
        e.volume = e.simplex.volume();
        for (const Point& v : e.simplex.vertices) vertex_set.insert(v);
        queue.insert({entry_gap(e), i});
        entries.push_back(std::move(e));
    }
    std::size_t vertex_count = vertex_set.size();

    const std::size_t max_steps = 10 * vertex_budget + 1000;
    for (std::size_t step = 0; step < max_steps && vertex_count < vertex_budget; ++step) {
        if (queue.empty()) break;
        const auto top = *queue.begin();
        if (top.first <= 0.0) break;
        queue.erase(queue.begin());
        Entry& parent = entries[top.second];

        // Longest edge, lexicographic (i, j) tie-break.
        std::size_t bi = 0, bj = 1;
        double best = -1.0;
        const auto& vs = parent.simplex.vertices;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            for (std::size_t j = i + 1; j < vs.size(); ++j) {
                double d2 = 0.0;
                for (std::size_t a = 0; a < vs[i].size(); ++a) {
                    const double d = vs[i][a] - vs[j][a];
                    d2 += d * d;
                }
                if (d2 > best) {
                    best = d2;
                    bi = i;
                    bj = j;
                }
            }
        }
        Point mid(vs[bi].size());
        for (std::size_t a = 0; a < mid.size(); ++a) mid[a] = 0.5 * (vs[bi][a] + vs[bj][a]);

        const bool is_new = vertex_set.find(mid) == vertex_set.end();
        if (is_new && vertex_count + 1 > vertex_budget) break;

        Entry child1, child2;
        child1.simplex = parent.simplex;
        child1.simplex.vertices[bj] = mid;
        child2.simplex = parent.simplex;
        child2.simplex.vertices[bi] = mid;
        for (Entry* c : {&child1, &child2}) {
            c->volume = c->simplex.volume();
            const Interval r = density_range(pair.source, c->simplex.bounding_box(), z);
            c->lo = std::max(0.0, r.lo);
            c->hi = r.hi;
        }
        parent.alive = false;
        if (is_new) {
            vertex_set.insert(mid);
            ++vertex_count;
        }
        for (Entry* c : {&child1, &child2}) {
            queue.insert({entry_gap(*c), entries.size()});
            entries.push_back(std::move(*c));
        }
    }

    PdfBoundsPair out;
    out.source = pair.source;
    out.partition.vertex_count = vertex_count;
    for (const Entry& e : entries) {
        if (!e.alive) continue;
        out.partition.simplices.push_back(e.simplex);
        out.lo.push_back(e.lo);
        out.hi.push_back(e.hi);
    }
    return out;
}

}  // namespace nncdf
