#include "nncdf/exact_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nncdf/errors.hpp"
#include "nncdf/parallel.hpp"

namespace nncdf {

namespace {

// Geometry of one (activation cell, pdf piece) intersection Q, precomputed
// once and shared across all grid points.  The representation depends on the
// input dimension: exact interval (1D), exact convex polygon (2D), or a
// halfspace list resolved through vertex enumeration (>= 3D).
struct PairGeom {
    bool dead = true;
    const Polynomial* phi = nullptr;
    const AffineMap* map = nullptr;
    double q_lo = 0.0, q_hi = 0.0;     // 1D
    Poly2 q_poly;                      // 2D
    std::vector<Halfspace> q_rows;     // >= 3D
    std::vector<Interval> t_range;     // range of each output over Q
    double mass_full = 0.0;            // integral of phi over Q
};

double integrate_over_interval(const Polynomial& phi, double a, double b) {
    Simplex s;
    s.vertices = {{a}, {b}};
    return integrate_polynomial_over_simplex(phi, s);
}

// Fan triangulation of a convex polygon; contributions summed pairwise in a
// fixed order so results are independent of everything but the polygon.
double integrate_over_polygon(const Polynomial& phi, const Poly2& poly) {
    if (poly.size() < 3) return 0.0;
    std::vector<double> parts(poly.size() - 2);
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        Simplex s;
        s.vertices = {{poly[0][0], poly[0][1]},
                      {poly[k][0], poly[k][1]},
                      {poly[k + 1][0], poly[k + 1][1]}};
        parts[k - 1] = integrate_polynomial_over_simplex(phi, s);
    }
    return pairwise_sum(parts.data(), parts.size());
}

double integrate_over_rows(const Polynomial& phi, const std::vector<Halfspace>& rows,
                           const Box& box, std::vector<Point>* verts_out = nullptr) {
    HPolytope poly;
    poly.halfspaces = rows;
    std::vector<Point> vs = vertices(poly, box);
    if (verts_out) *verts_out = vs;
    if (vs.size() < static_cast<std::size_t>(box.dim()) + 1) return 0.0;
    Triangulation t = triangulate(vs);
    if (t.simplices.empty()) return 0.0;
    std::vector<double> parts(t.simplices.size());
    for (std::size_t k = 0; k < t.simplices.size(); ++k)
        parts[k] = integrate_polynomial_over_simplex(phi, t.simplices[k]);
    return pairwise_sum(parts.data(), parts.size());
}

// Interval of an affine output row over a vertex set.
Interval affine_range(const std::vector<double>& row, double off,
                      const std::vector<Point>& verts) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    for (const Point& v : verts) {
        double d = off;
        for (std::size_t i = 0; i < row.size(); ++i) d += row[i] * v[i];
        mn = std::min(mn, d);
        mx = std::max(mx, d);
    }
    return {mn, mx};
}

// 1D cell bounds from the halfspace rows of the cell polytope.
void interval_of_rows(const std::vector<Halfspace>& rows, double& lo, double& hi) {
    lo = -std::numeric_limits<double>::infinity();
    hi = std::numeric_limits<double>::infinity();
    for (const Halfspace& h : rows) {
        if (h.normal[0] > 0.0)
            hi = std::min(hi, h.offset / h.normal[0]);
        else if (h.normal[0] < 0.0)
            lo = std::max(lo, h.offset / h.normal[0]);
    }
}

std::vector<PairGeom> build_pairs(const std::vector<ActivationCell>& cells,
                                  const PiecewisePolynomialPdf& pdf) {
    const int n0 = pdf.support.dim();
    const std::size_t npieces = pdf.pieces.size();
    const std::size_t nl = cells.front().map.offset.size();
    std::vector<PairGeom> pairs(cells.size() * npieces);

    // Halfspace form of every piece simplex, shared across cells.
    std::vector<std::vector<Halfspace>> piece_rows(npieces);
    std::vector<bool> piece_ok(npieces, false);
    for (std::size_t j = 0; j < npieces; ++j) {
        if (pdf.pieces[j].first.degenerate()) continue;
        piece_rows[j] = simplex_halfspaces(pdf.pieces[j].first);
        piece_ok[j] = true;
    }

    const Poly2 support_poly = n0 == 2 ? box_polygon(pdf.support) : Poly2{};

    parallel_for(0, cells.size(), [&](std::size_t ci) {
        const ActivationCell& cell = cells[ci];

        double cell_lo = 0.0, cell_hi = 0.0;
        Poly2 cell_poly;
        if (n0 == 1) {
            interval_of_rows(cell.polytope.halfspaces, cell_lo, cell_hi);
        } else if (n0 == 2) {
            cell_poly = support_poly;
            for (const Halfspace& h : cell.polytope.halfspaces) {
                cell_poly = clip_polygon(cell_poly, {h.normal[0], h.normal[1]}, h.offset);
                if (cell_poly.size() < 3) break;
            }
        }

        for (std::size_t j = 0; j < npieces; ++j) {
            PairGeom& g = pairs[ci * npieces + j];
            if (!piece_ok[j]) continue;
            g.phi = &pdf.pieces[j].second;
            g.map = &cell.map;

            if (n0 == 1) {
                double plo = pdf.pieces[j].first.vertices[0][0];
                double phi_x = pdf.pieces[j].first.vertices[1][0];
                if (plo > phi_x) std::swap(plo, phi_x);
                g.q_lo = std::max(cell_lo, plo);
                g.q_hi = std::min(cell_hi, phi_x);
                if (!(g.q_hi - g.q_lo > 0.0)) continue;
                g.t_range.resize(nl);
                for (std::size_t t = 0; t < nl; ++t) {
                    const double v = cell.map.matrix[t][0];
                    const double c = cell.map.offset[t];
                    const double at_lo = c + v * g.q_lo;
                    const double at_hi = c + v * g.q_hi;
                    g.t_range[t] = {std::min(at_lo, at_hi), std::max(at_lo, at_hi)};
                }
                g.mass_full = integrate_over_interval(*g.phi, g.q_lo, g.q_hi);
                g.dead = false;
            } else if (n0 == 2) {
                if (cell_poly.size() < 3) continue;
                Poly2 q = cell_poly;
                for (const Halfspace& h : piece_rows[j]) {
                    q = clip_polygon(q, {h.normal[0], h.normal[1]}, h.offset);
                    if (q.size() < 3) break;
                }
                if (q.size() < 3 || polygon_area(q) <= 0.0) continue;
                g.q_poly = std::move(q);
                std::vector<Point> verts;
                verts.reserve(g.q_poly.size());
                for (const auto& v : g.q_poly) verts.push_back({v[0], v[1]});
                g.t_range.resize(nl);
                for (std::size_t t = 0; t < nl; ++t)
                    g.t_range[t] = affine_range(cell.map.matrix[t], cell.map.offset[t], verts);
                g.mass_full = integrate_over_polygon(*g.phi, g.q_poly);
                g.dead = false;
            } else {
                g.q_rows = cell.polytope.halfspaces;
                g.q_rows.insert(g.q_rows.end(), piece_rows[j].begin(), piece_rows[j].end());
                std::vector<Point> verts;
                g.mass_full = integrate_over_rows(*g.phi, g.q_rows, pdf.support, &verts);
                if (verts.size() < static_cast<std::size_t>(n0) + 1) continue;
                g.t_range.resize(nl);
                for (std::size_t t = 0; t < nl; ++t)
                    g.t_range[t] = affine_range(cell.map.matrix[t], cell.map.offset[t], verts);
                g.dead = false;
            }
        }
    });
    return pairs;
}

double pair_contribution(const PairGeom& g, const std::vector<double>& y, const Box& support,
                         int n0) {
    if (g.dead) return 0.0;
    bool full = true;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (y[t] < g.t_range[t].hi) {
            full = false;
            break;
        }
    }
    if (full) return g.mass_full;
    for (std::size_t t = 0; t < y.size(); ++t)
        if (y[t] < g.t_range[t].lo) return 0.0;

    const auto& V = g.map->matrix;
    const auto& c = g.map->offset;

    if (n0 == 1) {
        double lo = g.q_lo, hi = g.q_hi;
        for (std::size_t t = 0; t < y.size(); ++t) {
            if (y[t] >= g.t_range[t].hi) continue;  // row holds on all of Q
            const double v = V[t][0];
            const double bound = (y[t] - c[t]) / v;
            if (v > 0.0)
                hi = std::min(hi, bound);
            else
                lo = std::max(lo, bound);
        }
        if (!(hi - lo > 0.0)) return 0.0;
        return integrate_over_interval(*g.phi, lo, hi);
    }
    if (n0 == 2) {
        Poly2 poly = g.q_poly;
        for (std::size_t t = 0; t < y.size(); ++t) {
            if (y[t] >= g.t_range[t].hi) continue;
            poly = clip_polygon(poly, {V[t][0], V[t][1]}, y[t] - c[t]);
            if (poly.size() < 3) return 0.0;
        }
        return integrate_over_polygon(*g.phi, poly);
    }
    std::vector<Halfspace> rows = g.q_rows;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (y[t] >= g.t_range[t].hi) continue;
        double norm = 0.0;
        for (double r : V[t]) norm = std::max(norm, std::fabs(r));
        if (norm == 0.0) continue;  // constant output row, already satisfied
        rows.push_back(Halfspace{V[t], y[t] - c[t]});
    }
    return integrate_over_rows(*g.phi, rows, support);
}

void check_inputs(const std::vector<ActivationCell>& cells, const PiecewisePolynomialPdf& pdf,
                  const std::vector<QueryPoint>& grid) {
    if (cells.empty()) throw config_error("exact_cdf: empty cell list");
    const int n0 = pdf.support.dim();
    const std::vector<Halfspace> expect = box_halfspaces(pdf.support);
    const std::size_t nl = cells.front().map.offset.size();
    for (const ActivationCell& cell : cells) {
        if (cell.polytope.halfspaces.size() < expect.size())
            throw config_error("exact_cdf: cells were not enumerated over the pdf support box");
        for (std::size_t r = 0; r < expect.size(); ++r) {
            const Halfspace& a = cell.polytope.halfspaces[r];
            const Halfspace& b = expect[r];
            if (a.normal != b.normal || a.offset != b.offset)
                throw config_error("exact_cdf: cells were not enumerated over the pdf support box");
        }
        if (cell.map.offset.size() != nl || cell.map.matrix.size() != nl)
            throw config_error("exact_cdf: inconsistent cell output dimensions");
        for (const auto& row : cell.map.matrix)
            if (row.size() != static_cast<std::size_t>(n0))
                throw config_error("exact_cdf: cell map input dimension != pdf dimension");
    }
    for (const QueryPoint& q : grid) {
        if (q.y.size() != nl) throw config_error("exact_cdf: query dimension != network output");
        for (double v : q.y)
            if (!std::isfinite(v)) throw config_error("exact_cdf: non-finite query point");
    }
}

}  // namespace

std::vector<double> exact_cdf_curve_raw(const std::vector<ActivationCell>& cells,
                                        const PiecewisePolynomialPdf& pdf,
                                        const std::vector<QueryPoint>& grid) {
    check_inputs(cells, pdf, grid);
    validate_piecewise_pdf(pdf, /*expect_normalized=*/false);
    const int n0 = pdf.support.dim();
    const std::vector<PairGeom> pairs = build_pairs(cells, pdf);

    std::vector<double> out(grid.size(), 0.0);
    parallel_for(0, grid.size(), [&](std::size_t gi) {
        std::vector<double> contrib(pairs.size());
        for (std::size_t p = 0; p < pairs.size(); ++p)
            contrib[p] = pair_contribution(pairs[p], grid[gi].y, pdf.support, n0);
        out[gi] = pairwise_sum(contrib.data(), contrib.size());
    });
    return out;
}

std::vector<std::pair<QueryPoint, double>> exact_cdf_curve(
    const std::vector<ActivationCell>& cells, const PiecewisePolynomialPdf& pdf,
    const std::vector<QueryPoint>& grid) {
    validate_piecewise_pdf(pdf, /*expect_normalized=*/true);
    const std::vector<double> raw = exact_cdf_curve_raw(cells, pdf, grid);
    std::vector<std::pair<QueryPoint, double>> out;
    out.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (raw[i] < -1e-6 || raw[i] > 1.0 + 1e-6)
            throw internal_error("exact_cdf: accumulated mass " + std::to_string(raw[i]) +
                                 " outside [0,1] beyond tolerance");
        out.emplace_back(grid[i], std::clamp(raw[i], 0.0, 1.0));
    }
    return out;
}

double exact_cdf_at(const std::vector<ActivationCell>& cells, const PiecewisePolynomialPdf& pdf,
                    const QueryPoint& q) {
    return exact_cdf_curve(cells, pdf, {q})[0].second;
}

}  // namespace nncdf
