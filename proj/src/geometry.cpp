#include "nncdf/geometry.hpp"

#include "nncdf/errors.hpp"
#include "nncdf/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace nncdf {

// ---------------------------------------------------------------------------
// Halfspace / HPolytope
// ---------------------------------------------------------------------------
Halfspace Halfspace::normalized() const {
    double n2 = 0.0;
    for (double v : normal) n2 += v * v;
    double n = std::sqrt(n2);
    if (n == 0.0) throw config_error("halfspace: zero normal");
    Halfspace h;
    h.normal.resize(normal.size());
    for (std::size_t i = 0; i < normal.size(); ++i) h.normal[i] = normal[i] / n;
    h.offset = offset / n;
    return h;
}

double Halfspace::eval(const Point& x) const {
    double s = -offset;
    for (std::size_t i = 0; i < normal.size(); ++i) s += normal[i] * x[i];
    return s;
}

bool HPolytope::contains(const Point& x, double tol) const {
    for (const auto& h : halfspaces)
        if (h.normalized().eval(x) > tol) return false;
    return true;
}

std::vector<Halfspace> box_halfspaces(const Box& box) {
    std::vector<Halfspace> hs;
    const std::size_t n = box.dim();
    hs.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        Halfspace up;
        up.normal.assign(n, 0.0);
        up.normal[i] = 1.0;
        up.offset = box.upper[i];
        hs.push_back(std::move(up));
        Halfspace lo;
        lo.normal.assign(n, 0.0);
        lo.normal[i] = -1.0;
        lo.offset = -box.lower[i];
        hs.push_back(std::move(lo));
    }
    return hs;
}

namespace {

void rows_from_halfspaces(const std::vector<Halfspace>& hs,
                          std::vector<std::vector<double>>& A,
                          std::vector<double>& b,
                          bool normalize) {
    A.clear();
    b.clear();
    for (const auto& h0 : hs) {
        Halfspace h = normalize ? h0.normalized() : h0;
        A.push_back(h.normal);
        b.push_back(h.offset);
    }
}

bool system_feasible(const std::vector<Halfspace>& hs, double tol) {
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    rows_from_halfspaces(hs, A, b, true);
    std::vector<double> c(A.empty() ? 0 : A[0].size(), 0.0);
    LpResult r = lp_solve(A, b, c, tol);
    return r.status == LpResult::Status::Optimal;
}

} // namespace

std::optional<HPolytope> intersect(const HPolytope& poly,
                                   const std::vector<Halfspace>& extra) {
    std::vector<Halfspace> rows = poly.halfspaces;
    rows.insert(rows.end(), extra.begin(), extra.end());
    std::size_t dim = 0;
    for (const auto& h : rows) {
        if (dim == 0) dim = h.normal.size();
        if (h.normal.size() != dim) throw config_error("intersect: mixed halfspace dimensions");
        h.normalized(); // validates nonzero normal
    }
    if (rows.empty()) return HPolytope{};

    const double tol = 1e-9;
    if (!system_feasible(rows, tol)) return std::nullopt;

    // Remove redundant rows: row i is redundant when max a_i'x over the other
    // rows stays <= b_i (within tol). Test against the current kept set so
    // duplicates collapse to a single representative.
    std::vector<Halfspace> kept = rows;
    for (std::size_t i = 0; i < kept.size();) {
        std::vector<Halfspace> others;
        others.reserve(kept.size() - 1);
        for (std::size_t k = 0; k < kept.size(); ++k)
            if (k != i) others.push_back(kept[k]);
        bool redundant = false;
        if (!others.empty()) {
            std::vector<std::vector<double>> A;
            std::vector<double> b;
            rows_from_halfspaces(others, A, b, true);
            Halfspace hi = kept[i].normalized();
            LpResult r = lp_solve(A, b, hi.normal, tol);
            if (r.status == LpResult::Status::Optimal && r.value <= hi.offset + tol)
                redundant = true;
        }
        if (redundant)
            kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
        else
            ++i;
    }
    return HPolytope{std::move(kept)};
}

// ---------------------------------------------------------------------------
// Vertex enumeration
// ---------------------------------------------------------------------------
namespace {

// Solves M x = rhs (n x n) by Gaussian elimination with partial pivoting.
// Returns false when the matrix is numerically singular.
bool solve_square(std::vector<std::vector<double>> M, std::vector<double> rhs,
                  std::vector<double>& out, double pivot_tol) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(M[r][col]) > std::fabs(M[best][col])) best = r;
        if (std::fabs(M[best][col]) < pivot_tol) return false;
        std::swap(M[best], M[col]);
        std::swap(rhs[best], rhs[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = M[r][col] / M[col][col];
            if (f == 0.0) continue;
            for (std::size_t c2 = col; c2 < n; ++c2) M[r][c2] -= f * M[col][c2];
            rhs[r] -= f * rhs[col];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c2 = i + 1; c2 < n; ++c2) s -= M[i][c2] * out[c2];
        out[i] = s / M[i][i];
    }
    return true;
}

bool lex_less(const Point& a, const Point& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

std::vector<Point> dedup_sorted(std::vector<Point> pts, double tol) {
    std::sort(pts.begin(), pts.end(), lex_less);
    std::vector<Point> out;
    for (auto& p : pts) {
        bool dup = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            double d = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) d = std::max(d, std::fabs((*it)[i] - p[i]));
            if (d <= tol) {
                dup = true;
                break;
            }
            // Sorted order: once the first coordinate differs by more than
            // tol, nothing earlier can be a duplicate.
            if (p[0] - (*it)[0] > tol) break;
        }
        if (!dup) out.push_back(std::move(p));
    }
    return out;
}

} // namespace

std::vector<Point> vertices(const HPolytope& poly, const Box& box) {
    validate_box(box);
    const std::size_t n = box.dim();
    for (const auto& h : poly.halfspaces)
        if (h.normal.size() != n)
            throw config_error("vertices: halfspace dimension != box dimension");

    std::vector<Halfspace> rows;
    rows.reserve(poly.halfspaces.size() + 2 * n);
    for (const auto& h : poly.halfspaces) rows.push_back(h.normalized());
    for (const auto& h : box_halfspaces(box)) rows.push_back(h.normalized());

    const double tol = 1e-9;

    if (n == 1) {
        double lo = box.lower[0], hi = box.upper[0];
        for (const auto& h : rows) {
            if (h.normal[0] > 0.0)
                hi = std::min(hi, h.offset / h.normal[0]);
            else
                lo = std::max(lo, h.offset / h.normal[0]);
        }
        if (lo > hi + tol) return {};
        if (hi < lo) hi = lo;
        return dedup_sorted({{lo}, {hi}}, tol);
    }

    if (n == 2) {
        // Clip the box polygon by every halfspace; intersection points of
        // consecutive clip lines are the vertices.
        Poly2 pg = box_polygon(box);
        for (const auto& h : rows) {
            pg = clip_polygon(pg, {h.normal[0], h.normal[1]}, h.offset);
            if (pg.empty()) return {};
        }
        std::vector<Point> pts;
        pts.reserve(pg.size());
        for (const auto& p : pg) pts.push_back({p[0], p[1]});
        return dedup_sorted(std::move(pts), tol);
    }

    // General dimension: every n-subset of active constraints can define a
    // vertex. Fine for the small systems this path serves.
    std::vector<Point> found;
    std::vector<std::size_t> idx(n);
    const std::size_t m = rows.size();
    std::vector<std::size_t> comb(n);
    // Iterative combination enumeration.
    for (std::size_t i = 0; i < n; ++i) comb[i] = i;
    if (m < n) return {};
    for (;;) {
        std::vector<std::vector<double>> M(n);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            M[i] = rows[comb[i]].normal;
            rhs[i] = rows[comb[i]].offset;
        }
        std::vector<double> x;
        if (solve_square(M, rhs, x, 1e-10)) {
            bool ok = true;
            for (const auto& h : rows) {
                if (h.eval(x) > tol) {
                    ok = false;
                    break;
                }
            }
            if (ok) found.push_back(std::move(x));
        }
        // Next combination.
        std::size_t k = n;
        while (k-- > 0) {
            if (comb[k] + (n - k) < m) {
                ++comb[k];
                for (std::size_t j = k + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
                break;
            }
            if (k == 0) return dedup_sorted(std::move(found), tol);
        }
        if (comb[0] + n > m) break;
    }
    return dedup_sorted(std::move(found), tol);
}

// ---------------------------------------------------------------------------
// 2D polygon helpers
// ---------------------------------------------------------------------------
Poly2 box_polygon(const Box& box) {
    if (box.dim() != 2) throw config_error("box_polygon: box must be 2D");
    return {{box.lower[0], box.lower[1]},
            {box.upper[0], box.lower[1]},
            {box.upper[0], box.upper[1]},
            {box.lower[0], box.upper[1]}};
}

Poly2 clip_polygon(const Poly2& poly, const std::array<double, 2>& v, double c,
                   double tol) {
    if (poly.empty()) return {};
    Poly2 out;
    out.reserve(poly.size() + 2);
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % n];
        double da = v[0] * a[0] + v[1] * a[1] - c;
        double db = v[0] * b[0] + v[1] * b[1] - c;
        bool ina = da <= tol;
        bool inb = db <= tol;
        if (ina) out.push_back(a);
        if (ina != inb) {
            double t = da / (da - db);
            out.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
        }
    }
    // Merge near-duplicate consecutive vertices introduced by grazing clips.
    if (out.size() > 1) {
        Poly2 clean;
        clean.reserve(out.size());
        for (const auto& p : out) {
            if (!clean.empty()) {
                const auto& q = clean.back();
                if (std::fabs(p[0] - q[0]) <= tol && std::fabs(p[1] - q[1]) <= tol) continue;
            }
            clean.push_back(p);
        }
        while (clean.size() > 1) {
            const auto& p = clean.front();
            const auto& q = clean.back();
            if (std::fabs(p[0] - q[0]) <= tol && std::fabs(p[1] - q[1]) <= tol)
                clean.pop_back();
            else
                break;
        }
        out.swap(clean);
    }
    return out;
}

double polygon_area(const Poly2& poly) {
    if (poly.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        s += a[0] * b[1] - b[0] * a[1];
    }
    return 0.5 * s;
}

// ---------------------------------------------------------------------------
// Simplex
// ---------------------------------------------------------------------------
namespace {
// Determinant of the edge matrix [v1-v0 ... vn-v0].
double edge_det(const std::vector<Point>& vs) {
    const std::size_t n = vs.size() - 1;
    std::vector<std::vector<double>> M(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M[i][j] = vs[i + 1][j] - vs[0][j];
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(M[r][col]) > std::fabs(M[best][col])) best = r;
        if (M[best][col] == 0.0) return 0.0;
        if (best != col) {
            std::swap(M[best], M[col]);
            det = -det;
        }
        det *= M[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = M[r][col] / M[col][col];
            for (std::size_t c2 = col; c2 < n; ++c2) M[r][c2] -= f * M[col][c2];
        }
    }
    return det;
}

double factorial_d(std::size_t k) {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return f;
}
} // namespace

double Simplex::volume() const {
    if (vertices.empty()) return 0.0;
    const std::size_t n = dim();
    if (vertices.size() != n + 1) throw config_error("simplex: needs n+1 vertices");
    return std::fabs(edge_det(vertices)) / factorial_d(n);
}

bool Simplex::degenerate(double tol) const {
    if (vertices.empty()) return true;
    const std::size_t n = dim();
    if (vertices.size() != n + 1) return true;
    // Scale-relative test on the edge determinant.
    double scale = 0.0;
    for (const auto& v : vertices)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(v[j] - vertices[0][j]));
    double d = std::fabs(edge_det(vertices));
    double ref = 1.0;
    for (std::size_t i = 0; i < n; ++i) ref *= std::max(scale, 1e-300);
    return d <= tol * std::max(ref, 1e-300);
}

Box Simplex::bounding_box() const {
    Box b;
    const std::size_t n = dim();
    b.lower.assign(n, 0.0);
    b.upper.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double lo = vertices[0][j], hi = vertices[0][j];
        for (const auto& v : vertices) {
            lo = std::min(lo, v[j]);
            hi = std::max(hi, v[j]);
        }
        b.lower[j] = lo;
        b.upper[j] = hi;
    }
    return b;
}

// ---------------------------------------------------------------------------
// Triangulation
// ---------------------------------------------------------------------------
namespace {

Triangulation triangulate_1d(std::vector<Point> pts) {
    Triangulation t;
    double lo = pts.front()[0], hi = pts.back()[0];
    if (hi - lo <= 1e-12 * std::max(1.0, std::fabs(lo))) {
        t.degenerate = true;
        return t;
    }
    t.simplices.push_back(Simplex{{{lo}, {hi}}});
    return t;
}

double cross2(const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

Triangulation triangulate_2d(const std::vector<Point>& pts) {
    Triangulation t;
    // Monotone chain: pts already lex-sorted and deduplicated.
    const std::size_t n = pts.size();
    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) { // lower hull
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) { // upper hull
        while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1); // last point equals the first
    if (hull.size() < 3) {
        t.degenerate = true;
        return t;
    }
    // CCW hull starting at the lexicographically smallest vertex; fan from it.
    for (std::size_t i = 1; i + 1 < hull.size(); ++i) {
        Simplex s{{hull[0], hull[i], hull[i + 1]}};
        if (!s.degenerate()) t.simplices.push_back(std::move(s));
    }
    if (t.simplices.empty()) t.degenerate = true;
    return t;
}

// Incremental beneath-beyond triangulation for dimension >= 3.
Triangulation triangulate_nd(const std::vector<Point>& pts, std::size_t n) {
    Triangulation t;

    // Greedy search for n+1 affinely independent seed points.
    std::vector<std::size_t> seed{0};
    std::vector<Point> basis;
    for (std::size_t i = 1; i < pts.size() && seed.size() <= n; ++i) {
        std::vector<Point> cand = basis;
        Point d(n);
        for (std::size_t j = 0; j < n; ++j) d[j] = pts[i][j] - pts[seed[0]][j];
        cand.push_back(d);
        // Rank check via elimination.
        std::vector<Point> M = cand;
        std::size_t rank = 0;
        for (std::size_t col = 0; col < n && rank < M.size(); ++col) {
            std::size_t best = rank;
            for (std::size_t r = rank + 1; r < M.size(); ++r)
                if (std::fabs(M[r][col]) > std::fabs(M[best][col])) best = r;
            if (std::fabs(M[best][col]) < 1e-12) continue;
            std::swap(M[best], M[rank]);
            for (std::size_t r = 0; r < M.size(); ++r) {
                if (r == rank) continue;
                double f = M[r][col] / M[rank][col];
                for (std::size_t c2 = 0; c2 < n; ++c2) M[r][c2] -= f * M[rank][c2];
            }
            ++rank;
        }
        if (rank == cand.size()) {
            basis = std::move(cand);
            seed.push_back(i);
        }
    }
    if (seed.size() < n + 1) {
        t.degenerate = true;
        return t;
    }

    std::vector<Point> verts = pts; // global registry; indices are stable
    using Facet = std::vector<std::size_t>;
    std::vector<std::vector<std::size_t>> simplices; // vertex-index tuples

    std::vector<std::size_t> first(seed.begin(), seed.end());
    std::sort(first.begin(), first.end());
    simplices.push_back(first);

    Point interior(n, 0.0);
    for (std::size_t id : seed)
        for (std::size_t j = 0; j < n; ++j) interior[j] += verts[id][j] / double(n + 1);

    double scale = 1e-300;
    for (const auto& p : pts)
        for (double x : p) scale = std::max(scale, std::fabs(x));

    for (std::size_t pi = 0; pi < pts.size(); ++pi) {
        if (std::find(seed.begin(), seed.end(), pi) != seed.end()) continue;
        const Point& p = pts[pi];

        // Boundary facets = (n)-subsets appearing in exactly one simplex.
        std::map<Facet, int> count;
        for (const auto& s : simplices) {
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                Facet f;
                for (std::size_t j = 0; j < s.size(); ++j)
                    if (j != drop) f.push_back(s[j]);
                ++count[f];
            }
        }
        std::vector<std::vector<std::size_t>> added;
        for (const auto& [facet, cnt] : count) {
            if (cnt != 1) continue;
            // Supporting hyperplane of the facet, oriented away from the hull
            // interior; p is beyond it when its signed distance is positive.
            std::vector<std::vector<double>> M(n, std::vector<double>(n));
            for (std::size_t i = 1; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    M[i - 1][j] = verts[facet[i]][j] - verts[facet[0]][j];
            // Normal = null direction of the edge matrix; found by solving
            // M x = 0 with one coordinate pinned. Try each pin until stable.
            Point normal;
            bool have = false;
            for (std::size_t pin = 0; pin < n && !have; ++pin) {
                std::vector<std::vector<double>> A;
                std::vector<double> rhs;
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    A.push_back(M[i]);
                    rhs.push_back(-M[i][pin]);
                }
                // Remove pinned column.
                std::vector<std::vector<double>> A2;
                for (auto& row : A) {
                    std::vector<double> r2;
                    for (std::size_t j = 0; j < n; ++j)
                        if (j != pin) r2.push_back(row[j]);
                    A2.push_back(std::move(r2));
                }
                std::vector<double> sol;
                if (!solve_square(A2, rhs, sol, 1e-12 * std::max(1.0, scale))) continue;
                normal.assign(n, 0.0);
                std::size_t idx2 = 0;
                for (std::size_t j = 0; j < n; ++j)
                    normal[j] = (j == pin) ? 1.0 : sol[idx2++];
                have = true;
            }
            if (!have) continue;
            double nn = 0.0;
            for (double x : normal) nn += x * x;
            nn = std::sqrt(nn);
            for (double& x : normal) x /= nn;
            double off = 0.0;
            for (std::size_t j = 0; j < n; ++j) off += normal[j] * verts[facet[0]][j];
            double di = 0.0;
            for (std::size_t j = 0; j < n; ++j) di += normal[j] * interior[j];
            if (di > off) { // flip outward
                for (double& x : normal) x = -x;
                off = -off;
            }
            double dp = -off;
            for (std::size_t j = 0; j < n; ++j) dp += normal[j] * p[j];
            if (dp > 1e-12 * std::max(1.0, scale)) {
                std::vector<std::size_t> s = facet;
                s.push_back(pi);
                std::sort(s.begin(), s.end());
                std::vector<Point> sv;
                for (std::size_t id : s) sv.push_back(verts[id]);
                if (!Simplex{sv}.degenerate()) added.push_back(std::move(s));
            }
        }
        for (auto& s : added) simplices.push_back(std::move(s));
    }

    for (const auto& s : simplices) {
        std::vector<Point> sv;
        for (std::size_t id : s) sv.push_back(verts[id]);
        Simplex sx{std::move(sv)};
        if (!sx.degenerate()) t.simplices.push_back(std::move(sx));
    }
    if (t.simplices.empty()) t.degenerate = true;
    return t;
}

} // namespace

Triangulation triangulate(const std::vector<Point>& points) {
    Triangulation t;
    if (points.empty()) {
        t.degenerate = true;
        return t;
    }
    const std::size_t n = points[0].size();
    for (const auto& p : points)
        if (p.size() != n) throw config_error("triangulate: mixed point dimensions");
    double scale = 1.0;
    for (const auto& p : points)
        for (double x : p) scale = std::max(scale, std::fabs(x));
    std::vector<Point> pts = dedup_sorted(points, 1e-12 * scale);
    if (pts.size() < n + 1) {
        t.degenerate = true;
        return t;
    }
    if (n == 1) return triangulate_1d(std::move(pts));
    if (n == 2) return triangulate_2d(pts);
    return triangulate_nd(pts, n);
}

std::vector<Halfspace> simplex_halfspaces(const Simplex& s) {
    const std::size_t n = s.dim();
    if (s.vertices.size() != n + 1) throw config_error("simplex_halfspaces: wrong vertex count");
    double scale = 1.0;
    for (const auto& p : s.vertices)
        for (double x : p) scale = std::max(scale, std::fabs(x));

    std::vector<Halfspace> rows;
    rows.reserve(n + 1);
    for (std::size_t e = 0; e <= n; ++e) {
        // Facet through all vertices except `e`.
        std::vector<const Point*> facet;
        for (std::size_t i = 0; i <= n; ++i)
            if (i != e) facet.push_back(&s.vertices[i]);

        // Normal orthogonal to the facet's spanning vectors, found by pinning
        // one coordinate to 1 and solving the remaining square system.
        std::vector<std::vector<double>> D(n - 1, std::vector<double>(n));
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) D[i - 1][j] = (*facet[i])[j] - (*facet[0])[j];
        Point normal;
        bool found = false;
        for (std::size_t pin = 0; pin < n && !found; ++pin) {
            std::vector<std::vector<double>> M(n - 1, std::vector<double>(n - 1));
            std::vector<double> rhs(n - 1);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                std::size_t idx = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == pin) continue;
                    M[i][idx++] = D[i][j];
                }
                rhs[i] = -D[i][pin];
            }
            std::vector<double> sol;
            if (!solve_square(M, rhs, sol, 1e-12 * std::max(1.0, scale))) continue;
            normal.assign(n, 0.0);
            std::size_t idx = 0;
            for (std::size_t j = 0; j < n; ++j) normal[j] = (j == pin) ? 1.0 : sol[idx++];
            found = true;
        }
        if (!found) throw config_error("simplex_halfspaces: degenerate simplex");
        double nn = 0.0;
        for (double x : normal) nn += x * x;
        nn = std::sqrt(nn);
        for (double& x : normal) x /= nn;
        double off = 0.0;
        for (std::size_t j = 0; j < n; ++j) off += normal[j] * (*facet[0])[j];
        // Orient inward: the excluded vertex must satisfy normal . x <= off.
        double d = -off;
        for (std::size_t j = 0; j < n; ++j) d += normal[j] * s.vertices[e][j];
        if (d > 0.0) {
            for (double& x : normal) x = -x;
            off = -off;
            d = -d;
        }
        if (d > -1e-12 * std::max(1.0, scale))
            throw config_error("simplex_halfspaces: degenerate simplex");
        rows.push_back({std::move(normal), off});
    }
    return rows;
}

void kuhn_split(const Box& box, std::vector<Simplex>& out) {
    const std::size_t n = box.dim();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    do {
        Simplex s;
        Point v = box.lower;
        s.vertices.push_back(v);
        for (std::size_t i = 0; i < n; ++i) {
            v[perm[i]] = box.upper[perm[i]];
            s.vertices.push_back(v);
        }
        out.push_back(std::move(s));
    } while (std::next_permutation(perm.begin(), perm.end()));
}

} // namespace nncdf
