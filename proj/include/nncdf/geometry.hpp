#pragma once

#include "nncdf/model.hpp"

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace nncdf {

using Point = std::vector<double>;

// ---------------------------------------------------------------------------
// Halfspaces and H-polytopes.
// ---------------------------------------------------------------------------
struct Halfspace {
    std::vector<double> normal; // v (must be nonzero)
    double offset = 0.0;        // c; the set is { x : v'x <= c }

    // Scales so ||v||_2 = 1 (same point set); keeps distances meaningful.
    Halfspace normalized() const;
    double eval(const Point& x) const; // v'x - c  (<= 0 inside)
};

struct HPolytope {
    std::vector<Halfspace> halfspaces;

    bool contains(const Point& x, double tol = 1e-9) const;
};

// Box as 2n halfspaces (x_i <= hi_i, -x_i <= -lo_i), in fixed axis order.
std::vector<Halfspace> box_halfspaces(const Box& box);

// Intersection with redundancy removal (one LP per halfspace, feasibility
// tolerance 1e-9). Returns nullopt when the intersection is empty.
std::optional<HPolytope> intersect(const HPolytope& poly,
                                   const std::vector<Halfspace>& extra);

// Vertices of poly ∩ box, deduplicated and sorted lexicographically.
// Every returned point satisfies all halfspaces within 1e-9 and lies on at
// least dim active constraints. Throws config_error when called with
// mismatched dimensions.
std::vector<Point> vertices(const HPolytope& poly, const Box& box);

// ---------------------------------------------------------------------------
// Simplices and triangulation.
// ---------------------------------------------------------------------------
struct Simplex {
    std::vector<Point> vertices; // n+1 points in R^n

    std::size_t dim() const { return vertices.empty() ? 0 : vertices[0].size(); }
    double volume() const; // |det E| / n!, E = edge matrix from vertex 0
    bool degenerate(double tol = 1e-12) const;
    // Smallest axis-aligned box containing the simplex.
    Box bounding_box() const;
};

struct Triangulation {
    std::vector<Simplex> simplices;
    bool degenerate = false; // input was lower-dimensional: zero measure
};

// Deterministic triangulation of the convex hull of the given points
// (incremental hull with lexicographic insertion order; 2D uses a monotone
// chain + fan). Union of simplices = hull; simplices almost disjoint.
Triangulation triangulate(const std::vector<Point>& points);

// H-representation of a nondegenerate simplex: one inward-oriented halfspace
// per facet.  Throws config_error for degenerate simplices.
std::vector<Halfspace> simplex_halfspaces(const Simplex& s);

// Kuhn (Freudenthal) split of an axis-aligned box into dim()! simplices,
// appended to `out` in permutation order.
void kuhn_split(const Box& box, std::vector<Simplex>& out);

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials.
// ---------------------------------------------------------------------------
template <typename T>
struct PolynomialT {
    std::size_t dim = 0;
    // (exponent vector, coefficient), exponents unique and lex-sorted,
    // no zero coefficients stored.
    std::vector<std::pair<std::vector<int>, T>> terms;

    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms) {
            int s = 0;
            for (int k : e) s += k;
            if (s > d) d = s;
        }
        return d;
    }
};

using Polynomial = PolynomialT<double>;
using PolynomialQ = PolynomialT<mpq_class>;

// Canonicalizes: merges duplicate exponents, drops zeros (|c| == 0).
template <typename T>
PolynomialT<T> make_polynomial(std::size_t dim,
                               std::vector<std::pair<std::vector<int>, T>> terms);

Polynomial poly_constant(std::size_t dim, double value);
Polynomial poly_add(const Polynomial& a, const Polynomial& b);
Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
double poly_eval(const Polynomial& p, const Point& x);
PolynomialQ poly_to_rational(const Polynomial& p); // doubles are dyadic: exact

// ---------------------------------------------------------------------------
// Exact integration over a simplex.
//
// Affine map to the standard simplex, expansion in barycentric coordinates,
// then the closed-form monomial rule
//     ∫_Δ λ1^a1 ... λn^an dλ = (∏ ai!) / (n + Σ ai)!
// scaled by |det E| (the simplex volume times n!).
// ---------------------------------------------------------------------------
double integrate_polynomial_over_simplex(const Polynomial& p, const Simplex& s);

// Exact-rational mode: same rule evaluated in arbitrary-precision rationals.
// Vertices given as exact rationals (doubles convert losslessly).
mpq_class integrate_polynomial_over_simplex_exact(
    const PolynomialQ& p, const std::vector<std::vector<mpq_class>>& simplex_vertices);
std::vector<std::vector<mpq_class>> simplex_to_rational(const Simplex& s);

// ---------------------------------------------------------------------------
// 2D fast path: convex polygons as CCW vertex lists. Used by the region
// enumerator and the cdf engine where the input dimension is 2.
// ---------------------------------------------------------------------------
using Poly2 = std::vector<std::array<double, 2>>;

Poly2 box_polygon(const Box& box); // CCW rectangle
// Clips a convex CCW polygon against v'x <= c. Result is convex CCW (possibly
// empty). Points within `tol` of the line are kept.
Poly2 clip_polygon(const Poly2& poly, const std::array<double, 2>& v, double c,
                   double tol = 1e-12);
double polygon_area(const Poly2& poly);

} // namespace nncdf
