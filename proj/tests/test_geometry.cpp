#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nncdf/errors.hpp"
#include "nncdf/geometry.hpp"
#include "oracles.hpp"

using namespace nncdf;

namespace {

bool point_sets_match(const std::vector<Point>& a, const std::vector<Point>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t c = 0; c < a[i].size(); ++c)
            if (std::fabs(a[i][c] - b[i][c]) > tol) return false;
    return true;
}

}  // namespace

TEST_CASE("intersect: unit square with x+y <= 0.5 gives the corner triangle") {
    HPolytope square{box_halfspaces(Box{{0.0, 0.0}, {1.0, 1.0}})};
    const auto cut = intersect(square, {Halfspace{{1.0, 1.0}, 0.5}});
    REQUIRE(cut.has_value());
    auto verts = vertices(*cut, Box{{0.0, 0.0}, {1.0, 1.0}});
    REQUIRE(verts.size() == 3);
    // Lexicographic order: (0,0), (0,0.5), (0.5,0).
    CHECK(point_sets_match(verts, {{0.0, 0.0}, {0.0, 0.5}, {0.5, 0.0}}, 1e-9));
}

TEST_CASE("intersect: disjoint halfspace yields empty") {
    HPolytope square{box_halfspaces(Box{{0.0, 0.0}, {1.0, 1.0}})};
    CHECK_FALSE(intersect(square, {Halfspace{{-1.0, 0.0}, -2.0}}).has_value());
}

TEST_CASE("intersect: membership oracle agreement on sampled points") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 5; ++rep) {
        HPolytope poly{box_halfspaces(Box{{-1.0, -1.0}, {1.0, 1.0}})};
        std::vector<Halfspace> extra;
        for (int k = 0; k < 4; ++k) {
            Halfspace h{{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)},
                        oracle::uniform(rng, 0.1, 0.8)};
            if (std::fabs(h.normal[0]) + std::fabs(h.normal[1]) < 0.1) continue;
            extra.push_back(h);
        }
        const auto cut = intersect(poly, extra);
        for (int s = 0; s < 10000; ++s) {
            const Point x{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)};
            bool in_all = true;
            for (const auto& h : poly.halfspaces)
                if (h.eval(x) > 1e-12) in_all = false;
            for (const auto& h : extra)
                if (h.eval(x) > 1e-12) in_all = false;
            if (!cut.has_value()) {
                CHECK_FALSE(in_all);
                continue;
            }
            // Clearly-inside points must be kept; boundary-tolerance fuzz is
            // allowed on the reduced representation.
            if (in_all) CHECK(cut->contains(x, 1e-7));
        }
    }
}

TEST_CASE("vertices: 1D segment endpoints") {
    HPolytope seg{{Halfspace{{1.0}, 1.0}, Halfspace{{-1.0}, 0.0}}};
    const auto verts = vertices(seg, Box{{-5.0}, {5.0}});
    REQUIRE(verts.size() == 2);
    CHECK(verts[0][0] == doctest::Approx(0.0));
    CHECK(verts[1][0] == doctest::Approx(1.0));
}

TEST_CASE("vertices: random 2D polytopes match pair-enumeration oracle") {
    std::mt19937_64 rng(29);
    const Box box{{-1.0, -1.0}, {1.0, 1.0}};
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Halfspace> rows = box_halfspaces(box);
        for (int k = 0; k < 5; ++k) {
            const double ang = oracle::uniform(rng, 0.0, 2.0 * M_PI);
            rows.push_back(
                Halfspace{{std::cos(ang), std::sin(ang)}, oracle::uniform(rng, 0.2, 0.9)});
        }
        const auto expected = oracle::vertices_2d_bruteforce(rows);
        const auto got = vertices(HPolytope{rows}, box);
        INFO("rep ", rep, ": got ", got.size(), " vertices, expected ", expected.size());
        CHECK(point_sets_match(got, expected, 1e-6));
    }
}

TEST_CASE("triangulate: unit square corners") {
    const auto tri = triangulate({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK_FALSE(tri.degenerate);
    CHECK(tri.simplices.size() == 2);
    double vol = 0.0;
    for (const auto& s : tri.simplices) vol += s.volume();
    CHECK(vol == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("triangulate: collinear points are degenerate with zero measure") {
    const auto tri = triangulate({{0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}});
    CHECK(tri.degenerate);
    CHECK(tri.simplices.empty());
}

TEST_CASE("triangulate: 3D hull volume matches brute-force facet oracle") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<Point> pts;
        for (int i = 0; i < 20; ++i)
            pts.push_back({oracle::uniform(rng, 0, 1), oracle::uniform(rng, 0, 1),
                           oracle::uniform(rng, 0, 1)});
        const auto tri = triangulate(pts);
        REQUIRE_FALSE(tri.degenerate);
        double vol = 0.0;
        for (const auto& s : tri.simplices) vol += s.volume();
        CHECK(vol == doctest::Approx(oracle::hull_volume_3d_bruteforce(pts)).epsilon(1e-9));
    }
}

TEST_CASE("triangulation determinism: identical runs give identical simplices") {
    std::mt19937_64 rng(37);
    std::vector<Point> pts;
    for (int i = 0; i < 12; ++i)
        pts.push_back({oracle::uniform(rng, 0, 1), oracle::uniform(rng, 0, 1)});
    const auto a = triangulate(pts);
    const auto b = triangulate(pts);
    REQUIRE(a.simplices.size() == b.simplices.size());
    for (std::size_t i = 0; i < a.simplices.size(); ++i)
        CHECK(a.simplices[i].vertices == b.simplices[i].vertices);
}

TEST_CASE("kuhn_split: dim! simplices tiling the box") {
    std::vector<Simplex> out;
    kuhn_split(Box{{0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}}, out);
    CHECK(out.size() == 6);
    double vol = 0.0;
    for (const auto& s : out) vol += s.volume();
    CHECK(vol == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("simplex_halfspaces: standard simplex rows contain exactly the simplex") {
    Simplex s{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    const auto rows = simplex_halfspaces(s);
    REQUIRE(rows.size() == 3);
    std::mt19937_64 rng(41);
    for (int i = 0; i < 2000; ++i) {
        const Point x{oracle::uniform(rng, -0.2, 1.2), oracle::uniform(rng, -0.2, 1.2)};
        const bool inside = x[0] >= -1e-12 && x[1] >= -1e-12 && x[0] + x[1] <= 1.0 + 1e-12;
        bool in_rows = true;
        for (const auto& h : rows)
            if (h.eval(x) > 1e-9) in_rows = false;
        if (inside)
            CHECK(in_rows);
        else if (x[0] < -1e-6 || x[1] < -1e-6 || x[0] + x[1] > 1.0 + 1e-6)
            CHECK_FALSE(in_rows);
    }
    Simplex degenerate{{{0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}}};
    CHECK_THROWS_AS((void)simplex_halfspaces(degenerate), config_error);
}

TEST_CASE("integrate: constants and moments over the standard simplex") {
    Simplex s{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    CHECK(integrate_polynomial_over_simplex(poly_constant(2, 1.0), s) ==
          doctest::Approx(0.5).epsilon(1e-14));
    const auto x1 = make_polynomial<double>(2, {{{1, 0}, 1.0}});
    CHECK(integrate_polynomial_over_simplex(x1, s) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("integrate: random polynomials match the quadrature oracle") {
    std::mt19937_64 rng(43);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t dim = 1 + rep % 3;
        const auto p = oracle::random_polynomial(dim, 4, rng);
        const auto s = oracle::random_simplex(dim, -1.0, 1.0, rng);
        const double got = integrate_polynomial_over_simplex(p, s);
        const double want = oracle::integrate_quadrature(p, s);
        CHECK(got == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("integrate: rational mode equals symbolic antiderivative oracle exactly") {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t dim = 1 + rep % 3;
        const auto p = oracle::random_polynomial(dim, 4, rng);
        const auto pq = poly_to_rational(p);
        // Standard simplex: integrate_polynomial_over_simplex_exact maps onto
        // it, and the symbolic oracle integrates over it directly.
        std::vector<std::vector<mpq_class>> verts(dim + 1,
                                                  std::vector<mpq_class>(dim, 0));
        for (std::size_t i = 0; i < dim; ++i) verts[i + 1][i] = 1;
        const mpq_class got = integrate_polynomial_over_simplex_exact(pq, verts);
        const mpq_class want = oracle::integrate_standard_simplex_symbolic(pq);
        CHECK(got == want);
    }
}

TEST_CASE("integrate: additivity under re-triangulation") {
    std::mt19937_64 rng(53);
    const auto p = oracle::random_polynomial(2, 3, rng);
    // Split the unit square two different ways; integrals must agree.
    const auto t1 = triangulate({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    Simplex a{{{0, 0}, {1, 0}, {0.3, 0.7}}}, b{{{1, 0}, {1, 1}, {0.3, 0.7}}},
        c{{{1, 1}, {0, 1}, {0.3, 0.7}}}, d{{{0, 1}, {0, 0}, {0.3, 0.7}}};
    double i1 = 0.0, i2 = 0.0;
    for (const auto& s : t1.simplices) i1 += integrate_polynomial_over_simplex(p, s);
    for (const auto& s : {a, b, c, d}) i2 += integrate_polynomial_over_simplex(p, s);
    CHECK(i1 == doctest::Approx(i2).epsilon(1e-9));
}

TEST_CASE("integrate: affine change of variables") {
    std::mt19937_64 rng(59);
    const auto p = oracle::random_polynomial(2, 3, rng);
    const Simplex s = oracle::random_simplex(2, 0.0, 1.0, rng);
    // A x + t with A = [[2, 1], [0, 1.5]], t = (0.3, -0.2); det A = 3.
    const auto apply = [](const Point& x) {
        return Point{2.0 * x[0] + 1.0 * x[1] + 0.3, 1.5 * x[1] - 0.2};
    };
    Simplex mapped;
    for (const auto& v : s.vertices) mapped.vertices.push_back(apply(v));
    // p composed with the affine map, built term by term.
    const auto xa = make_polynomial<double>(2, {{{1, 0}, 2.0}, {{0, 1}, 1.0}, {{0, 0}, 0.3}});
    const auto xb = make_polynomial<double>(2, {{{0, 1}, 1.5}, {{0, 0}, -0.2}});
    Polynomial composed = poly_constant(2, 0.0);
    for (const auto& [e, coef] : p.terms) {
        Polynomial term = poly_constant(2, coef);
        for (int k = 0; k < e[0]; ++k) term = poly_mul(term, xa);
        for (int k = 0; k < e[1]; ++k) term = poly_mul(term, xb);
        composed = poly_add(composed, term);
    }
    const double lhs = integrate_polynomial_over_simplex(p, mapped);
    const double rhs = 3.0 * integrate_polynomial_over_simplex(composed, s);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("integrate: linearity is exact in rational mode") {
    std::mt19937_64 rng(61);
    const auto p = poly_to_rational(oracle::random_polynomial(2, 4, rng));
    const auto q = poly_to_rational(oracle::random_polynomial(2, 4, rng));
    const auto s = oracle::random_simplex(2, -1.0, 1.0, rng);
    const auto verts = simplex_to_rational(s);
    // 3p + 2q, assembled in rational arithmetic.
    PolynomialQ combo;
    combo.dim = 2;
    std::vector<std::pair<std::vector<int>, mpq_class>> terms;
    for (const auto& [e, c] : p.terms) terms.emplace_back(e, mpq_class(3) * c);
    for (const auto& [e, c] : q.terms) terms.emplace_back(e, mpq_class(2) * c);
    combo = make_polynomial<mpq_class>(2, std::move(terms));
    const mpq_class lhs = integrate_polynomial_over_simplex_exact(combo, verts);
    const mpq_class rhs = mpq_class(3) * integrate_polynomial_over_simplex_exact(p, verts) +
                          mpq_class(2) * integrate_polynomial_over_simplex_exact(q, verts);
    CHECK(lhs == rhs);
}

TEST_CASE("clip_polygon: square against a diagonal") {
    const Poly2 square = box_polygon(Box{{0.0, 0.0}, {1.0, 1.0}});
    const Poly2 cut = clip_polygon(square, {1.0, 1.0}, 0.5);
    CHECK(polygon_area(cut) == doctest::Approx(0.125).epsilon(1e-12));
    const Poly2 gone = clip_polygon(square, {1.0, 0.0}, -0.5);
    CHECK(gone.empty());
}
