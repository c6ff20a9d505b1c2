#include "nncdf/errors.hpp"
#include "nncdf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nncdf {

// ---------------------------------------------------------------------------
// Polynomial plumbing
// ---------------------------------------------------------------------------
template <typename T>
PolynomialT<T> make_polynomial(std::size_t dim,
                               std::vector<std::pair<std::vector<int>, T>> terms) {
    std::map<std::vector<int>, T> acc;
    for (auto& [e, c] : terms) {
        if (e.size() != dim) throw config_error("polynomial: exponent length != dim");
        for (int k : e)
            if (k < 0) throw config_error("polynomial: negative exponent");
        auto it = acc.find(e);
        if (it == acc.end())
            acc.emplace(std::move(e), std::move(c));
        else
            it->second += c;
    }
    PolynomialT<T> p;
    p.dim = dim;
    for (auto& [e, c] : acc)
        if (!(c == T(0))) p.terms.emplace_back(e, c);
    return p;
}

template PolynomialT<double> make_polynomial<double>(std::size_t,
    std::vector<std::pair<std::vector<int>, double>>);
template PolynomialT<mpq_class> make_polynomial<mpq_class>(std::size_t,
    std::vector<std::pair<std::vector<int>, mpq_class>>);

Polynomial poly_constant(std::size_t dim, double value) {
    return make_polynomial<double>(dim, {{std::vector<int>(dim, 0), value}});
}

Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
    if (a.dim != b.dim) throw config_error("poly_add: dimension mismatch");
    auto terms = a.terms;
    terms.insert(terms.end(), b.terms.begin(), b.terms.end());
    return make_polynomial<double>(a.dim, std::move(terms));
}

namespace {
template <typename T>
PolynomialT<T> poly_mul_t(const PolynomialT<T>& a, const PolynomialT<T>& b) {
    if (a.dim != b.dim) throw config_error("poly_mul: dimension mismatch");
    std::vector<std::pair<std::vector<int>, T>> terms;
    terms.reserve(a.terms.size() * b.terms.size());
    for (const auto& [ea, ca] : a.terms) {
        for (const auto& [eb, cb] : b.terms) {
            std::vector<int> e(a.dim);
            for (std::size_t i = 0; i < a.dim; ++i) e[i] = ea[i] + eb[i];
            terms.emplace_back(std::move(e), ca * cb);
        }
    }
    return make_polynomial<T>(a.dim, std::move(terms));
}
} // namespace

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) { return poly_mul_t(a, b); }

double poly_eval(const Polynomial& p, const Point& x) {
    if (x.size() != p.dim) throw config_error("poly_eval: dimension mismatch");
    double s = 0.0;
    for (const auto& [e, c] : p.terms) {
        double t = c;
        for (std::size_t i = 0; i < p.dim; ++i)
            for (int k = 0; k < e[i]; ++k) t *= x[i];
        s += t;
    }
    return s;
}

PolynomialQ poly_to_rational(const Polynomial& p) {
    PolynomialQ q;
    q.dim = p.dim;
    for (const auto& [e, c] : p.terms) q.terms.emplace_back(e, mpq_class(c));
    return q;
}

// ---------------------------------------------------------------------------
// Integration: substitute x = v0 + E*l, expand, apply the monomial rule
//     ∫_Δ l1^b1 ... ln^bn dl = (∏ bi!) / (n + Σ bi)!
// then scale by |det E|.
// ---------------------------------------------------------------------------
namespace {

// p(v0 + E*l) where E has p.dim rows and `newdim` columns.
template <typename T>
PolynomialT<T> substitute_affine(const PolynomialT<T>& p,
                                 const std::vector<T>& v0,
                                 const std::vector<std::vector<T>>& E,
                                 std::size_t newdim) {
    // Linear form per original variable.
    std::vector<PolynomialT<T>> lin(p.dim);
    for (std::size_t j = 0; j < p.dim; ++j) {
        std::vector<std::pair<std::vector<int>, T>> terms;
        terms.emplace_back(std::vector<int>(newdim, 0), v0[j]);
        for (std::size_t i = 0; i < newdim; ++i) {
            std::vector<int> e(newdim, 0);
            e[i] = 1;
            terms.emplace_back(std::move(e), E[j][i]);
        }
        lin[j] = make_polynomial<T>(newdim, std::move(terms));
    }
    // Cache powers lin[j]^k up to the largest exponent used.
    std::vector<int> maxe(p.dim, 0);
    for (const auto& [e, c] : p.terms)
        for (std::size_t j = 0; j < p.dim; ++j) maxe[j] = std::max(maxe[j], e[j]);
    std::vector<std::vector<PolynomialT<T>>> pow(p.dim);
    for (std::size_t j = 0; j < p.dim; ++j) {
        pow[j].resize(static_cast<std::size_t>(maxe[j]) + 1);
        pow[j][0] = make_polynomial<T>(newdim, {{std::vector<int>(newdim, 0), T(1)}});
        for (int k = 1; k <= maxe[j]; ++k) pow[j][k] = poly_mul_t(pow[j][k - 1], lin[j]);
    }
    std::vector<std::pair<std::vector<int>, T>> out;
    for (const auto& [e, c] : p.terms) {
        PolynomialT<T> t = make_polynomial<T>(newdim, {{std::vector<int>(newdim, 0), c}});
        for (std::size_t j = 0; j < p.dim; ++j)
            if (e[j] > 0) t = poly_mul_t(t, pow[j][e[j]]);
        out.insert(out.end(), t.terms.begin(), t.terms.end());
    }
    return make_polynomial<T>(newdim, std::move(out));
}

mpz_class factorial_z(unsigned k) {
    mpz_class f = 1;
    for (unsigned i = 2; i <= k; ++i) f *= i;
    return f;
}

double factorial_d_local(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return f;
}

template <typename T>
T edge_det_t(const std::vector<std::vector<T>>& vs);

template <>
double edge_det_t<double>(const std::vector<std::vector<double>>& vs) {
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

template <>
mpq_class edge_det_t<mpq_class>(const std::vector<std::vector<mpq_class>>& vs) {
    const std::size_t n = vs.size() - 1;
    std::vector<std::vector<mpq_class>> M(n, std::vector<mpq_class>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M[i][j] = vs[i + 1][j] - vs[0][j];
    mpq_class det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && M[piv][col] == 0) ++piv;
        if (piv == n) return mpq_class(0);
        if (piv != col) {
            std::swap(M[piv], M[col]);
            det = -det;
        }
        det *= M[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (M[r][col] == 0) continue;
            mpq_class f = M[r][col] / M[col][col];
            for (std::size_t c2 = col; c2 < n; ++c2) M[r][c2] -= f * M[col][c2];
        }
    }
    return det;
}

} // namespace

double integrate_polynomial_over_simplex(const Polynomial& p, const Simplex& s) {
    const std::size_t n = s.dim();
    if (p.dim != n) throw config_error("integrate: polynomial/simplex dimension mismatch");
    if (s.vertices.size() != n + 1) throw config_error("integrate: simplex needs n+1 vertices");
    if (s.degenerate()) throw config_error("integrate: degenerate simplex");

    std::vector<double> v0 = s.vertices[0];
    std::vector<std::vector<double>> E(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) E[j][i] = s.vertices[i + 1][j] - s.vertices[0][j];

    Polynomial q = substitute_affine<double>(p, v0, E, n);
    double det = std::fabs(edge_det_t<double>(s.vertices));

    double sum = 0.0;
    for (const auto& [e, c] : q.terms) {
        unsigned total = 0;
        double num = 1.0;
        for (int k : e) {
            num *= factorial_d_local(k);
            total += static_cast<unsigned>(k);
        }
        sum += c * num / factorial_d_local(static_cast<int>(total + n));
    }
    return det * sum;
}

std::vector<std::vector<mpq_class>> simplex_to_rational(const Simplex& s) {
    std::vector<std::vector<mpq_class>> out;
    out.reserve(s.vertices.size());
    for (const auto& v : s.vertices) {
        std::vector<mpq_class> r;
        r.reserve(v.size());
        for (double x : v) r.emplace_back(x); // doubles are dyadic rationals
        out.push_back(std::move(r));
    }
    return out;
}

mpq_class integrate_polynomial_over_simplex_exact(
    const PolynomialQ& p, const std::vector<std::vector<mpq_class>>& vs) {
    if (vs.empty()) throw config_error("integrate_exact: empty simplex");
    const std::size_t n = vs[0].size();
    if (p.dim != n) throw config_error("integrate_exact: dimension mismatch");
    if (vs.size() != n + 1) throw config_error("integrate_exact: simplex needs n+1 vertices");

    std::vector<mpq_class> v0 = vs[0];
    std::vector<std::vector<mpq_class>> E(n, std::vector<mpq_class>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) E[j][i] = vs[i + 1][j] - vs[0][j];

    mpq_class det = edge_det_t<mpq_class>(vs);
    if (det == 0) throw config_error("integrate_exact: degenerate simplex");
    if (det < 0) det = -det;

    PolynomialQ q = substitute_affine<mpq_class>(p, v0, E, n);
    mpq_class sum = 0;
    for (const auto& [e, c] : q.terms) {
        unsigned total = 0;
        mpz_class num = 1;
        for (int k : e) {
            num *= factorial_z(static_cast<unsigned>(k));
            total += static_cast<unsigned>(k);
        }
        mpq_class term = c * mpq_class(num) / mpq_class(factorial_z(total + static_cast<unsigned>(n)));
        sum += term;
    }
    mpq_class out = det * sum;
    out.canonicalize();
    return out;
}

} // namespace nncdf
