#include "nncdf/distribution.hpp"

#include "nncdf/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nncdf {

// ---------------------------------------------------------------------------
// PiecewisePolynomialPdf
// ---------------------------------------------------------------------------
double PiecewisePolynomialPdf::total_mass() const {
    double m = 0.0;
    for (const auto& [s, p] : pieces) m += integrate_polynomial_over_simplex(p, s);
    return m;
}

void validate_piecewise_pdf(const PiecewisePolynomialPdf& pdf, bool expect_normalized) {
    validate_box(pdf.support);
    if (pdf.pieces.empty()) throw config_error("piecewise pdf: no pieces");
    double vol = 0.0;
    for (const auto& [s, p] : pdf.pieces) {
        if (s.dim() != pdf.support.dim())
            throw config_error("piecewise pdf: piece dimension != support dimension");
        if (p.dim != s.dim()) throw config_error("piecewise pdf: polynomial dimension mismatch");
        vol += s.volume();
    }
    double bvol = pdf.support.volume();
    if (std::fabs(vol - bvol) > 1e-6 * std::max(1.0, bvol))
        throw config_error("piecewise pdf: piece volumes do not cover the support box");
    // Sampled nonnegativity: barycentric samples on a fixed lattice.
    for (const auto& [s, p] : pdf.pieces) {
        const std::size_t n = s.dim();
        std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
        for (int k = 0; k < 100; ++k) {
            // Random barycentric weights.
            std::vector<double> w(n + 1);
            double tot = 0.0;
            for (auto& wi : w) {
                wi = -std::log(std::max(uniform01(rng), 1e-300));
                tot += wi;
            }
            std::vector<double> x(n, 0.0);
            for (std::size_t v = 0; v <= n; ++v)
                for (std::size_t j = 0; j < n; ++j) x[j] += (w[v] / tot) * s.vertices[v][j];
            if (poly_eval(p, x) < -1e-9)
                throw config_error("piecewise pdf: negative density inside a piece");
        }
    }
    if (expect_normalized) {
        double m = pdf.total_mass();
        if (m < 1.0 - 1e-6 || m > 1.0 + 1e-6)
            throw config_error("piecewise pdf: total mass " + std::to_string(m) + " not ~1");
    }
}

// ---------------------------------------------------------------------------
// Validation / JSON
// ---------------------------------------------------------------------------
void validate_distribution(const InputDistribution& dist) {
    validate_box(dist.box);
    const std::size_t n = dist.box.dim();
    switch (dist.kind) {
        case InputDistribution::Kind::UniformBox:
            if (dist.box.volume() <= 0.0) throw config_error("uniform: box has zero volume");
            break;
        case InputDistribution::Kind::BetaProduct: {
            if (dist.shapes.size() != n)
                throw config_error("beta_product: one (alpha,beta) pair per axis required");
            for (const auto& sh : dist.shapes) {
                if (sh.alpha < 1 || sh.beta < 1)
                    throw config_error("beta_product: integer shape parameters >= 1 required");
                if (sh.alpha + sh.beta > 60)
                    throw config_error("beta_product: shape parameters too large (alpha+beta <= 60)");
            }
            for (std::size_t i = 0; i < n; ++i)
                if (dist.box.lower[i] != 0.0 || dist.box.upper[i] != 1.0)
                    throw config_error("beta_product: support box must be the unit cube");
            break;
        }
        case InputDistribution::Kind::TruncatedGaussianMixture: {
            if (dist.components.empty()) throw config_error("gaussian_mixture: no components");
            double wsum = 0.0;
            for (const auto& c : dist.components) {
                if (c.mean.size() != n || c.sigma.size() != n)
                    throw config_error("gaussian_mixture: component dimension mismatch");
                if (c.weight < 0.0) throw config_error("gaussian_mixture: negative weight");
                for (double s : c.sigma)
                    if (!(s > 0.0)) throw config_error("gaussian_mixture: sigma must be positive");
                wsum += c.weight;
            }
            if (std::fabs(wsum - 1.0) > 1e-9)
                throw config_error("gaussian_mixture: weights must sum to 1");
            break;
        }
        case InputDistribution::Kind::ExplicitPiecewisePolynomial:
            if (!dist.explicit_pdf) throw config_error("explicit: missing pdf");
            validate_piecewise_pdf(*dist.explicit_pdf, true);
            break;
    }
}

namespace {

Box parse_box(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("lower") || !j.contains("upper"))
        throw config_error("distribution JSON: box needs lower/upper arrays");
    Box b;
    for (const auto& v : j["lower"]) b.lower.push_back(v.get<double>());
    for (const auto& v : j["upper"]) b.upper.push_back(v.get<double>());
    validate_box(b);
    return b;
}

Box unit_box(std::size_t n) {
    Box b;
    b.lower.assign(n, 0.0);
    b.upper.assign(n, 1.0);
    return b;
}

} // namespace

InputDistribution parse_distribution_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("distribution JSON parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind"))
        throw config_error("distribution JSON: expected object with \"kind\"");
    const std::string kind = j["kind"].get<std::string>();
    InputDistribution d;
    if (kind == "uniform") {
        d.kind = InputDistribution::Kind::UniformBox;
        d.box = parse_box(j.at("box"));
    } else if (kind == "beta_product") {
        d.kind = InputDistribution::Kind::BetaProduct;
        if (!j.contains("shapes") || !j["shapes"].is_array())
            throw config_error("beta_product: needs a \"shapes\" array of [alpha,beta] pairs");
        for (const auto& pair : j["shapes"]) {
            if (!pair.is_array() || pair.size() != 2)
                throw config_error("beta_product: each shape must be [alpha,beta]");
            double a = pair[0].get<double>();
            double b = pair[1].get<double>();
            if (a != std::floor(a) || b != std::floor(b))
                throw config_error("beta_product: only integer shape parameters are supported");
            d.shapes.push_back({static_cast<int>(a), static_cast<int>(b)});
        }
        d.box = j.contains("box") ? parse_box(j["box"]) : unit_box(d.shapes.size());
    } else if (kind == "gaussian_mixture") {
        d.kind = InputDistribution::Kind::TruncatedGaussianMixture;
        d.box = parse_box(j.at("box"));
        const auto& w = j.at("weights");
        const auto& means = j.at("means");
        const auto& covs = j.at("covariances");
        if (w.size() != means.size() || w.size() != covs.size())
            throw config_error("gaussian_mixture: weights/means/covariances length mismatch");
        for (std::size_t c = 0; c < w.size(); ++c) {
            GaussianComponent comp;
            comp.weight = w[c].get<double>();
            for (const auto& v : means[c]) comp.mean.push_back(v.get<double>());
            const auto& cov = covs[c];
            const std::size_t n = comp.mean.size();
            if (cov.size() != n) throw config_error("gaussian_mixture: covariance must be n x n");
            comp.sigma.assign(n, 0.0);
            for (std::size_t r = 0; r < n; ++r) {
                if (cov[r].size() != n)
                    throw config_error("gaussian_mixture: covariance must be n x n");
                for (std::size_t cc = 0; cc < n; ++cc) {
                    double v = cov[r][cc].get<double>();
                    if (r == cc) {
                        if (!(v > 0.0))
                            throw config_error("gaussian_mixture: diagonal covariance entries must be positive");
                        comp.sigma[r] = std::sqrt(v);
                    } else if (v != 0.0) {
                        throw config_error(
                            "gaussian_mixture: only diagonal covariances are supported in v1");
                    }
                }
            }
            d.components.push_back(std::move(comp));
        }
    } else if (kind == "explicit") {
        d.kind = InputDistribution::Kind::ExplicitPiecewisePolynomial;
        d.box = parse_box(j.at("box"));
        auto pdf = std::make_shared<PiecewisePolynomialPdf>();
        pdf->support = d.box;
        for (const auto& jp : j.at("pieces")) {
            Simplex s;
            for (const auto& jv : jp.at("vertices")) {
                Point p;
                for (const auto& v : jv) p.push_back(v.get<double>());
                s.vertices.push_back(std::move(p));
            }
            std::vector<std::pair<std::vector<int>, double>> terms;
            for (const auto& jt : jp.at("polynomial")) {
                std::vector<int> e;
                for (const auto& v : jt.at("exponents")) e.push_back(v.get<int>());
                terms.emplace_back(std::move(e), jt.at("coefficient").get<double>());
            }
            pdf->pieces.emplace_back(std::move(s),
                                     make_polynomial<double>(d.box.dim(), std::move(terms)));
        }
        d.explicit_pdf = pdf;
    } else {
        throw config_error("distribution JSON: unknown kind \"" + kind +
                           "\" (expected uniform|beta_product|gaussian_mixture|explicit)");
    }
    validate_distribution(d);
    return d;
}

InputDistribution load_distribution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open distribution file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_distribution_json(ss.str());
}

// ---------------------------------------------------------------------------
// Density evaluation / mass
// ---------------------------------------------------------------------------
namespace {

double beta_coefficient(int alpha, int beta) {
    // 1/B(a,b) = (a+b-1)! / ((a-1)!(b-1)!), exact in double for small shapes.
    double num = 1.0;
    for (int i = 2; i <= alpha + beta - 1; ++i) num *= i;
    double den = 1.0;
    for (int i = 2; i <= alpha - 1; ++i) den *= i;
    for (int i = 2; i <= beta - 1; ++i) den *= i;
    return num / den;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * (1.0 / std::sqrt(2.0))); }

double gaussian_component_density(const GaussianComponent& c, const std::vector<double>& x) {
    double v = 1.0;
    const double inv_sqrt2pi = 0.3989422804014326779;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double z = (x[i] - c.mean[i]) / c.sigma[i];
        v *= inv_sqrt2pi / c.sigma[i] * std::exp(-0.5 * z * z);
    }
    return v;
}

} // namespace

double beta_axis_density(const BetaShape& shape, double x) {
    double f = beta_coefficient(shape.alpha, shape.beta);
    for (int k = 0; k < shape.alpha - 1; ++k) f *= x;
    for (int k = 0; k < shape.beta - 1; ++k) f *= 1.0 - x;
    return f;
}

double density_eval(const InputDistribution& dist, const std::vector<double>& x) {
    if (x.size() != dist.dim()) throw config_error("density_eval: dimension mismatch");
    switch (dist.kind) {
        case InputDistribution::Kind::UniformBox:
            return 1.0 / dist.box.volume();
        case InputDistribution::Kind::BetaProduct: {
            double v = 1.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                v *= beta_axis_density(dist.shapes[i], x[i]);
            return v;
        }
        case InputDistribution::Kind::TruncatedGaussianMixture: {
            double v = 0.0;
            for (const auto& c : dist.components)
                v += c.weight * gaussian_component_density(c, x);
            return v;
        }
        case InputDistribution::Kind::ExplicitPiecewisePolynomial: {
            // First piece whose simplex contains the point (boundaries are
            // measure zero; ties resolved by piece order).
            for (const auto& [s, p] : dist.explicit_pdf->pieces) {
                // Barycentric membership.
                const std::size_t n = s.dim();
                std::vector<std::vector<double>> M(n, std::vector<double>(n));
                std::vector<double> rhs(n);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) M[j][i] = s.vertices[i + 1][j] - s.vertices[0][j];
                    rhs[i] = x[i] - s.vertices[0][i];
                }
                // Solve M l = rhs.
                std::vector<double> l(n);
                std::vector<std::vector<double>> A = M;
                bool ok = true;
                for (std::size_t col = 0; col < n && ok; ++col) {
                    std::size_t best = col;
                    for (std::size_t r = col + 1; r < n; ++r)
                        if (std::fabs(A[r][col]) > std::fabs(A[best][col])) best = r;
                    if (std::fabs(A[best][col]) < 1e-14) { ok = false; break; }
                    std::swap(A[best], A[col]);
                    std::swap(rhs[best], rhs[col]);
                    for (std::size_t r = col + 1; r < n; ++r) {
                        double f = A[r][col] / A[col][col];
                        for (std::size_t c2 = col; c2 < n; ++c2) A[r][c2] -= f * A[col][c2];
                        rhs[r] -= f * rhs[col];
                    }
                }
                if (!ok) continue;
                for (std::size_t i = n; i-- > 0;) {
                    double sum = rhs[i];
                    for (std::size_t c2 = i + 1; c2 < n; ++c2) sum -= A[i][c2] * l[c2];
                    l[i] = sum / A[i][i];
                }
                double lsum = 0.0;
                bool inside = true;
                for (double li : l) {
                    if (li < -1e-9) inside = false;
                    lsum += li;
                }
                if (lsum > 1.0 + 1e-9) inside = false;
                if (inside) return poly_eval(p, x);
            }
            return 0.0;
        }
    }
    return 0.0;
}

double mass_on_box(const InputDistribution& dist) {
    switch (dist.kind) {
        case InputDistribution::Kind::UniformBox:
        case InputDistribution::Kind::BetaProduct:
            return 1.0;
        case InputDistribution::Kind::TruncatedGaussianMixture: {
            double m = 0.0;
            for (const auto& c : dist.components) {
                double cm = c.weight;
                for (std::size_t i = 0; i < c.mean.size(); ++i) {
                    double a = (dist.box.lower[i] - c.mean[i]) / c.sigma[i];
                    double b = (dist.box.upper[i] - c.mean[i]) / c.sigma[i];
                    cm *= normal_cdf(b) - normal_cdf(a);
                }
                m += cm;
            }
            return m;
        }
        case InputDistribution::Kind::ExplicitPiecewisePolynomial:
            return dist.explicit_pdf->total_mass();
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Exact polynomial representation
// ---------------------------------------------------------------------------
std::optional<PiecewisePolynomialPdf> pdf_as_piecewise_polynomial(
    const InputDistribution& dist) {
    validate_distribution(dist);
    const std::size_t n = dist.dim();
    switch (dist.kind) {
        case InputDistribution::Kind::UniformBox: {
            PiecewisePolynomialPdf pdf;
            pdf.support = dist.box;
            std::vector<Simplex> ss;
            kuhn_split(dist.box, ss);
            Polynomial c = poly_constant(n, 1.0 / dist.box.volume());
            for (auto& s : ss) pdf.pieces.emplace_back(std::move(s), c);
            return pdf;
        }
        case InputDistribution::Kind::BetaProduct: {
            PiecewisePolynomialPdf pdf;
            pdf.support = dist.box;
            // Product of per-axis polynomials coef * x^(a-1) * (1-x)^(b-1),
            // expanded binomially.
            Polynomial prod = poly_constant(n, 1.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& sh = dist.shapes[i];
                std::vector<std::pair<std::vector<int>, double>> terms;
                // (1-x)^(b-1) = sum_k C(b-1,k) (-x)^k
                double coef = beta_coefficient(sh.alpha, sh.beta);
                double binom = 1.0;
                for (int k = 0; k <= sh.beta - 1; ++k) {
                    std::vector<int> e(n, 0);
                    e[i] = sh.alpha - 1 + k;
                    double sign = (k % 2 == 0) ? 1.0 : -1.0;
                    terms.emplace_back(std::move(e), coef * sign * binom);
                    binom = binom * (sh.beta - 1 - k) / (k + 1);
                }
                prod = poly_mul(prod, make_polynomial<double>(n, std::move(terms)));
            }
            std::vector<Simplex> ss;
            kuhn_split(dist.box, ss);
            for (auto& s : ss) pdf.pieces.emplace_back(std::move(s), prod);
            return pdf;
        }
        case InputDistribution::Kind::TruncatedGaussianMixture:
            return std::nullopt;
        case InputDistribution::Kind::ExplicitPiecewisePolynomial:
            return *dist.explicit_pdf;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------
std::vector<double> sample(const InputDistribution& dist, std::mt19937_64& rng) {
    const std::size_t n = dist.dim();
    std::vector<double> x(n);
    switch (dist.kind) {
        case InputDistribution::Kind::UniformBox: {
            for (std::size_t i = 0; i < n; ++i)
                x[i] = dist.box.lower[i] + uniform01(rng) * (dist.box.upper[i] - dist.box.lower[i]);
            return x;
        }
        case InputDistribution::Kind::BetaProduct: {
            // Order statistics: Beta(a,b) with integer shapes is the a-th
            // smallest of a+b-1 independent uniforms.
            for (std::size_t i = 0; i < n; ++i) {
                const auto& sh = dist.shapes[i];
                const int k = sh.alpha + sh.beta - 1;
                double u[64];
                for (int j = 0; j < k; ++j) u[j] = uniform01(rng);
                std::sort(u, u + k);
                x[i] = u[sh.alpha - 1];
            }
            return x;
        }
        case InputDistribution::Kind::TruncatedGaussianMixture: {
            for (long attempt = 0; attempt < 1000000; ++attempt) {
                double uw = uniform01(rng);
                std::size_t ci = 0;
                double acc = 0.0;
                for (std::size_t c = 0; c < dist.components.size(); ++c) {
                    acc += dist.components[c].weight;
                    if (uw <= acc || c + 1 == dist.components.size()) {
                        ci = c;
                        break;
                    }
                }
                const auto& comp = dist.components[ci];
                bool inside = true;
                for (std::size_t i = 0; i < n; ++i) {
                    // Box-Muller with explicit formulas (portable bits).
                    double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
                    double u2 = uniform01(rng);
                    double z = std::sqrt(-2.0 * std::log(u1)) *
                               std::cos(2.0 * 3.14159265358979323846 * u2);
                    x[i] = comp.mean[i] + comp.sigma[i] * z;
                    if (x[i] < dist.box.lower[i] || x[i] > dist.box.upper[i]) inside = false;
                }
                if (inside) return x;
            }
            throw internal_error("gaussian_mixture sampling: rejection loop exhausted "
                                 "(mass on box too small)");
        }
        case InputDistribution::Kind::ExplicitPiecewisePolynomial:
            throw config_error("sampling an explicit piecewise-polynomial pdf is not supported");
    }
    return x;
}

} // namespace nncdf
