#include "nncdf/lp.hpp"

#include "nncdf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nncdf {

namespace {

// Dense tableau for  min d'v  s.t.  T v = rhs, v >= 0  with an identity
// starting basis. Rows: m constraint rows. Columns: ncols variables + rhs.
struct Tableau {
    std::size_t m = 0;
    std::size_t ncols = 0;
    std::vector<std::vector<double>> row; // m x (ncols+1); row[i][ncols] = rhs
    std::vector<double> obj;              // reduced costs, size ncols+1 (last = -objval)
    std::vector<int> basis;               // basic column per row

    void pivot(std::size_t pr, std::size_t pc) {
        double piv = row[pr][pc];
        double inv = 1.0 / piv;
        for (double& t : row[pr]) t *= inv;
        row[pr][pc] = 1.0; // kill residual rounding on the pivot itself
        for (std::size_t i = 0; i < m; ++i) {
            if (i == pr) continue;
            double f = row[i][pc];
            if (f == 0.0) continue;
            auto& ri = row[i];
            const auto& rp = row[pr];
            for (std::size_t j = 0; j <= ncols; ++j) ri[j] -= f * rp[j];
            ri[pc] = 0.0;
        }
        double f = obj[pc];
        if (f != 0.0) {
            const auto& rp = row[pr];
            for (std::size_t j = 0; j <= ncols; ++j) obj[j] -= f * rp[j];
            obj[pc] = 0.0;
        }
        basis[pr] = static_cast<int>(pc);
    }

    // Rebuilds the reduced-cost row for objective d (size ncols).
    void set_objective(const std::vector<double>& d) {
        obj.assign(ncols + 1, 0.0);
        for (std::size_t j = 0; j < ncols; ++j) obj[j] = d[j];
        for (std::size_t i = 0; i < m; ++i) {
            double f = d[static_cast<std::size_t>(basis[i])];
            if (f == 0.0) continue;
            const auto& rp = row[i];
            for (std::size_t j = 0; j <= ncols; ++j) obj[j] -= f * rp[j];
        }
    }

    // Minimizes the current objective. allowed[j] = false excludes a column.
    // Returns Optimal, Unbounded or IterationLimit.
    LpResult::Status run(const std::vector<char>& allowed, double tol) {
        const std::size_t bland_after = 50 + 4 * (m + ncols);
        const std::size_t max_iter = 2000 + 40 * (m + ncols);
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            // Entering column: Dantzig first, Bland once iterations pile up.
            std::size_t pc = ncols;
            if (iter < bland_after) {
                double best = -tol;
                for (std::size_t j = 0; j < ncols; ++j)
                    if (allowed[j] && obj[j] < best) { best = obj[j]; pc = j; }
            } else {
                for (std::size_t j = 0; j < ncols; ++j)
                    if (allowed[j] && obj[j] < -tol) { pc = j; break; }
            }
            if (pc == ncols) return LpResult::Status::Optimal;

            // Ratio test; Bland tie-break on the smallest basic index.
            std::size_t pr = m;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                double a = row[i][pc];
                if (a <= 1e-11) continue;
                double ratio = row[i][ncols] / a;
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && pr < m && basis[i] < basis[pr])) {
                    best_ratio = ratio;
                    pr = i;
                }
            }
            if (pr == m) return LpResult::Status::Unbounded;
            pivot(pr, pc);
        }
        return LpResult::Status::IterationLimit;
    }
};

} // namespace

LpResult lp_solve(const std::vector<std::vector<double>>& A,
                  const std::vector<double>& b,
                  const std::vector<double>& c,
                  double tol) {
    const std::size_t m = A.size();
    const std::size_t n = c.size();
    for (const auto& r : A)
        if (r.size() != n) throw config_error("lp_solve: row width does not match objective length");
    if (b.size() != m) throw config_error("lp_solve: rhs length does not match row count");

    LpResult res;
    if (m == 0) {
        // No constraints: optimum exists only for a zero objective.
        bool zero = std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
        res.status = zero ? LpResult::Status::Optimal : LpResult::Status::Unbounded;
        res.x.assign(n, 0.0);
        res.value = 0.0;
        return res;
    }

    // Variables: u (n), w (n) with x = u - w; slack s (m); artificials for
    // rows whose rhs is negative after slack insertion.
    std::size_t n_art = 0;
    for (double bi : b)
        if (bi < 0.0) ++n_art;
    const std::size_t ncols = 2 * n + m + n_art;

    Tableau t;
    t.m = m;
    t.ncols = ncols;
    t.row.assign(m, std::vector<double>(ncols + 1, 0.0));
    t.basis.assign(m, 0);

    std::size_t art = 2 * n + m;
    for (std::size_t i = 0; i < m; ++i) {
        double sgn = b[i] < 0.0 ? -1.0 : 1.0;
        auto& r = t.row[i];
        for (std::size_t j = 0; j < n; ++j) {
            r[j] = sgn * A[i][j];
            r[n + j] = -sgn * A[i][j];
        }
        r[2 * n + i] = sgn; // slack
        r[ncols] = sgn * b[i];
        if (b[i] < 0.0) {
            r[art] = 1.0;
            t.basis[i] = static_cast<int>(art);
            ++art;
        } else {
            t.basis[i] = static_cast<int>(2 * n + i);
        }
    }

    std::vector<char> allowed(ncols, 1);

    if (n_art > 0) {
        // Phase 1: minimize the sum of artificials.
        std::vector<double> d(ncols, 0.0);
        for (std::size_t j = 2 * n + m; j < ncols; ++j) d[j] = 1.0;
        t.set_objective(d);
        LpResult::Status st = t.run(allowed, tol);
        if (st == LpResult::Status::IterationLimit) {
            res.status = st;
            return res;
        }
        double phase1 = -t.obj[ncols]; // obj row stores -objval in the rhs slot
        if (st == LpResult::Status::Unbounded || phase1 > tol) {
            res.status = LpResult::Status::Infeasible;
            return res;
        }
        // Artificials may stay basic at zero; forbid them from re-entering.
        for (std::size_t j = 2 * n + m; j < ncols; ++j) allowed[j] = 0;
    }

    // Phase 2: minimize -c'(u - w).
    std::vector<double> d(ncols, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = -c[j];
        d[n + j] = c[j];
    }
    t.set_objective(d);
    LpResult::Status st = t.run(allowed, tol);
    res.status = st;
    if (st != LpResult::Status::Optimal) return res;

    std::vector<double> v(ncols, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        v[static_cast<std::size_t>(t.basis[i])] = t.row[i][ncols];
    res.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) res.x[j] = v[j] - v[n + j];
    res.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.value += c[j] * res.x[j];
    return res;
}

LpResult chebyshev_center(const std::vector<std::vector<double>>& A,
                          const std::vector<double>& b,
                          double tol) {
    const std::size_t m = A.size();
    const std::size_t n = m == 0 ? 0 : A[0].size();
    std::vector<std::vector<double>> A2(m);
    for (std::size_t i = 0; i < m; ++i) {
        double norm = 0.0;
        for (double v : A[i]) norm += v * v;
        norm = std::sqrt(norm);
        A2[i] = A[i];
        A2[i].push_back(norm);
    }
    std::vector<double> c(n + 1, 0.0);
    c[n] = 1.0;
    LpResult r = lp_solve(A2, b, c, tol);
    if (r.status == LpResult::Status::Optimal && r.value < 0.0 && r.value >= -tol) {
        // Numerically squeezed but feasible: clamp the radius at zero.
        r.value = 0.0;
    } else if (r.status == LpResult::Status::Optimal && r.value < -tol) {
        r.status = LpResult::Status::Infeasible;
    }
    return r;
}

} // namespace nncdf
