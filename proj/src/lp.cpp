#include "wipmf/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace wipmf {

namespace {

// Tableau rows 0..m-1 are constraints, row m is the objective (reduced costs,
// minimization form). Column n is the right-hand side.
struct Tableau {
    Matrix T;
    std::vector<int> basis;
    int m = 0, n = 0;

    void pivot(int r, int c) {
        T.row(r) /= T(r, c);
        for (int i = 0; i <= m; ++i)
            if (i != r && T(i, c) != 0.0) T.row(i) -= T(i, c) * T.row(r);
        basis[r] = c;
    }

    // Returns false if unbounded. Columns >= allowed are never entered.
    bool run(int allowed, double tol) {
        for (std::size_t iter = 0; iter < 100000; ++iter) {
            int enter = -1;
            for (int j = 0; j < allowed; ++j)
                if (T(m, j) < -tol) {
                    enter = j;
                    break;
                }
            if (enter < 0) return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (T(i, enter) > tol) {
                    const double ratio = T(i, n) / T(i, enter);
                    if (ratio < best - tol || (std::abs(ratio - best) <= tol && basis[i] < basis[leave])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
        throw Error("simplex iteration limit reached");
    }
};

} // namespace

LpResult lp_maximize(const Vector& c, const Matrix& A, const Vector& b, double tol) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    Tableau tb;
    tb.m = m;
    tb.n = n + m;
    tb.T = Matrix::Zero(m + 1, n + m + 1);
    tb.basis.resize(m);
    for (int i = 0; i < m; ++i) {
        const double sgn = b(i) < 0.0 ? -1.0 : 1.0;
        tb.T.row(i).head(n) = sgn * A.row(i);
        tb.T(i, n + i) = 1.0;
        tb.T(i, n + m) = sgn * b(i);
        tb.basis[i] = n + i;
    }
    // Phase 1: minimize the sum of artificials.
    for (int i = 0; i < m; ++i) tb.T.row(m) -= tb.T.row(i);
    for (int i = 0; i < m; ++i) tb.T(m, n + i) = 0.0;
    tb.run(n, tol);
    LpResult res;
    if (-tb.T(m, n + m) > 1e-9) return res;
    // Drive remaining artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
        if (tb.basis[i] < n) continue;
        for (int j = 0; j < n; ++j)
            if (std::abs(tb.T(i, j)) > 1e-9) {
                tb.pivot(i, j);
                break;
            }
    }
    // Phase 2 objective: minimize -c.
    tb.T.row(m).setZero();
    tb.T.row(m).head(n) = -c.transpose();
    for (int i = 0; i < m; ++i) {
        const int j = tb.basis[i];
        if (j < n && tb.T(m, j) != 0.0) tb.T.row(m) -= tb.T(m, j) * tb.T.row(i);
    }
    if (!tb.run(n, tol)) {
        res.status = LpStatus::unbounded;
        return res;
    }
    res.status = LpStatus::optimal;
    res.x = Vector::Zero(n);
    for (int i = 0; i < m; ++i)
        if (tb.basis[i] < n) res.x(tb.basis[i]) = tb.T(i, n + m);
    res.value = c.dot(res.x);
    return res;
}

} // namespace wipmf
