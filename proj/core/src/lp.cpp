#include "varinfer/lp.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace varinfer {

namespace {

constexpr double kEps = 1e-11;

struct Tableau {
    // rows: m constraints plus objective row at index m
    Matrix t;
    std::vector<int> basis;
    int m;
    int n;

    void pivot(int row, int col) {
        t.row(row) /= t(row, col);
        for (int r = 0; r <= m; ++r) {
            if (r != row && std::abs(t(r, col)) > 0.0) {
                t.row(r) -= t(r, col) * t.row(row);
            }
        }
        basis[static_cast<std::size_t>(row)] = col;
    }

    // Bland's rule: entering = lowest-index column with negative reduced
    // cost; leaving = lowest-index basic variable among the min ratios.
    LpStatus iterate(int max_iter) {
        for (int iter = 0; iter < max_iter; ++iter) {
            int col = -1;
            for (int j = 0; j < n; ++j) {
                if (t(m, j) < -kEps) {
                    col = j;
                    break;
                }
            }
            if (col < 0) return LpStatus::optimal;
            int row = -1;
            double best_ratio = 0.0;
            for (int r = 0; r < m; ++r) {
                if (t(r, col) > kEps) {
                    const double ratio = t(r, n) / t(r, col);
                    if (row < 0 || ratio < best_ratio - kEps ||
                        (ratio < best_ratio + kEps &&
                         basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(row)])) {
                        row = r;
                        best_ratio = ratio;
                    }
                }
            }
            if (row < 0) return LpStatus::unbounded;
            pivot(row, col);
        }
        return LpStatus::iteration_limit;
    }
};

}  // namespace

LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& c, int max_iter) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (b.size() != m || c.size() != n) throw DimensionMismatch("solve_lp: shape mismatch");
    if (max_iter <= 0) max_iter = 200 * (m + n) + 1000;

    // phase 1: artificial variables, rows flipped so b >= 0
    Tableau tab;
    tab.m = m;
    tab.n = n + m;
    tab.t = Matrix::Zero(m + 1, tab.n + 1);
    for (int r = 0; r < m; ++r) {
        const double s = b(r) < 0.0 ? -1.0 : 1.0;
        tab.t.block(r, 0, 1, n) = s * a.row(r);
        tab.t(r, n + r) = 1.0;
        tab.t(r, tab.n) = s * b(r);
        tab.basis.push_back(n + r);
    }
    // phase-1 objective: sum of artificials, expressed in the current basis
    for (int j = 0; j <= tab.n; ++j) {
        if (j >= n && j < tab.n) continue;
        double s = 0.0;
        for (int r = 0; r < m; ++r) s += tab.t(r, j);
        tab.t(m, j) = -s;
    }
    LpStatus st = tab.iterate(max_iter);
    if (st != LpStatus::optimal) return {st, Vector::Zero(n), 0.0};
    if (std::abs(tab.t(m, tab.n)) > 1e-7) return {LpStatus::infeasible, Vector::Zero(n), 0.0};

    // drive any artificial still in the basis out (or drop a redundant row)
    for (int r = 0; r < m; ++r) {
        if (tab.basis[static_cast<std::size_t>(r)] >= n) {
            int col = -1;
            for (int j = 0; j < n; ++j) {
                if (std::abs(tab.t(r, j)) > 1e-9) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) tab.pivot(r, col);
        }
    }

    // phase 2: restore the real objective over the retained columns
    Matrix t2 = Matrix::Zero(m + 1, n + 1);
    t2.block(0, 0, m, n) = tab.t.block(0, 0, m, n);
    t2.col(n).head(m) = tab.t.col(tab.n).head(m);
    Tableau phase2{std::move(t2), tab.basis, m, n};
    for (int j = 0; j < n; ++j) phase2.t(m, j) = c(j);
    for (int r = 0; r < m; ++r) {
        const int bj = phase2.basis[static_cast<std::size_t>(r)];
        if (bj < n && std::abs(c(bj)) > 0.0) phase2.t.row(m) -= c(bj) * phase2.t.row(r);
    }
    st = phase2.iterate(max_iter);
    if (st != LpStatus::optimal) return {st, Vector::Zero(n), 0.0};

    Vector x = Vector::Zero(n);
    for (int r = 0; r < m; ++r) {
        const int bj = phase2.basis[static_cast<std::size_t>(r)];
        if (bj < n) x(bj) = phase2.t(r, n);
    }
    return {LpStatus::optimal, x, c.dot(x)};
}

}  // namespace varinfer
