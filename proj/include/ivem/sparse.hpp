#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ivem {

struct numerical_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Cholesky hit a non-positive pivot: the assembled operator is not SPD.
struct definiteness_failure : numerical_failure {
    using numerical_failure::numerical_failure;
};

struct Triplet {
    int row = 0, col = 0;
    double value = 0.0;
};

/// Compressed sparse rows with sorted column indices per row, plus the
/// right-hand side of the linear system.
struct SparseSystem {
    int n = 0;
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;
    std::vector<double> rhs;

    static SparseSystem from_triplets(int n, std::vector<Triplet> ts,
                                      std::vector<double> rhs = {}) {
        std::stable_sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        SparseSystem s;
        s.n = n;
        s.row_ptr.assign(n + 1, 0);
        for (std::size_t i = 0; i < ts.size();) {
            std::size_t j = i;
            double v = 0.0;
            while (j < ts.size() && ts[j].row == ts[i].row && ts[j].col == ts[i].col)
                v += ts[j++].value;
            s.col.push_back(ts[i].col);
            s.val.push_back(v);
            ++s.row_ptr[ts[i].row + 1];
            i = j;
        }
        for (int r = 0; r < n; ++r) s.row_ptr[r + 1] += s.row_ptr[r];
        s.rhs = rhs.empty() ? std::vector<double>(n, 0.0) : std::move(rhs);
        return s;
    }

    void multiply(const std::vector<double>& x, std::vector<double>& y) const {
        for (int r = 0; r < n; ++r) {
            double s = 0.0;
            for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
            y[r] = s;
        }
    }

    double coeff(int r, int c) const {
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (col[k] == c) return val[k];
        return 0.0;
    }

    /// max_{ij} |A_ij - A_ji| relative to max_{ij} |A_ij|.
    double symmetry_defect() const {
        double d = 0.0, m = 0.0;
        for (int r = 0; r < n; ++r)
            for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
                m = std::max(m, std::abs(val[k]));
                d = std::max(d, std::abs(val[k] - coeff(col[k], r)));
            }
        return m > 0.0 ? d / m : 0.0;
    }

    /// Coordinate text dump, one `i j value` line per stored entry.
    void dump(std::ostream& os) const {
        char buf[96];
        for (int r = 0; r < n; ++r)
            for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
                std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r, col[k], val[k]);
                os << buf;
            }
    }
};

struct SolveReport {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
};

namespace detail {

inline double dot_seq(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace detail

/// Jacobi-preconditioned conjugate gradients. Throws numerical_failure when
/// maxiter is exhausted or a non-finite value appears.
inline SolveReport cg_solve(const SparseSystem& A, double tol = 1e-10, int maxiter = -1) {
    const int n = A.n;
    if (maxiter < 0) maxiter = 10 * n;
    SolveReport rep;
    rep.x.assign(n, 0.0);

    std::vector<double> inv_diag(n, 1.0);
    for (int r = 0; r < n; ++r) {
        double d = A.coeff(r, r);
        if (d <= 0.0) throw numerical_failure("cg_solve: non-positive diagonal at row " +
                                              std::to_string(r));
        inv_diag[r] = 1.0 / d;
    }

    std::vector<double> r = A.rhs, z(n), p(n), q(n);
    double bnorm = std::sqrt(detail::dot_seq(A.rhs, A.rhs));
    if (bnorm == 0.0) return rep;

    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = detail::dot_seq(r, z);
    double rnorm = std::sqrt(detail::dot_seq(r, r));

    for (int it = 1; it <= maxiter; ++it) {
        A.multiply(p, q);
        double pq = detail::dot_seq(p, q);
        if (!(pq > 0.0))
            throw numerical_failure("cg_solve: curvature " + std::to_string(pq) +
                                    " is not positive (matrix not SPD?)");
        double alpha = rz / pq;
        for (int i = 0; i < n; ++i) {
            rep.x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        rnorm = std::sqrt(detail::dot_seq(r, r));
        if (!std::isfinite(rnorm)) throw numerical_failure("cg_solve: non-finite residual");
        rep.iterations = it;
        rep.relative_residual = rnorm / bnorm;
        if (rep.relative_residual <= tol) return rep;
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        double rz_new = detail::dot_seq(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw numerical_failure("cg_solve: no convergence in " + std::to_string(maxiter) +
                            " iterations, relative residual " +
                            std::to_string(rnorm / bnorm));
}

/// Dense Cholesky fallback for moderate systems (tests and cross-checks).
/// A non-positive pivot raises definiteness_failure.
inline SolveReport dense_solve(const SparseSystem& A, int max_n = 2000) {
    const int n = A.n;
    if (n > max_n)
        throw std::invalid_argument("dense_solve: system larger than the dense fallback limit");
    std::vector<double> L(static_cast<std::size_t>(n) * n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
            L[static_cast<std::size_t>(r) * n + A.col[k]] = A.val[k];

    for (int j = 0; j < n; ++j) {
        double d = L[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            double ljk = L[static_cast<std::size_t>(j) * n + k];
            d -= ljk * ljk;
        }
        if (d <= 0.0)
            throw definiteness_failure("dense_solve: non-positive pivot at column " +
                                       std::to_string(j));
        double dj = std::sqrt(d);
        L[static_cast<std::size_t>(j) * n + j] = dj;
        for (int i = j + 1; i < n; ++i) {
            double s = L[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= L[static_cast<std::size_t>(i) * n + k] *
                     L[static_cast<std::size_t>(j) * n + k];
            L[static_cast<std::size_t>(i) * n + j] = s / dj;
        }
    }

    SolveReport rep;
    rep.x.assign(n, 0.0);
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = A.rhs[i];
        for (int k = 0; k < i; ++k) s -= L[static_cast<std::size_t>(i) * n + k] * y[k];
        y[i] = s / L[static_cast<std::size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= L[static_cast<std::size_t>(k) * n + i] * rep.x[k];
        rep.x[i] = s / L[static_cast<std::size_t>(i) * n + i];
    }

    std::vector<double> res(n);
    A.multiply(rep.x, res);
    double rn = 0.0, bn = 0.0;
    for (int i = 0; i < n; ++i) {
        rn += (res[i] - A.rhs[i]) * (res[i] - A.rhs[i]);
        bn += A.rhs[i] * A.rhs[i];
    }
    rep.relative_residual = bn > 0.0 ? std::sqrt(rn / bn) : 0.0;
    return rep;
}

}  // namespace ivem
