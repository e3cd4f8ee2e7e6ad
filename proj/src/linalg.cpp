#include "entsol/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "entsol/errors.hpp"

namespace entsol {

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
    const int n = static_cast<int>(diag.size());
    std::vector<double> c(n > 0 ? n - 1 : 0);
    std::vector<double> d(n);
    if (n == 0) return;
    if (diag[0] == 0.0) throw SingularSystemError();
    if (n > 1) c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (int i = 1; i < n; ++i) {
        const double denom = diag[i] - lower[i - 1] * c[i - 1];
        if (denom == 0.0) throw SingularSystemError();
        if (i < n - 1) c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom;
    }
    rhs[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = d[i] - c[i] * rhs[i + 1];
}

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), stride_(2 * kl + ku + 1),
      data_(static_cast<std::size_t>(n) * (2 * kl + ku + 1), 0.0) {}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        const int j0 = std::max(0, i - kl_);
        const int j1 = std::min(n_ - 1, i + ku_);
        for (int j = j0; j <= j1; ++j) s += at(i, j) * x[j];
        y[i] = s;
    }
}

// Banded LU with partial pivoting (LAPACK gbtrf-style). Row swaps stay inside
// the band because pivots are chosen among at most kl+1 candidate rows; the
// extra kl superdiagonals in the storage absorb the fill-in.
void BandedMatrix::solve_in_place(std::span<double> rhs) {
    const int band = kl_ + ku_;
    for (int col = 0; col < n_; ++col) {
        int pivot_row = col;
        double pivot_mag = std::fabs(at(col, col));
        const int last_row = std::min(n_ - 1, col + kl_);
        for (int r = col + 1; r <= last_row; ++r) {
            const double mag = std::fabs(at(r, col));
            if (mag > pivot_mag) {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if (pivot_mag == 0.0) throw SingularSystemError();
        if (pivot_row != col) {
            const int last_col = std::min(n_ - 1, col + band);
            for (int j = col; j <= last_col; ++j) std::swap(at(col, j), at(pivot_row, j));
            std::swap(rhs[col], rhs[pivot_row]);
        }
        const double pivot = at(col, col);
        for (int r = col + 1; r <= last_row; ++r) {
            const double factor = at(r, col) / pivot;
            if (factor == 0.0) continue;
            const int last_col = std::min(n_ - 1, col + band);
            for (int j = col + 1; j <= last_col; ++j) at(r, j) -= factor * at(col, j);
            rhs[r] -= factor * rhs[col];
        }
    }
    for (int row = n_ - 1; row >= 0; --row) {
        double s = rhs[row];
        const int last_col = std::min(n_ - 1, row + band);
        for (int j = row + 1; j <= last_col; ++j) s -= at(row, j) * rhs[j];
        rhs[row] = s / at(row, row);
    }
}

CgResult conjugate_gradient(const MatVec& apply, std::span<const double> inv_diag,
                            std::span<const double> rhs, std::span<double> x, double rel_tol,
                            int max_iterations) {
    const std::size_t n = rhs.size();
    std::vector<double> r(n), z(n), p(n), Ap(n);

    apply(x, std::span<double>(Ap));
    double rhs_norm_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = rhs[i] - Ap[i];
        rhs_norm_sq += rhs[i] * rhs[i];
    }
    const double stop_sq = rel_tol * rel_tol * std::max(rhs_norm_sq, 1e-300);

    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = inv_diag[i] * r[i];
        p[i] = z[i];
        rz += r[i] * z[i];
    }

    CgResult result;
    double r_norm_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) r_norm_sq += r[i] * r[i];
    if (r_norm_sq <= stop_sq) {
        result.converged = true;
        result.rel_residual = std::sqrt(r_norm_sq / std::max(rhs_norm_sq, 1e-300));
        return result;
    }

    for (int iter = 1; iter <= max_iterations; ++iter) {
        apply(p, std::span<double>(Ap));
        double pAp = 0.0;
        for (std::size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        if (pAp <= 0.0) break;  // operator not SPD on this subspace
        const double alpha = rz / pAp;
        r_norm_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
            r_norm_sq += r[i] * r[i];
        }
        result.iterations = iter;
        if (r_norm_sq <= stop_sq) {
            result.converged = true;
            break;
        }
        double rz_next = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_next += r[i] * z[i];
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    result.rel_residual = std::sqrt(r_norm_sq / std::max(rhs_norm_sq, 1e-300));
    return result;
}

}  // namespace entsol
