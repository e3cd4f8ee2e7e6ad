#pragma once

#include <functional>
#include <span>
#include <vector>

namespace entsol {

/// Solves a tridiagonal system in place by the Thomas algorithm.
/// lower has n-1 entries (row i couples to i-1 via lower[i-1]), diag n,
/// upper n-1. rhs is overwritten with the solution. Throws SingularSystem
/// on a vanishing pivot; cannot happen for the Dirichlet Laplacian, which is
/// strictly diagonally dominant after elimination.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

/// General banded matrix with kl sub- and ku super-diagonals, stored
/// column-wise with room for the fill-in of partial pivoting.
class BandedMatrix {
public:
    BandedMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    int lower_bandwidth() const { return kl_; }
    int upper_bandwidth() const { return ku_; }

    /// Entry (row, col); only |row - col| <= max(kl, ku) is stored.
    double& at(int row, int col) { return data_[index(row, col)]; }
    double at(int row, int col) const { return data_[index(row, col)]; }

    /// LU factorization with partial pivoting, then back substitution.
    /// Destroys the matrix contents. Throws SingularSystem.
    void solve_in_place(std::span<double> rhs);

    /// y = A x for the unfactored matrix.
    void multiply(std::span<const double> x, std::span<double> y) const;

private:
    int n_, kl_, ku_, stride_;
    std::vector<double> data_;

    std::size_t index(int row, int col) const {
        // band storage: element (row, col) lives at data[col * stride + kl + ku + row - col]
        return static_cast<std::size_t>(col) * stride_ + (kl_ + ku_ + row - col);
    }
};

/// Jacobi-preconditioned conjugate gradient for SPD operators given as a
/// matrix-free callback.
struct CgResult {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

using MatVec = std::function<void(std::span<const double>, std::span<double>)>;

CgResult conjugate_gradient(const MatVec& apply, std::span<const double> inv_diag,
                            std::span<const double> rhs, std::span<double> x, double rel_tol,
                            int max_iterations);

}  // namespace entsol
