#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "entsol/bvp1d.hpp"
#include "entsol/problems.hpp"

namespace entsol {

/// Uniform grid on the square [-L, L]^2, zero Dirichlet boundary, interior
/// unknowns only. Node coordinates use the same centered integer-index
/// construction as Grid1D, so grids sharing h nest exactly.
struct Grid2D {
    double half_length = 0.0;
    double spacing = 0.0;
    int n_side = 0;  // interior nodes per side

    static Grid2D make(double half_length, double spacing);

    int intervals() const { return n_side + 1; }
    double node(int i) const {
        return static_cast<double>(2 * (i + 1) - intervals()) * (0.5 * spacing);
    }
    bool same_layout(const Grid2D& other) const {
        return n_side == other.n_side && half_length == other.half_length &&
               spacing == other.spacing;
    }
};

/// m-component field over the interior lattice, stored node-major with x1
/// fastest: values[(row * n + col) * m + c] where col indexes x1 and row x2.
class GridFn2D {
public:
    GridFn2D() = default;
    GridFn2D(const Grid2D& grid, int components)
        : grid_(grid), m_(components),
          values_(static_cast<std::size_t>(grid.n_side) * grid.n_side * components, 0.0) {}

    const Grid2D& grid() const { return grid_; }
    int components() const { return m_; }
    int side() const { return grid_.n_side; }

    double& at(int col, int row, int component) {
        return values_[(static_cast<std::size_t>(row) * grid_.n_side + col) * m_ + component];
    }
    double at(int col, int row, int component) const {
        return values_[(static_cast<std::size_t>(row) * grid_.n_side + col) * m_ + component];
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

private:
    Grid2D grid_;
    int m_ = 0;
    std::vector<double> values_;
};

double sup_norm(const GridFn2D& f);
GridFn2D restrict_to_window(const GridFn2D& f, double window_half_length);
GridFn2D zero_extend(const GridFn2D& f, const Grid2D& larger);

/// Five-point residual: Lap(u_c) - a(x) V_{z_c}(u) - f_c(x) at interior
/// nodes with the implicit zero boundary.
GridFn2D residual2d(const PdeProblem& p, const GridFn2D& u);

/// Directional derivative of residual2d at u: the five-point Laplacian of v
/// minus a(x) Hess V(u) v.
GridFn2D jacobian_apply2d(const PdeProblem& p, const GridFn2D& u, const GridFn2D& v);

/// Discrete analog of the 2-D energy: forward-difference kinetic term plus
/// h^2-weighted potential density a(x)(V(u) - V(0)) + sum u_c f_c(x); the
/// V(0) offset makes zero extension energy-neutral (as in 1-D).
double energy2d(const PdeProblem& p, const GridFn2D& u);

/// Exact gradient of energy2d; equals -h^2 times residual2d.
GridFn2D energy_gradient2d(const PdeProblem& p, const GridFn2D& u);

enum class Method2d { Newton, Minimize };

struct Solve2dOptions {
    double tolerance = 1e-8;       // sup-residual
    double cg_rel_tol = 1e-10;
    int cg_max_iterations = 50000;
    int max_newton_iterations = 60;
    double lambda_min_step = 1e-4;
};

struct SolveReport2d {
    GridFn2D solution;
    std::vector<LambdaStep> lambda_path;  // Newton path only
    int iterations = 0;                   // Newton or descent iterations in total
    double final_residual_sup = 0.0;
    Method2d method = Method2d::Newton;
};

/// Newton solves use an internal homotopy in front of the nonlinearity
/// (linear Poisson start, adaptive steps) unless an initial guess is given,
/// in which case a direct Newton run is attempted first. Linear solves are
/// Jacobi-preconditioned conjugate gradient on the negated system, which is
/// SPD whenever Hess V is positive semi-definite over the solution range;
/// non-convex potentials belong on the Minimize path.
SolveReport2d solve2d(const PdeProblem& p, const Grid2D& grid, Method2d method,
                      const Solve2dOptions& options = {},
                      const GridFn2D* initial_guess = nullptr);

/// Interior derivative estimates on margin-shrunken subsquares: sup|u| over
/// everything, central differences at distance >= 1 from the boundary,
/// second differences (including the mixed one) at distance >= 2, and a
/// sampled Hoelder quotient (exponent 1/2) of the second differences over
/// random node pairs at distance <= 1. Requires L > 2.
struct InteriorBounds {
    double sup_u_full = 0.0;
    double sup_Du_margin1 = 0.0;
    double sup_D2u_margin2 = 0.0;
    double holder_quotient_sample = 0.0;
};
InteriorBounds interior_bounds(const GridFn2D& u, std::uint64_t seed = 0, int pair_samples = 2000);

struct Study2dOptions {
    double window = 2.0;
    double tolerance = 5e-3;
    double L0 = 4.0;
    double Lmax = 16.0;
    double spacing = 0.05;
    Method2d method = Method2d::Newton;
    Solve2dOptions solve;
};

struct ConvergenceStudy2d {
    double window_half_length = 0.0;
    std::vector<double> Ls;
    std::vector<double> window_diffs;
    GridFn2D final_window_solution;
    std::vector<InteriorBounds> interior_bounds;  // only for L > 2 levels
    bool converged = false;
};

/// Domain doubling on squares with window comparison on shared nodes;
/// each level warm-starts from the zero-extended previous solution.
ConvergenceStudy2d expand2d(const PdeProblem& p, const Study2dOptions& options);

/// CSV: "# L= h= m=" header, "x1,x2,u1..." columns, interior nodes only.
void write_csv(std::ostream& out, const GridFn2D& f, std::string_view comment = {});

}  // namespace entsol
