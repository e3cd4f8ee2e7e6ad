#pragma once

#include <optional>
#include <span>
#include <vector>

#include "entsol/grid.hpp"
#include "entsol/linalg.hpp"
#include "entsol/problems.hpp"

namespace entsol {

/// Samples a 1-D problem (scalar, coupled or Hamiltonian) onto a grid and
/// provides the nonlinearity and its derivatives per node. The homotopy
/// family solved everywhere is
///   u_c'' - lambda * a_c(t) N_c(u) = f_c(t),  u(+-L) = 0,
/// which is linear at lambda = 0 and the target problem at lambda = 1.
/// One instance carries a scratch environment, so concurrent solves need
/// separate instances (problems and grids themselves are immutable).
class System1d {
public:
    System1d(const ProblemSpec& problem, const Grid1D& grid);

    const Grid1D& grid() const { return grid_; }
    int components() const { return m_; }
    double coefficient(int node, int component) const { return coeff_[idx(node, component)]; }
    double forcing(int node, int component) const { return forcing_[idx(node, component)]; }

    /// N_c(u) for all components at one node.
    void nonlinearity(int node, std::span<const double> u, std::span<double> N) const;

    /// dN_c/du_{c'}, row-major m*m.
    void nonlinearity_jacobian(int node, std::span<const double> u, std::span<double> dN) const;

private:
    const ProblemSpec* problem_;
    Grid1D grid_;
    int m_;
    std::vector<double> coeff_, forcing_;
    mutable Env env_;

    std::size_t idx(int node, int component) const {
        return static_cast<std::size_t>(node) * m_ + component;
    }
};

struct LambdaStep {
    double lambda = 0.0;
    int newton_iterations = 0;
};

/// A priori bound check for converged scalar solves. Predicted values come
/// from the problem constants alone: K0 = (M/a0)^{1/3}, K2 = a1 K0^3 + M,
/// K1 = 2 K0 + K2/2. Predictions are absent for systems, where no closed
/// form exists; the measured values still document boundedness.
struct BoundsReport {
    double K0_measured = 0.0, K1_measured = 0.0, K2_measured = 0.0;
    std::optional<double> K0_predicted, K1_predicted, K2_predicted;
    bool pass = false;
};

struct SolveReport {
    GridFn solution;
    std::vector<LambdaStep> lambda_path;
    double final_residual_sup = 0.0;
    std::optional<BoundsReport> bounds;
};

/// Solves u'' = rhs with zero boundary values, component by component, by
/// the Thomas algorithm on the central-difference system.
GridFn solve_linear_poisson(const GridFn& rhs);

/// Central-difference residual D2(u) - lambda a N(u) - f at interior nodes,
/// using the implicit zero boundary values.
GridFn residual(const ProblemSpec& p, double lambda, const GridFn& u);
GridFn residual(const System1d& sys, double lambda, const GridFn& u);

/// Exact derivative of the residual with respect to the node values:
/// block-tridiagonal, bandwidth = number of components.
BandedMatrix jacobian(const ProblemSpec& p, double lambda, const GridFn& u);
BandedMatrix jacobian(const System1d& sys, double lambda, const GridFn& u);

/// J v without materializing the matrix (used by directional-derivative
/// checks).
GridFn jacobian_apply(const System1d& sys, double lambda, const GridFn& u, const GridFn& v);

struct NewtonOptions {
    double tolerance = 1e-10;   // on the sup-norm of the residual
    int max_iterations = 60;
    int max_halvings = 30;
};

struct NewtonOutcome {
    GridFn solution;
    int iterations = 0;
    double residual_sup = 0.0;
    std::vector<double> residual_trace;  // sup-residual before each step + final
};

/// Damped Newton: full step when it reduces the sup-residual, otherwise the
/// step is halved (up to max_halvings). Throws NewtonStalled or
/// MaxIterations. The residual trace is strictly decreasing by construction.
NewtonOutcome newton(const System1d& sys, double lambda, const GridFn& u0,
                     const NewtonOptions& options);
NewtonOutcome newton(const ProblemSpec& p, double lambda, const GridFn& u0,
                     const NewtonOptions& options);

struct ContinuationOptions {
    double tolerance = 1e-10;
    double initial_step = 0.25;
    double max_step = 0.25;
    double min_step = 1e-4;
    int easy_iterations = 4;  // doubling threshold
    NewtonOptions newton;
};

/// Homotopy from the linear problem at lambda = 0 to the target at
/// lambda = 1 with adaptive steps. Throws ContinuationFailed when the step
/// underflows min_step. Scalar solves carry a BoundsReport.
SolveReport continuation_solve(const ProblemSpec& p, const Grid1D& grid,
                               const ContinuationOptions& options = {});

/// Measured-versus-predicted a priori bounds for a converged scalar solve.
/// K0 is sup|u|, K2 is sup|a u^3 + f| (the equation gives u'' pointwise),
/// K1 the sup of central differences.
BoundsReport validate_bounds(const ScalarProblem& p, const GridFn& u);

/// Measured sup-norms of u, u' and u'' (through the equation) without
/// predictions; used for system solves.
BoundsReport measure_bounds(const System1d& sys, const GridFn& u);

}  // namespace entsol
