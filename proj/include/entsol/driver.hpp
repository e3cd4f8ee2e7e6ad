#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "entsol/bvp1d.hpp"
#include "entsol/variational.hpp"

namespace entsol {

enum class SolverChoice { Continuation, Variational };

/// Domain-doubling record: solves on L0, 2 L0, 4 L0, ... are compared on the
/// shared nodes of the fixed window [-W, W]. The study is converged when the
/// window differences decreased strictly at every doubling and the last one
/// is at or below the tolerance.
struct ConvergenceStudy {
    double window_half_length = 0.0;
    std::vector<double> Ls;
    std::vector<double> window_diffs;       // size Ls.size() - 1
    GridFn final_window_solution;
    std::vector<BoundsReport> bounds_reports;   // continuation path
    std::vector<EnergyReport> energy_reports;   // variational path
    bool converged = false;
};

struct StudyOptions {
    double window = 2.0;        // W
    double tolerance = 1e-6;    // on the window sup-difference
    double L0 = 4.0;
    double Lmax = 32.0;
    double spacing = 0.01;      // h
    SolverChoice solver = SolverChoice::Continuation;
    double solve_tolerance = 1e-10;
};

/// Runs the doubling sequence until the window differences certify
/// convergence or L exceeds Lmax; in the latter case the study is returned
/// with converged = false (partial data preserved). Solver errors propagate.
ConvergenceStudy expand_until_converged(const ProblemSpec& p, const StudyOptions& options);

/// Solves the lambda = 1 problem from `seeds` distinct initializations
/// (linear solution, zero, +-0.9 K0 constants, bounded random fields) and
/// returns the maximum pairwise sup-difference on the window. Seeds that
/// stall under plain Newton are retried through the full continuation path.
/// The tolerance must stay above the rounding floor of the residual, about
/// 4 sup|u| eps / h^2.
double uniqueness_probe(const ScalarProblem& p, double window, double L, double h, int seeds,
                        std::uint64_t seed, double tolerance = 1e-10);

struct BlowupRow {
    double L = 0.0;
    double sup_u = 0.0;
};

/// Growth table for the unbounded-forcing demonstration plus a
/// stencil-consistency oracle evaluated on the known exact solution
/// u(t) = t sin t of the counterexample problem.
struct BlowupReport {
    std::vector<BlowupRow> rows;
    double oracle_h = 0.0;                 // grid spacing of the residual oracle
    double exact_residual_sup = 0.0;       // sup residual of t sin t on [-10, 10] at h
    double exact_residual_sup_half = 0.0;  // same at h/2
    double residual_ratio = 0.0;           // first / second, ~4 for a 2nd-order stencil
    double residual_at_zero = 0.0;
    double residual_at_zero_model = 0.0;   // -h^2/3 from the Taylor expansion at 0
    double window_sup_f = 0.0;             // sup |f| on [-W, W]
    double growth_threshold = 0.0;         // 2 (window_sup_f / a0)^{1/3}
    bool growth_ok = false;                // sup_u strictly increasing and final > threshold
};

/// Dirichlet solves of the counterexample on each L. The solutions are only
/// bounded per domain; the report documents that their sup grows without
/// bound, far beyond what bounded forcing of the same window magnitude
/// would allow.
BlowupReport blowup_demo(const ScalarProblem& p, std::span<const double> Ls, double h,
                         double window = 2.0, double solve_tolerance = 1e-8);

/// Residual of an exact expression u(t) under the discrete operator, with
/// the stencil fed exact boundary-neighbor values instead of zeros; isolates
/// the truncation error of the discretization.
GridFn exact_expression_residual(const ScalarProblem& p, const Expr& u_exact, const Grid1D& grid);

}  // namespace entsol
