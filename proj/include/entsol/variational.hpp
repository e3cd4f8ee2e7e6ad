#pragma once

#include <span>
#include <utility>
#include <vector>

#include "entsol/bvp1d.hpp"
#include "entsol/grid.hpp"
#include "entsol/problems.hpp"

namespace entsol {

struct EnergyReport {
    double J_value = 0.0;        // with the potential measured relative to V(0)
    double rest_energy = 0.0;    // trapezoid of a(t) V(0) over the interval;
                                 // J_value + rest_energy is the raw functional
    double grad_sup = 0.0;
    int iterations = 0;
    double h1_seminorm_sq = 0.0;
};

/// Discrete energy whose critical points are exactly the central-difference
/// Dirichlet solutions: forward-difference kinetic term (boundary gaps
/// included) plus trapezoid quadrature of the potential density
///   a(t) (V(u) - V(0)) + sum_c u_c f_c(t).
/// The potential is measured relative to the rest state V(0) so that
/// extending a function by zero onto a larger interval leaves its energy
/// unchanged; minimum values are then non-increasing under domain growth.
/// Scalar problems use the density a(t) u^4/4 + f(t) u.
double energy(const ProblemSpec& p, const GridFn& u);

/// Exact gradient with respect to the node values; equals -h times the
/// central-difference residual at lambda = 1.
GridFn energy_gradient(const ProblemSpec& p, const GridFn& u);

struct MinimizeOptions {
    double tolerance = 1e-10;       // on the sup-norm of the gradient
    int max_iterations = 2000000;
    double armijo_c = 1e-4;
    double newton_threshold = 1.0;  // try Newton steps once grad_sup drops below
    int newton_cooldown = 20;       // gradient steps between failed Newton retries
    double coarsest_spacing = 0.5;  // multilevel ladders stop coarsening here;
                                    // coarser grids alias the forcing scale and
                                    // can seed the wrong basin
};

/// Gradient descent with Armijo backtracking, switching to damped Newton on
/// the stationarity system once the gradient is small; falls back to descent
/// whenever a Newton direction fails to decrease the energy. The energy is
/// non-increasing across accepted iterations. Throws LineSearchStalled or
/// MaxIterations.
std::pair<GridFn, EnergyReport> minimize(const ProblemSpec& p, const Grid1D& grid,
                                         const GridFn& u0, const MinimizeOptions& options = {});

/// minimize() seeded through a ladder of coarsened grids (spacing doubled
/// up to coarsest_spacing while enough intervals remain): the coarsest level
/// starts from zero, finer levels from the interpolated previous minimizer.
/// With `initial` given, its decimation seeds the coarsest level instead,
/// which keeps the search inside the basin of the provided state. Pure
/// initialization strategy; the returned pair is a minimize() result on the
/// target grid.
std::pair<GridFn, EnergyReport> minimize_multilevel(const ProblemSpec& p, const Grid1D& grid,
                                                    const MinimizeOptions& options = {},
                                                    const GridFn* initial = nullptr);

struct EnergyLevel {
    double L = 0.0;
    double M_L = 0.0;               // minimum energy value (V(0)-relative)
    double rest_energy = 0.0;       // offset to the raw functional, as above
    double h1_seminorm_sq = 0.0;
    int iterations = 0;
};

/// Minimum energy values over an increasing sequence of half-lengths on
/// grids sharing h. Each level is seeded both from a multilevel start and
/// from the zero-extended previous minimizer, keeping the lower energy, so
/// M_{2L} <= M_L holds up to solver slack whenever the levels nest.
std::vector<EnergyLevel> min_energy_sequence(const ProblemSpec& p, std::span<const double> Ls,
                                             double h, const MinimizeOptions& options = {});

}  // namespace entsol
