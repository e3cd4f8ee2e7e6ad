#include "entsol/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entsol/errors.hpp"

namespace entsol {

namespace {

// Potential density at one node, relative to the rest state.
class PotentialDensity {
public:
    PotentialDensity(const ProblemSpec& p, const Grid1D& grid)
        : problem_(&p), sys_(p, grid) {
        if (const auto* hm = std::get_if<HamiltonianProblem>(&p)) {
            Env env;
            for (int i = 0; i < hm->m; ++i) env.set("z" + std::to_string(i + 1), 0.0);
            V0_ = hm->V.eval(env);
            hamiltonian_ = true;
        } else if (!std::holds_alternative<ScalarProblem>(p)) {
            throw ConfigError(
                "the energy functional is defined for scalar and Hamiltonian problems");
        }
    }

    const System1d& system() const { return sys_; }

    // trapezoid of a(t) V(0) over [-L, L]; the offset between the
    // V(0)-relative energy and the raw functional
    double rest_energy() const {
        const Grid1D& g = sys_.grid();
        Env env;
        env.set("t", -g.half_length);
        double sum = 0.0;
        if (hamiltonian_) {
            const auto& hm = std::get<HamiltonianProblem>(*problem_);
            sum += 0.5 * hm.a.eval(env);
            env.set("t", g.half_length);
            sum += 0.5 * hm.a.eval(env);
        } else {
            return 0.0;  // the scalar density vanishes at rest
        }
        for (int j = 0; j < g.n_interior; ++j) sum += sys_.coefficient(j, 0);
        return sum * g.spacing * V0_;
    }

    double at(int node, std::span<const double> u) const {
        double density = 0.0;
        if (hamiltonian_) {
            const auto& hm = std::get<HamiltonianProblem>(*problem_);
            for (int i = 0; i < hm.m; ++i) env_.set("z" + std::to_string(i + 1), u[i]);
            // every component shares a(t); coefficient(node, 0) is a(t_node)
            density = sys_.coefficient(node, 0) * (hm.V.eval(env_) - V0_);
            for (int i = 0; i < hm.m; ++i) density += u[i] * sys_.forcing(node, i);
        } else {
            const double uu = u[0];
            density = sys_.coefficient(node, 0) * 0.25 * uu * uu * uu * uu +
                      sys_.forcing(node, 0) * uu;
        }
        return density;
    }

private:
    const ProblemSpec* problem_;
    System1d sys_;
    bool hamiltonian_ = false;
    double V0_ = 0.0;
    mutable Env env_;
};

double energy_with(const PotentialDensity& density, const GridFn& u) {
    const Grid1D& g = u.grid();
    const int n = g.n_interior;
    const int m = u.components();
    double potential = 0.0;
    std::vector<double> uj(m);
    for (int j = 0; j < n; ++j) {
        for (int c = 0; c < m; ++c) uj[c] = u.at(j, c);
        potential += density.at(j, uj);
    }
    // Trapezoid weights: the boundary densities vanish (u = 0 and the
    // potential is measured relative to V(0)), interior weight is h.
    return 0.5 * h1_seminorm_sq(u) + g.spacing * potential;
}

}  // namespace

double energy(const ProblemSpec& p, const GridFn& u) {
    return energy_with(PotentialDensity(p, u.grid()), u);
}

GridFn energy_gradient(const ProblemSpec& p, const GridFn& u) {
    GridFn r = residual(p, 1.0, u);
    const double h = u.grid().spacing;
    for (double& v : r.values()) v *= -h;
    return r;
}

namespace {

struct MinimizeState {
    GridFn u;
    double J = 0.0;
    GridFn gradient;
    double grad_sup = 0.0;
};

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::pair<GridFn, EnergyReport> minimize_impl(const ProblemSpec& p, const Grid1D& grid,
                                              const GridFn& u0, const MinimizeOptions& options) {
    PotentialDensity density(p, grid);
    const System1d& sys = density.system();
    if (!u0.grid().same_layout(grid)) throw ConfigError("initial guess lives on another grid");

    MinimizeState state;
    state.u = u0;
    state.J = energy_with(density, state.u);
    auto refresh_gradient = [&] {
        GridFn r = residual(sys, 1.0, state.u);
        state.gradient = std::move(r);
        for (double& v : state.gradient.values()) v *= -grid.spacing;
        state.grad_sup = sup_norm(state.gradient);
    };
    refresh_gradient();

    const int total = grid.n_interior * state.u.components();
    GridFn trial = state.u;
    double gd_step = 1.0;
    int cooldown = 0;
    EnergyReport report;

    // Guards against spinning at the rounding floor: when neither the
    // gradient nor the energy has improved for a long stretch the tolerance
    // is unreachable in double precision and the search must fail loudly.
    double best_grad = std::numeric_limits<double>::infinity();
    double best_J = std::numeric_limits<double>::infinity();
    int stagnant = 0;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (state.grad_sup <= options.tolerance) {
            report.iterations = iter;
            report.J_value = state.J;
            report.rest_energy = density.rest_energy();
            report.grad_sup = state.grad_sup;
            report.h1_seminorm_sq = h1_seminorm_sq(state.u);
            return {state.u, report};
        }
        const bool grad_improved = state.grad_sup < 0.99 * best_grad;
        const bool J_improved =
            state.J < best_J - 1e-12 * (1.0 + std::fabs(state.J));
        best_grad = std::min(best_grad, state.grad_sup);
        best_J = std::min(best_J, state.J);
        if (grad_improved || J_improved) {
            stagnant = 0;
        } else if (++stagnant > 200) {
            throw LineSearchStalledError(iter);
        }

        bool stepped = false;

        // Newton phase: direction from the stationarity system.
        if (state.grad_sup < options.newton_threshold && cooldown == 0) {
            try {
                BandedMatrix J = jacobian(sys, 1.0, state.u);
                // gradient = -h * residual; solving J d = -residual yields
                // the Newton step for the stationarity system directly.
                std::vector<double> direction(total);
                for (int k = 0; k < total; ++k)
                    direction[k] = state.gradient.values()[k] / grid.spacing;
                J.solve_in_place(direction);
                const double slope = dot(state.gradient.values(), direction);
                if (slope < 0.0) {
                    // Below this scale the energy comparison is pure rounding
                    // noise; progress is then judged on the stationarity
                    // residual instead (sup |gradient| must shrink).
                    const double energy_resolution =
                        32.0 * std::numeric_limits<double>::epsilon() *
                        (1.0 + std::fabs(state.J));
                    double scale = 1.0;
                    for (int halving = 0; halving < 30; ++halving) {
                        for (int k = 0; k < total; ++k)
                            trial.values()[k] = state.u.values()[k] + scale * direction[k];
                        const double J_trial = energy_with(density, trial);
                        bool accept;
                        if (std::fabs(scale * slope) > energy_resolution) {
                            accept = J_trial <= state.J + options.armijo_c * scale * slope;
                        } else {
                            GridFn r_trial = residual(sys, 1.0, trial);
                            accept = grid.spacing * sup_norm(r_trial) < state.grad_sup &&
                                     J_trial <= state.J + energy_resolution;
                        }
                        if (accept) {
                            state.u = trial;
                            state.J = J_trial;
                            refresh_gradient();
                            stepped = true;
                            break;
                        }
                        scale *= 0.5;
                    }
                }
            } catch (const SingularSystemError&) {
                // fall through to gradient descent
            }
            if (!stepped) cooldown = options.newton_cooldown;
        }
        if (cooldown > 0) --cooldown;

        if (!stepped) {
            // steepest descent with Armijo backtracking
            const double slope = -dot(state.gradient.values(), state.gradient.values());
            double scale = gd_step;
            bool accepted = false;
            for (int halving = 0; halving < 60; ++halving) {
                for (int k = 0; k < total; ++k)
                    trial.values()[k] = state.u.values()[k] - scale * state.gradient.values()[k];
                const double J_trial = energy_with(density, trial);
                if (J_trial <= state.J + options.armijo_c * scale * slope) {
                    state.u = trial;
                    state.J = J_trial;
                    refresh_gradient();
                    gd_step = 2.0 * scale;  // let the step grow again
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if (!accepted) throw LineSearchStalledError(iter);
        }
    }
    throw MaxIterationsError(options.max_iterations, state.grad_sup);
}

}  // namespace

std::pair<GridFn, EnergyReport> minimize(const ProblemSpec& p, const Grid1D& grid,
                                         const GridFn& u0, const MinimizeOptions& options) {
    return minimize_impl(p, grid, u0, options);
}

std::pair<GridFn, EnergyReport> minimize_multilevel(const ProblemSpec& p, const Grid1D& grid,
                                                    const MinimizeOptions& options,
                                                    const GridFn* initial) {
    // Coarsen while the interval count stays even and reasonably large and
    // the spacing still resolves the problem scale.
    std::vector<Grid1D> ladder{grid};
    while (ladder.back().intervals() % 2 == 0 && ladder.back().intervals() >= 34 &&
           2.0 * ladder.back().spacing <= options.coarsest_spacing * (1.0 + 1e-12))
        ladder.push_back(Grid1D::make(grid.half_length, ladder.back().spacing * 2.0));

    const int m = problem_components(p);
    GridFn u(ladder.back(), m);
    if (initial) {
        if (!initial->grid().same_layout(grid))
            throw ConfigError("initial guess lives on another grid");
        // decimate onto the coarsest level: coarse nodes are fine nodes
        const Grid1D& coarsest = ladder.back();
        const int stride = 1 << (ladder.size() - 1);
        for (int j = 0; j < coarsest.n_interior; ++j)
            for (int c = 0; c < m; ++c) u.at(j, c) = initial->at((j + 1) * stride - 1, c);
    }
    for (std::size_t level = ladder.size(); level-- > 0;) {
        // Coarse levels only need a rough minimizer to seed the next grid.
        MinimizeOptions level_options = options;
        if (level != 0) level_options.tolerance = std::max(options.tolerance, 1e-6);
        auto [minimizer, report] = minimize_impl(p, ladder[level], u, level_options);
        if (level == 0) return {std::move(minimizer), report};
        u = prolong_midpoint(minimizer, ladder[level - 1]);
    }
    throw ConfigError("unreachable");  // ladder always contains the target grid
}

std::vector<EnergyLevel> min_energy_sequence(const ProblemSpec& p, std::span<const double> Ls,
                                             double h, const MinimizeOptions& options) {
    if (Ls.empty()) throw ConfigError("min_energy_sequence needs at least one L");
    for (std::size_t i = 1; i < Ls.size(); ++i)
        if (!(Ls[i] > Ls[i - 1])) throw ConfigError("L values must be strictly increasing");

    std::vector<EnergyLevel> levels;
    GridFn previous;
    bool have_previous = false;
    for (double L : Ls) {
        const Grid1D grid = Grid1D::make(L, h);
        GridFn seeded;
        if (have_previous) seeded = zero_extend(previous, grid);
        // After the first level, seed from the zero-extended previous
        // minimizer: it is an admissible competitor and keeps the sequence
        // on one solution branch.
        auto [u, report] = have_previous ? minimize_multilevel(p, grid, options, &seeded)
                                         : minimize_multilevel(p, grid, options);
        if (have_previous && energy(p, seeded) < report.J_value) {
            // the competitor itself is still lower: descend from it directly
            auto [u2, report2] = minimize_impl(p, grid, seeded, options);
            if (report2.J_value < report.J_value) {
                u = std::move(u2);
                report = report2;
            }
        }
        levels.push_back(
            {L, report.J_value, report.rest_energy, report.h1_seminorm_sq, report.iterations});
        previous = std::move(u);
        have_previous = true;
    }
    return levels;
}

}  // namespace entsol
