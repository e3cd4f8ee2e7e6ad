#include "entsol/driver.hpp"

#include <algorithm>
#include <cmath>

#include "entsol/errors.hpp"
#include "entsol/rng.hpp"

namespace entsol {

namespace {

bool is_power_of_two_multiple(double Lmax, double L0) {
    double q = Lmax / L0;
    while (q > 1.5) q /= 2.0;
    return std::fabs(q - 1.0) <= 1e-9;
}

double window_sup_diff(const GridFn& a, const GridFn& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
        s = std::max(s, std::fabs(a.values()[i] - b.values()[i]));
    return s;
}

}  // namespace

ConvergenceStudy expand_until_converged(const ProblemSpec& p, const StudyOptions& options) {
    const double W = options.window;
    if (!(options.L0 >= std::max(W, 1.0)))
        throw ConfigError("L0 must be at least max(W, 1)");
    if (!is_power_of_two_multiple(options.Lmax, options.L0))
        throw ConfigError("Lmax must be L0 times a power of two");
    if (std::holds_alternative<PdeProblem>(p))
        throw ConfigError("PDE problems are handled by the 2-D study");
    if (options.solver == SolverChoice::Variational &&
        std::holds_alternative<CoupledSystemProblem>(p))
        throw ConfigError("the variational solver requires a scalar or Hamiltonian problem");

    ConvergenceStudy study;
    study.window_half_length = W;

    GridFn previous_window;
    GridFn previous_solution;
    bool have_previous = false;

    for (double L = options.L0; L <= options.Lmax * (1.0 + 1e-12); L *= 2.0) {
        const Grid1D grid = Grid1D::make(L, options.spacing);
        GridFn solution;
        if (options.solver == SolverChoice::Continuation) {
            ContinuationOptions copt;
            copt.tolerance = options.solve_tolerance;
            SolveReport report = continuation_solve(p, grid, copt);
            study.bounds_reports.push_back(*report.bounds);
            solution = std::move(report.solution);
        } else {
            MinimizeOptions mopt;
            // gradient = h * residual, so match the continuation residual scale
            mopt.tolerance = options.solve_tolerance * options.spacing;
            GridFn seeded;
            if (have_previous) seeded = zero_extend(previous_solution, grid);
            // seed follow-up levels from the previous minimizer to stay on
            // one solution branch across the doubling sequence
            auto [u, report] = have_previous ? minimize_multilevel(p, grid, mopt, &seeded)
                                             : minimize_multilevel(p, grid, mopt);
            if (have_previous && energy(p, seeded) < report.J_value) {
                auto [u2, report2] = minimize(p, grid, seeded, mopt);
                if (report2.J_value < report.J_value) {
                    u = std::move(u2);
                    report = report2;
                }
            }
            study.energy_reports.push_back(report);
            solution = std::move(u);
        }
        study.Ls.push_back(L);
        GridFn window = restrict_to_window(solution, W);
        if (have_previous) {
            study.window_diffs.push_back(window_sup_diff(window, previous_window));
        }
        previous_window = std::move(window);
        previous_solution = std::move(solution);
        have_previous = true;

        if (!study.window_diffs.empty()) {
            bool decreasing = true;
            for (std::size_t i = 1; i < study.window_diffs.size(); ++i)
                if (!(study.window_diffs[i] < study.window_diffs[i - 1])) decreasing = false;
            if (decreasing && study.window_diffs.back() <= options.tolerance) {
                study.converged = true;
                break;
            }
        } else if (std::isinf(options.tolerance)) {
            study.converged = true;  // degenerate single-solve configuration
            break;
        }
    }
    study.final_window_solution = std::move(previous_window);
    return study;
}

double uniqueness_probe(const ScalarProblem& p, double window, double L, double h, int seeds,
                        std::uint64_t seed, double tolerance) {
    if (seeds < 1) throw ConfigError("uniqueness_probe needs at least one seed");
    if (window > L) throw ConfigError("window must not exceed L");
    const Grid1D grid = Grid1D::make(L, h);
    ProblemSpec spec = p;
    System1d sys(spec, grid);

    const double K0 = std::cbrt(p.M / p.a0);
    Rng rng(seed);

    std::vector<GridFn> initializations;
    {
        GridFn f(grid, 1);
        for (int j = 0; j < grid.n_interior; ++j) f.at(j, 0) = sys.forcing(j, 0);
        initializations.push_back(solve_linear_poisson(f));  // linear solution
    }
    initializations.emplace_back(grid, 1);  // zero
    for (double c : {0.9 * K0, -0.9 * K0}) {
        GridFn g(grid, 1);
        for (int j = 0; j < grid.n_interior; ++j) g.at(j, 0) = c;
        initializations.push_back(std::move(g));
    }
    while (static_cast<int>(initializations.size()) < seeds) {
        GridFn g(grid, 1);
        for (int j = 0; j < grid.n_interior; ++j) g.at(j, 0) = rng.uniform(-K0, K0);
        initializations.push_back(std::move(g));
    }
    initializations.resize(seeds);

    NewtonOptions nopt;
    nopt.tolerance = tolerance;
    std::vector<GridFn> windows;
    for (const GridFn& u0 : initializations) {
        GridFn u;
        try {
            u = newton(sys, 1.0, u0, nopt).solution;
        } catch (const SolveError&) {
            // globalize through the homotopy instead
            ContinuationOptions copt;
            copt.tolerance = tolerance;
            u = continuation_solve(spec, grid, copt).solution;
        }
        windows.push_back(restrict_to_window(u, window));
    }
    double max_diff = 0.0;
    for (std::size_t i = 0; i < windows.size(); ++i)
        for (std::size_t j = i + 1; j < windows.size(); ++j)
            max_diff = std::max(max_diff, window_sup_diff(windows[i], windows[j]));
    return max_diff;
}

GridFn exact_expression_residual(const ScalarProblem& p, const Expr& u_exact, const Grid1D& grid) {
    Env env;
    const int n = grid.n_interior;
    const double h = grid.spacing;
    const double inv_h2 = 1.0 / (h * h);
    auto u_at = [&](double t) {
        env.set("t", t);
        return u_exact.eval(env);
    };
    GridFn r(grid, 1);
    for (int j = 0; j < n; ++j) {
        const double t = grid.node(j);
        const double d2 = (u_at(t + h) - 2.0 * u_at(t) + u_at(t - h)) * inv_h2;
        env.set("t", t);
        const double uu = u_exact.eval(env);
        r.at(j, 0) = d2 - p.a.eval(env) * uu * uu * uu - p.f.eval(env);
    }
    return r;
}

BlowupReport blowup_demo(const ScalarProblem& p, std::span<const double> Ls, double h,
                         double window, double solve_tolerance) {
    if (Ls.empty()) throw ConfigError("blowup_demo needs at least one L");
    BlowupReport report;
    ProblemSpec spec = p;

    for (double L : Ls) {
        const Grid1D grid = Grid1D::make(L, h);
        ContinuationOptions copt;
        copt.tolerance = solve_tolerance;
        SolveReport solve = continuation_solve(spec, grid, copt);
        report.rows.push_back({L, sup_norm(solve.solution)});
    }

    // Stencil-order oracle on the exact solution t sin t over [-10, 10].
    const Expr u_exact = Expr::parse("t*sin(t)");
    report.oracle_h = h;
    {
        const Grid1D oracle_grid = Grid1D::make(10.0, h);
        GridFn r = exact_expression_residual(p, u_exact, oracle_grid);
        report.exact_residual_sup = sup_norm(r);
        for (int j = 0; j < oracle_grid.n_interior; ++j) {
            if (oracle_grid.node(j) == 0.0) report.residual_at_zero = r.at(j, 0);
        }
        report.residual_at_zero_model = -h * h / 3.0;
    }
    {
        const Grid1D fine = Grid1D::make(10.0, h / 2.0);
        report.exact_residual_sup_half = sup_norm(exact_expression_residual(p, u_exact, fine));
    }
    report.residual_ratio = report.exact_residual_sup / report.exact_residual_sup_half;

    // The a priori bound that holds under bounded forcing: if |f| were really
    // capped by its sup over the window, solutions could never exceed
    // (sup|f| / a0)^{1/3}; the growth table breaks 2x that level.
    Env env;
    double window_sup_f = 0.0;
    const int samples = 10000;
    for (int i = 0; i <= samples; ++i) {
        env.set("t", -window + 2.0 * window * i / samples);
        window_sup_f = std::max(window_sup_f, std::fabs(p.f.eval(env)));
    }
    report.window_sup_f = window_sup_f;
    report.growth_threshold = 2.0 * std::cbrt(window_sup_f / p.a0);

    bool increasing = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i)
        if (!(report.rows[i].sup_u > report.rows[i - 1].sup_u)) increasing = false;
    report.growth_ok = increasing && report.rows.back().sup_u > report.growth_threshold;
    return report;
}

}  // namespace entsol
