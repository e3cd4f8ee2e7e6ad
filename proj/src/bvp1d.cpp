#include "entsol/bvp1d.hpp"

#include <algorithm>
#include <cmath>

#include "entsol/errors.hpp"

namespace entsol {

System1d::System1d(const ProblemSpec& problem, const Grid1D& grid)
    : problem_(&problem), grid_(grid), m_(problem_components(problem)) {
    if (std::holds_alternative<PdeProblem>(problem))
        throw ConfigError("PDE problems are handled by the 2-D solver");
    if (const auto* s = std::get_if<ScalarProblem>(&problem)) {
        if (!(s->a0 > 0.0)) throw ConfigError("scalar problems require a0 > 0");
    }
    const int n = grid_.n_interior;
    coeff_.resize(static_cast<std::size_t>(n) * m_);
    forcing_.resize(static_cast<std::size_t>(n) * m_);
    Env env;
    for (int j = 0; j < n; ++j) {
        env.set("t", grid_.node(j));
        if (const auto* s = std::get_if<ScalarProblem>(problem_)) {
            coeff_[idx(j, 0)] = s->a.eval(env);
            forcing_[idx(j, 0)] = s->f.eval(env);
        } else if (const auto* c = std::get_if<CoupledSystemProblem>(problem_)) {
            coeff_[idx(j, 0)] = c->a1_t.eval(env);
            coeff_[idx(j, 1)] = c->a2_t.eval(env);
            forcing_[idx(j, 0)] = c->h1.eval(env);
            forcing_[idx(j, 1)] = c->h2.eval(env);
        } else {
            const auto& hm = std::get<HamiltonianProblem>(*problem_);
            const double a = hm.a.eval(env);
            for (int cmp = 0; cmp < m_; ++cmp) {
                coeff_[idx(j, cmp)] = a;
                forcing_[idx(j, cmp)] = hm.f[cmp].eval(env);
            }
        }
    }
}

void System1d::nonlinearity(int /*node*/, std::span<const double> u, std::span<double> N) const {
    if (std::holds_alternative<ScalarProblem>(*problem_)) {
        N[0] = u[0] * u[0] * u[0];
    } else if (const auto* c = std::get_if<CoupledSystemProblem>(problem_)) {
        env_.set("x", u[0]);
        env_.set("y", u[1]);
        N[0] = c->f.eval(env_);
        N[1] = c->g.eval(env_);
    } else {
        const auto& hm = std::get<HamiltonianProblem>(*problem_);
        for (int i = 0; i < m_; ++i) env_.set("z" + std::to_string(i + 1), u[i]);
        for (int i = 0; i < m_; ++i) N[i] = hm.Vz[i].eval(env_);
    }
}

void System1d::nonlinearity_jacobian(int /*node*/, std::span<const double> u,
                                     std::span<double> dN) const {
    if (std::holds_alternative<ScalarProblem>(*problem_)) {
        dN[0] = 3.0 * u[0] * u[0];
    } else if (const auto* c = std::get_if<CoupledSystemProblem>(problem_)) {
        env_.set("x", u[0]);
        env_.set("y", u[1]);
        dN[0] = c->fx.eval(env_);
        dN[1] = c->fy.eval(env_);
        dN[2] = c->gx.eval(env_);
        dN[3] = c->gy.eval(env_);
    } else {
        const auto& hm = std::get<HamiltonianProblem>(*problem_);
        for (int i = 0; i < m_; ++i) env_.set("z" + std::to_string(i + 1), u[i]);
        for (int i = 0; i < m_ * m_; ++i) dN[i] = hm.Vzz[i].eval(env_);
    }
}

GridFn solve_linear_poisson(const GridFn& rhs) {
    const Grid1D& g = rhs.grid();
    const int n = g.n_interior;
    const int m = rhs.components();
    const double h2 = g.spacing * g.spacing;
    GridFn u(g, m);
    std::vector<double> lower(n - 1, 1.0), diag(n, -2.0), upper(n - 1, 1.0), b(n);
    for (int c = 0; c < m; ++c) {
        for (int j = 0; j < n; ++j) b[j] = h2 * rhs.at(j, c);
        std::fill(lower.begin(), lower.end(), 1.0);
        std::fill(diag.begin(), diag.end(), -2.0);
        std::fill(upper.begin(), upper.end(), 1.0);
        solve_tridiagonal(lower, diag, upper, b);
        for (int j = 0; j < n; ++j) u.at(j, c) = b[j];
    }
    return u;
}

GridFn residual(const System1d& sys, double lambda, const GridFn& u) {
    const Grid1D& g = u.grid();
    const int n = g.n_interior;
    const int m = u.components();
    const double inv_h2 = 1.0 / (g.spacing * g.spacing);
    GridFn r(g, m);
    std::vector<double> uj(m), N(m);
    for (int j = 0; j < n; ++j) {
        for (int c = 0; c < m; ++c) uj[c] = u.at(j, c);
        sys.nonlinearity(j, uj, N);
        for (int c = 0; c < m; ++c) {
            const double left = j > 0 ? u.at(j - 1, c) : 0.0;
            const double right = j < n - 1 ? u.at(j + 1, c) : 0.0;
            const double d2 = (right - 2.0 * u.at(j, c) + left) * inv_h2;
            r.at(j, c) = d2 - lambda * sys.coefficient(j, c) * N[c] - sys.forcing(j, c);
        }
    }
    return r;
}

GridFn residual(const ProblemSpec& p, double lambda, const GridFn& u) {
    return residual(System1d(p, u.grid()), lambda, u);
}

BandedMatrix jacobian(const System1d& sys, double lambda, const GridFn& u) {
    const Grid1D& g = u.grid();
    const int n = g.n_interior;
    const int m = u.components();
    const double inv_h2 = 1.0 / (g.spacing * g.spacing);
    BandedMatrix J(n * m, m, m);
    std::vector<double> uj(m), dN(m * m);
    for (int j = 0; j < n; ++j) {
        for (int c = 0; c < m; ++c) uj[c] = u.at(j, c);
        sys.nonlinearity_jacobian(j, uj, dN);
        for (int c = 0; c < m; ++c) {
            const int row = j * m + c;
            J.at(row, row) += -2.0 * inv_h2;
            if (j > 0) J.at(row, row - m) += inv_h2;
            if (j < n - 1) J.at(row, row + m) += inv_h2;
            const double s = -lambda * sys.coefficient(j, c);
            for (int c2 = 0; c2 < m; ++c2) J.at(row, j * m + c2) += s * dN[c * m + c2];
        }
    }
    return J;
}

BandedMatrix jacobian(const ProblemSpec& p, double lambda, const GridFn& u) {
    return jacobian(System1d(p, u.grid()), lambda, u);
}

GridFn jacobian_apply(const System1d& sys, double lambda, const GridFn& u, const GridFn& v) {
    BandedMatrix J = jacobian(sys, lambda, u);
    GridFn out(u.grid(), u.components());
    J.multiply(v.values(), out.values());
    return out;
}

NewtonOutcome newton(const System1d& sys, double lambda, const GridFn& u0,
                     const NewtonOptions& options) {
    NewtonOutcome out;
    out.solution = u0;
    GridFn r = residual(sys, lambda, out.solution);
    double r_sup = sup_norm(r);
    out.residual_trace.push_back(r_sup);
    const int total = u0.nodes() * u0.components();
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (r_sup <= options.tolerance) {
            out.iterations = iter;
            out.residual_sup = r_sup;
            return out;
        }
        BandedMatrix J = jacobian(sys, lambda, out.solution);
        std::vector<double> step(r.values());
        for (double& v : step) v = -v;
        J.solve_in_place(step);

        double scale = 1.0;
        bool accepted = false;
        GridFn trial = out.solution;
        for (int halving = 0; halving <= options.max_halvings; ++halving) {
            for (int k = 0; k < total; ++k)
                trial.values()[k] = out.solution.values()[k] + scale * step[k];
            GridFn r_trial = residual(sys, lambda, trial);
            const double trial_sup = sup_norm(r_trial);
            if (trial_sup < r_sup) {
                out.solution = trial;
                r = std::move(r_trial);
                r_sup = trial_sup;
                out.residual_trace.push_back(r_sup);
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) throw NewtonStalledError(iter, r_sup);
    }
    if (r_sup <= options.tolerance) {
        out.iterations = options.max_iterations;
        out.residual_sup = r_sup;
        return out;
    }
    throw MaxIterationsError(options.max_iterations, r_sup);
}

NewtonOutcome newton(const ProblemSpec& p, double lambda, const GridFn& u0,
                     const NewtonOptions& options) {
    return newton(System1d(p, u0.grid()), lambda, u0, options);
}

SolveReport continuation_solve(const ProblemSpec& p, const Grid1D& grid,
                               const ContinuationOptions& options) {
    System1d sys(p, grid);
    const int m = sys.components();

    // lambda = 0: plain Poisson solve of the forcing.
    GridFn f(grid, m);
    for (int j = 0; j < grid.n_interior; ++j)
        for (int c = 0; c < m; ++c) f.at(j, c) = sys.forcing(j, c);
    SolveReport report;
    report.solution = solve_linear_poisson(f);
    report.lambda_path.push_back({0.0, 0});

    NewtonOptions newton_options = options.newton;
    newton_options.tolerance = options.tolerance;

    double lambda = 0.0;
    double step = options.initial_step;
    while (lambda < 1.0) {
        const double lambda_next = std::min(1.0, lambda + step);
        try {
            NewtonOutcome outcome = newton(sys, lambda_next, report.solution, newton_options);
            report.solution = std::move(outcome.solution);
            report.final_residual_sup = outcome.residual_sup;
            report.lambda_path.push_back({lambda_next, outcome.iterations});
            lambda = lambda_next;
            if (outcome.iterations <= options.easy_iterations)
                step = std::min(2.0 * step, options.max_step);
        } catch (const SolveError&) {
            step *= 0.5;
            if (step < options.min_step) throw ContinuationFailedError(lambda);
        }
    }
    if (const auto* s = std::get_if<ScalarProblem>(&p)) {
        report.bounds = validate_bounds(*s, report.solution);
    } else {
        report.bounds = measure_bounds(sys, report.solution);
    }
    return report;
}

namespace {

// sup of central differences (u_{j+1} - u_{j-1}) / 2h with zero boundary
double sup_central_difference(const GridFn& u) {
    const int n = u.nodes();
    const int m = u.components();
    const double inv_2h = 0.5 / u.grid().spacing;
    double sup = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int c = 0; c < m; ++c) {
            const double left = j > 0 ? u.at(j - 1, c) : 0.0;
            const double right = j < n - 1 ? u.at(j + 1, c) : 0.0;
            sup = std::max(sup, std::fabs((right - left) * inv_2h));
        }
    }
    return sup;
}

}  // namespace

BoundsReport validate_bounds(const ScalarProblem& p, const GridFn& u) {
    if (!(p.a0 > 0.0)) throw ConfigError("bound validation requires a0 > 0");
    BoundsReport report;
    const double K0p = std::cbrt(p.M / p.a0);
    const double K2p = p.a1 * K0p * K0p * K0p + p.M;
    report.K0_predicted = K0p;
    report.K2_predicted = K2p;
    report.K1_predicted = derivative_bound_chain(K0p, K2p);

    report.K0_measured = sup_norm(u);
    report.K1_measured = sup_central_difference(u);
    Env env;
    double K2m = 0.0;
    for (int j = 0; j < u.nodes(); ++j) {
        env.set("t", u.grid().node(j));
        const double uu = u.at(j, 0);
        K2m = std::max(K2m, std::fabs(p.a.eval(env) * uu * uu * uu + p.f.eval(env)));
    }
    report.K2_measured = K2m;
    report.pass = report.K0_measured <= K0p + 1e-6 && report.K1_measured <= *report.K1_predicted + 1e-6 &&
                  report.K2_measured <= K2p + 1e-6;
    return report;
}

BoundsReport measure_bounds(const System1d& sys, const GridFn& u) {
    BoundsReport report;
    report.K0_measured = sup_norm(u);
    report.K1_measured = sup_central_difference(u);
    const int m = u.components();
    std::vector<double> uj(m), N(m);
    double K2m = 0.0;
    for (int j = 0; j < u.nodes(); ++j) {
        for (int c = 0; c < m; ++c) uj[c] = u.at(j, c);
        sys.nonlinearity(j, uj, N);
        for (int c = 0; c < m; ++c)
            K2m = std::max(K2m, std::fabs(sys.coefficient(j, c) * N[c] + sys.forcing(j, c)));
    }
    report.K2_measured = K2m;
    report.pass = std::isfinite(report.K0_measured) && std::isfinite(report.K1_measured) &&
                  std::isfinite(report.K2_measured);
    return report;
}

}  // namespace entsol
