#include "entsol/pde2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "entsol/errors.hpp"
#include "entsol/linalg.hpp"
#include "entsol/rng.hpp"

namespace entsol {

Grid2D Grid2D::make(double half_length, double spacing) {
    const Grid1D axis = Grid1D::make(half_length, spacing);  // shares the validation
    Grid2D g;
    g.half_length = half_length;
    g.spacing = spacing;
    g.n_side = axis.n_interior;
    return g;
}

double sup_norm(const GridFn2D& f) {
    double s = 0.0;
    for (double v : f.values()) s = std::max(s, std::fabs(v));
    return s;
}

GridFn2D restrict_to_window(const GridFn2D& f, double window_half_length) {
    const Grid2D& g = f.grid();
    if (window_half_length > g.half_length * (1.0 + 1e-12))
        throw WindowNotNestedError("window exceeds the grid half-length");
    Grid2D w;
    try {
        w = Grid2D::make(window_half_length, g.spacing);
    } catch (const NonConformingSpacingError&) {
        throw WindowNotNestedError("window half-length is not a node coordinate");
    }
    if ((g.intervals() - w.intervals()) % 2 != 0)
        throw WindowNotNestedError("window nodes are not a subset of the grid nodes");
    const int shift = (g.intervals() - w.intervals()) / 2;
    GridFn2D out(w, f.components());
    for (int row = 0; row < w.n_side; ++row)
        for (int col = 0; col < w.n_side; ++col)
            for (int c = 0; c < f.components(); ++c)
                out.at(col, row, c) = f.at(col + shift, row + shift, c);
    return out;
}

GridFn2D zero_extend(const GridFn2D& f, const Grid2D& larger) {
    const Grid2D& g = f.grid();
    if (larger.half_length < g.half_length || larger.spacing != g.spacing ||
        (larger.intervals() - g.intervals()) % 2 != 0)
        throw WindowNotNestedError("target grid does not nest the source grid");
    const int shift = (larger.intervals() - g.intervals()) / 2;
    GridFn2D out(larger, f.components());
    for (int row = 0; row < g.n_side; ++row)
        for (int col = 0; col < g.n_side; ++col)
            for (int c = 0; c < f.components(); ++c)
                out.at(col + shift, row + shift, c) = f.at(col, row, c);
    return out;
}

namespace {

// Coefficient and forcing sampled once per grid; V evaluations go through a
// reused Env. All hot loops run over the flat value arrays.
class System2d {
public:
    System2d(const PdeProblem& p, const Grid2D& grid) : p_(&p), grid_(grid), m_(p.m) {
        const int n = grid.n_side;
        coeff_.resize(static_cast<std::size_t>(n) * n);
        forcing_.resize(static_cast<std::size_t>(n) * n * m_);
        Env env;
        for (int row = 0; row < n; ++row) {
            env.set("x2", grid.node(row));
            for (int col = 0; col < n; ++col) {
                env.set("x1", grid.node(col));
                const std::size_t node = static_cast<std::size_t>(row) * n + col;
                coeff_[node] = p.a.eval(env);
                for (int c = 0; c < m_; ++c)
                    forcing_[node * m_ + c] = p.f[c].eval(env);
            }
        }
        // rest-state potential for the energy offset
        for (int i = 0; i < m_; ++i) env_.set(z_name(i), 0.0);
        V0_ = p.V.eval(env_);
    }

    const Grid2D& grid() const { return grid_; }
    int components() const { return m_; }
    double coefficient(std::size_t node) const { return coeff_[node]; }
    double forcing(std::size_t node, int c) const { return forcing_[node * m_ + c]; }
    double rest_potential() const { return V0_; }

    double potential(std::span<const double> u) const {
        for (int i = 0; i < m_; ++i) env_.set(z_name(i), u[i]);
        return p_->V.eval(env_);
    }
    void gradient(std::span<const double> u, std::span<double> Vz) const {
        for (int i = 0; i < m_; ++i) env_.set(z_name(i), u[i]);
        for (int i = 0; i < m_; ++i) Vz[i] = p_->Vz[i].eval(env_);
    }
    void hessian(std::span<const double> u, std::span<double> Vzz) const {
        for (int i = 0; i < m_; ++i) env_.set(z_name(i), u[i]);
        for (int i = 0; i < m_ * m_; ++i) Vzz[i] = p_->Vzz[i].eval(env_);
    }

private:
    static std::string z_name(int i) { return "z" + std::to_string(i + 1); }

    const PdeProblem* p_;
    Grid2D grid_;
    int m_;
    std::vector<double> coeff_, forcing_;
    mutable Env env_;
    double V0_ = 0.0;
};

// residual with a homotopy weight on the nonlinearity
void residual2d_lambda(const System2d& sys, double lambda, const GridFn2D& u, GridFn2D& out) {
    const int n = sys.grid().n_side;
    const int m = sys.components();
    const double inv_h2 = 1.0 / (sys.grid().spacing * sys.grid().spacing);
    std::vector<double> uj(m), Vz(m);
    const std::vector<double>& v = u.values();
    std::vector<double>& r = out.values();
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            const std::size_t node = static_cast<std::size_t>(row) * n + col;
            for (int c = 0; c < m; ++c) uj[c] = v[node * m + c];
            sys.gradient(uj, Vz);
            for (int c = 0; c < m; ++c) {
                const double center = v[node * m + c];
                const double left = col > 0 ? v[(node - 1) * m + c] : 0.0;
                const double right = col < n - 1 ? v[(node + 1) * m + c] : 0.0;
                const double down = row > 0 ? v[(node - n) * m + c] : 0.0;
                const double up = row < n - 1 ? v[(node + n) * m + c] : 0.0;
                const double lap = (left + right + up + down - 4.0 * center) * inv_h2;
                r[node * m + c] =
                    lap - lambda * sys.coefficient(node) * Vz[c] - sys.forcing(node, c);
            }
        }
    }
}

// Newton linear systems, solved by CG on the negated operator
//   (-Lap + lambda a Hess V(u)) d = r.
class NewtonOperator2d {
public:
    NewtonOperator2d(const System2d& sys, double lambda, const GridFn2D& u)
        : n_(sys.grid().n_side), m_(sys.components()),
          inv_h2_(1.0 / (sys.grid().spacing * sys.grid().spacing)) {
        const std::size_t nodes = static_cast<std::size_t>(n_) * n_;
        blocks_.resize(nodes * m_ * m_);
        inv_diag_.resize(nodes * m_);
        std::vector<double> uj(m_), H(m_ * m_);
        const std::vector<double>& v = u.values();
        for (std::size_t node = 0; node < nodes; ++node) {
            for (int c = 0; c < m_; ++c) uj[c] = v[node * m_ + c];
            sys.hessian(uj, H);
            const double s = lambda * sys.coefficient(node);
            for (int i = 0; i < m_ * m_; ++i) blocks_[node * m_ * m_ + i] = s * H[i];
            for (int c = 0; c < m_; ++c) {
                const double d = 4.0 * inv_h2_ + s * H[c * m_ + c];
                inv_diag_[node * m_ + c] = d > 0.0 ? 1.0 / d : 1.0;
            }
        }
    }

    std::span<const double> inv_diag() const { return inv_diag_; }

    void apply(std::span<const double> x, std::span<double> y) const {
        const int n = n_;
        const int m = m_;
        for (int row = 0; row < n; ++row) {
            for (int col = 0; col < n; ++col) {
                const std::size_t node = static_cast<std::size_t>(row) * n + col;
                const double* block = &blocks_[node * m * m];
                for (int c = 0; c < m; ++c) {
                    const double center = x[node * m + c];
                    const double left = col > 0 ? x[(node - 1) * m + c] : 0.0;
                    const double right = col < n - 1 ? x[(node + 1) * m + c] : 0.0;
                    const double down = row > 0 ? x[(node - n) * m + c] : 0.0;
                    const double up = row < n - 1 ? x[(node + n) * m + c] : 0.0;
                    double s = (4.0 * center - left - right - up - down) * inv_h2_;
                    for (int c2 = 0; c2 < m; ++c2) s += block[c * m + c2] * x[node * m + c2];
                    y[node * m + c] = s;
                }
            }
        }
    }

private:
    int n_, m_;
    double inv_h2_;
    std::vector<double> blocks_;
    std::vector<double> inv_diag_;
};

struct NewtonResult2d {
    int iterations = 0;
    double residual_sup = 0.0;
};

// Damped Newton at a fixed lambda; modifies u in place.
NewtonResult2d newton2d(const System2d& sys, double lambda, GridFn2D& u,
                        const Solve2dOptions& options) {
    GridFn2D r(sys.grid(), sys.components());
    residual2d_lambda(sys, lambda, u, r);
    double r_sup = sup_norm(r);
    const std::size_t total = r.values().size();
    GridFn2D trial = u;
    std::vector<double> direction(total);
    NewtonResult2d result;
    for (int iter = 0; iter < options.max_newton_iterations; ++iter) {
        if (r_sup <= options.tolerance) {
            result.iterations = iter;
            result.residual_sup = r_sup;
            return result;
        }
        NewtonOperator2d op(sys, lambda, u);
        std::fill(direction.begin(), direction.end(), 0.0);
        // solve (-J) d = r, then step u += d (equivalent to u -= J^{-1} r)
        CgResult cg = conjugate_gradient(
            [&op](std::span<const double> x, std::span<double> y) { op.apply(x, y); },
            op.inv_diag(), r.values(), direction, options.cg_rel_tol, options.cg_max_iterations);
        if (!cg.converged) throw CgNoConvergenceError(cg.iterations, cg.rel_residual);

        double scale = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 30; ++halving) {
            for (std::size_t k = 0; k < total; ++k)
                trial.values()[k] = u.values()[k] + scale * direction[k];
            GridFn2D r_trial(sys.grid(), sys.components());
            residual2d_lambda(sys, lambda, trial, r_trial);
            const double trial_sup = sup_norm(r_trial);
            if (trial_sup < r_sup) {
                u = trial;
                r = std::move(r_trial);
                r_sup = trial_sup;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) throw NewtonStalledError(iter, r_sup);
    }
    if (r_sup <= options.tolerance) {
        result.iterations = options.max_newton_iterations;
        result.residual_sup = r_sup;
        return result;
    }
    throw MaxIterationsError(options.max_newton_iterations, r_sup);
}

void linear_poisson2d(const System2d& sys, GridFn2D& u, const Solve2dOptions& options) {
    // solve Lap u = f  as  (-Lap) u = -f by CG
    const std::size_t total = u.values().size();
    std::vector<double> rhs(total);
    const int m = sys.components();
    for (std::size_t node = 0; node < total / m; ++node)
        for (int c = 0; c < m; ++c) rhs[node * m + c] = -sys.forcing(node, c);
    GridFn2D zero(sys.grid(), m);
    NewtonOperator2d op(sys, 0.0, zero);
    std::fill(u.values().begin(), u.values().end(), 0.0);
    CgResult cg = conjugate_gradient(
        [&op](std::span<const double> x, std::span<double> y) { op.apply(x, y); }, op.inv_diag(),
        rhs, u.values(), options.cg_rel_tol, options.cg_max_iterations);
    if (!cg.converged) throw CgNoConvergenceError(cg.iterations, cg.rel_residual);
}

double energy2d_with(const System2d& sys, const GridFn2D& u) {
    const int n = sys.grid().n_side;
    const int m = sys.components();
    const double h = sys.grid().spacing;
    const std::vector<double>& v = u.values();
    // kinetic: forward differences in both directions, boundary gaps included
    double kinetic = 0.0;
    for (int c = 0; c < m; ++c) {
        for (int row = 0; row < n; ++row) {
            double prev = 0.0;
            for (int col = 0; col < n; ++col) {
                const double val = v[(static_cast<std::size_t>(row) * n + col) * m + c];
                const double d = val - prev;
                kinetic += d * d;
                prev = val;
            }
            kinetic += prev * prev;  // gap to the right boundary
        }
        for (int col = 0; col < n; ++col) {
            double prev = 0.0;
            for (int row = 0; row < n; ++row) {
                const double val = v[(static_cast<std::size_t>(row) * n + col) * m + c];
                const double d = val - prev;
                kinetic += d * d;
                prev = val;
            }
            kinetic += prev * prev;
        }
    }
    kinetic *= 0.5;  // ((dv)/h)^2 * h^2 leaves the squared difference alone

    double potential = 0.0;
    std::vector<double> uj(m);
    for (std::size_t node = 0; node < static_cast<std::size_t>(n) * n; ++node) {
        for (int c = 0; c < m; ++c) uj[c] = v[node * m + c];
        double density = sys.coefficient(node) * (sys.potential(uj) - sys.rest_potential());
        for (int c = 0; c < m; ++c) density += uj[c] * sys.forcing(node, c);
        potential += density;
    }
    return kinetic + h * h * potential;
}

SolveReport2d minimize2d(const System2d& sys, const Solve2dOptions& options,
                         const GridFn2D* initial_guess) {
    const Grid2D& grid = sys.grid();
    const int m = sys.components();
    GridFn2D u = initial_guess ? *initial_guess : GridFn2D(grid, m);
    const double h2 = grid.spacing * grid.spacing;
    const std::size_t total = u.values().size();

    GridFn2D r(grid, m);
    residual2d_lambda(sys, 1.0, u, r);
    double J = energy2d_with(sys, u);
    GridFn2D trial = u;
    double gd_step = 1.0;
    int cooldown = 0;
    SolveReport2d report;
    report.method = Method2d::Minimize;

    double best_residual = std::numeric_limits<double>::infinity();
    double best_J = std::numeric_limits<double>::infinity();
    int stagnant = 0;

    const int max_iterations = 200000;
    for (int iter = 0; iter < max_iterations; ++iter) {
        const double r_sup = sup_norm(r);
        if (r_sup <= options.tolerance) {
            report.solution = std::move(u);
            report.iterations = iter;
            report.final_residual_sup = r_sup;
            return report;
        }
        const bool residual_improved = r_sup < 0.99 * best_residual;
        const bool J_improved = J < best_J - 1e-12 * (1.0 + std::fabs(J));
        best_residual = std::min(best_residual, r_sup);
        best_J = std::min(best_J, J);
        if (residual_improved || J_improved) {
            stagnant = 0;
        } else if (++stagnant > 200) {
            throw LineSearchStalledError(iter);
        }
        bool stepped = false;
        const double grad_sup = h2 * r_sup;  // gradient = -h^2 residual
        if (grad_sup < 1.0 && cooldown == 0) {
            try {
                NewtonOperator2d op(sys, 1.0, u);
                std::vector<double> direction(total, 0.0);
                CgResult cg = conjugate_gradient(
                    [&op](std::span<const double> x, std::span<double> y) { op.apply(x, y); },
                    op.inv_diag(), r.values(), direction, options.cg_rel_tol,
                    options.cg_max_iterations);
                if (cg.converged) {
                    // slope of J along the direction: grad . d = -h^2 r . d
                    double slope = 0.0;
                    for (std::size_t k = 0; k < total; ++k)
                        slope -= h2 * r.values()[k] * direction[k];
                    if (slope < 0.0) {
                        const double energy_resolution =
                            32.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(J));
                        double scale = 1.0;
                        GridFn2D r_trial(grid, m);
                        for (int halving = 0; halving < 30; ++halving) {
                            for (std::size_t k = 0; k < total; ++k)
                                trial.values()[k] = u.values()[k] + scale * direction[k];
                            const double J_trial = energy2d_with(sys, trial);
                            residual2d_lambda(sys, 1.0, trial, r_trial);
                            bool accept;
                            if (std::fabs(scale * slope) > energy_resolution) {
                                accept = J_trial <= J + 1e-4 * scale * slope;
                            } else {
                                // energy differences are rounding noise here;
                                // fall back to residual decrease
                                accept = sup_norm(r_trial) < r_sup &&
                                         J_trial <= J + energy_resolution;
                            }
                            if (accept) {
                                u = trial;
                                J = J_trial;
                                r = r_trial;
                                stepped = true;
                                break;
                            }
                            scale *= 0.5;
                        }
                    }
                }
            } catch (const SolveError&) {
            }
            if (!stepped) cooldown = 20;
        }
        if (cooldown > 0) --cooldown;
        if (!stepped) {
            // descent direction = +h^2 r; slope = -|grad|^2
            double slope = 0.0;
            for (std::size_t k = 0; k < total; ++k)
                slope -= h2 * h2 * r.values()[k] * r.values()[k];
            double scale = gd_step;
            bool accepted = false;
            for (int halving = 0; halving < 60; ++halving) {
                for (std::size_t k = 0; k < total; ++k)
                    trial.values()[k] = u.values()[k] + scale * h2 * r.values()[k];
                const double J_trial = energy2d_with(sys, trial);
                if (J_trial <= J + 1e-4 * scale * slope) {
                    u = trial;
                    J = J_trial;
                    residual2d_lambda(sys, 1.0, u, r);
                    gd_step = 2.0 * scale;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if (!accepted) throw LineSearchStalledError(iter);
        }
    }
    throw MaxIterationsError(max_iterations, sup_norm(r));
}

}  // namespace

GridFn2D residual2d(const PdeProblem& p, const GridFn2D& u) {
    System2d sys(p, u.grid());
    GridFn2D r(u.grid(), p.m);
    residual2d_lambda(sys, 1.0, u, r);
    return r;
}

GridFn2D jacobian_apply2d(const PdeProblem& p, const GridFn2D& u, const GridFn2D& v) {
    System2d sys(p, u.grid());
    NewtonOperator2d op(sys, 1.0, u);
    GridFn2D out(u.grid(), p.m);
    op.apply(v.values(), out.values());
    // op is the negated Jacobian
    for (double& x : out.values()) x = -x;
    return out;
}

double energy2d(const PdeProblem& p, const GridFn2D& u) {
    return energy2d_with(System2d(p, u.grid()), u);
}

GridFn2D energy_gradient2d(const PdeProblem& p, const GridFn2D& u) {
    GridFn2D g = residual2d(p, u);
    const double h2 = u.grid().spacing * u.grid().spacing;
    for (double& x : g.values()) x *= -h2;
    return g;
}

SolveReport2d solve2d(const PdeProblem& p, const Grid2D& grid, Method2d method,
                      const Solve2dOptions& options, const GridFn2D* initial_guess) {
    System2d sys(p, grid);
    if (method == Method2d::Minimize) return minimize2d(sys, options, initial_guess);

    SolveReport2d report;
    report.method = Method2d::Newton;

    if (initial_guess) {
        if (!initial_guess->grid().same_layout(grid))
            throw ConfigError("initial guess lives on another grid");
        try {
            GridFn2D u = *initial_guess;
            NewtonResult2d res = newton2d(sys, 1.0, u, options);
            report.solution = std::move(u);
            report.lambda_path.push_back({1.0, res.iterations});
            report.iterations = res.iterations;
            report.final_residual_sup = res.residual_sup;
            return report;
        } catch (const SolveError&) {
            // fall back to the homotopy from scratch
        }
    }

    GridFn2D u(grid, p.m);
    linear_poisson2d(sys, u, options);
    report.lambda_path.push_back({0.0, 0});
    double lambda = 0.0;
    double step = 0.25;
    int total_iterations = 0;
    while (lambda < 1.0) {
        const double lambda_next = std::min(1.0, lambda + step);
        GridFn2D candidate = u;
        try {
            NewtonResult2d res = newton2d(sys, lambda_next, candidate, options);
            u = std::move(candidate);
            report.lambda_path.push_back({lambda_next, res.iterations});
            report.final_residual_sup = res.residual_sup;
            total_iterations += res.iterations;
            lambda = lambda_next;
            if (res.iterations <= 4) step = std::min(2.0 * step, 0.25);
        } catch (const SolveError&) {
            step *= 0.5;
            if (step < options.lambda_min_step) throw ContinuationFailedError(lambda);
        }
    }
    report.solution = std::move(u);
    report.iterations = total_iterations;
    return report;
}

InteriorBounds interior_bounds(const GridFn2D& u, std::uint64_t seed, int pair_samples) {
    const Grid2D& g = u.grid();
    if (!(g.half_length > 2.0)) throw MarginTooLargeError(g.half_length);
    const int n = g.n_side;
    const int m = u.components();
    const double h = g.spacing;

    InteriorBounds out;
    out.sup_u_full = sup_norm(u);

    auto value = [&](int col, int row, int c) {
        if (col < 0 || col >= n || row < 0 || row >= n) return 0.0;
        return u.at(col, row, c);
    };
    auto inside_margin = [&](int col, int row, double margin) {
        return std::fabs(g.node(col)) <= g.half_length - margin + 1e-12 &&
               std::fabs(g.node(row)) <= g.half_length - margin + 1e-12;
    };

    const double inv_2h = 0.5 / h;
    const double inv_h2 = 1.0 / (h * h);
    const double inv_4h2 = 0.25 * inv_h2;

    enum { Dxx = 0, Dyy = 1, Dxy = 2 };
    auto second_difference = [&](int col, int row, int c, int which) {
        switch (which) {
            case Dxx:
                return (value(col + 1, row, c) - 2.0 * value(col, row, c) +
                        value(col - 1, row, c)) * inv_h2;
            case Dyy:
                return (value(col, row + 1, c) - 2.0 * value(col, row, c) +
                        value(col, row - 1, c)) * inv_h2;
            default:
                return (value(col + 1, row + 1, c) - value(col + 1, row - 1, c) -
                        value(col - 1, row + 1, c) + value(col - 1, row - 1, c)) * inv_4h2;
        }
    };

    std::vector<std::pair<int, int>> margin2_nodes;
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            if (inside_margin(col, row, 1.0)) {
                for (int c = 0; c < m; ++c) {
                    const double dx = (value(col + 1, row, c) - value(col - 1, row, c)) * inv_2h;
                    const double dy = (value(col, row + 1, c) - value(col, row - 1, c)) * inv_2h;
                    out.sup_Du_margin1 =
                        std::max({out.sup_Du_margin1, std::fabs(dx), std::fabs(dy)});
                }
            }
            if (inside_margin(col, row, 2.0)) {
                margin2_nodes.emplace_back(col, row);
                for (int c = 0; c < m; ++c)
                    for (int which : {Dxx, Dyy, Dxy})
                        out.sup_D2u_margin2 = std::max(
                            out.sup_D2u_margin2, std::fabs(second_difference(col, row, c, which)));
            }
        }
    }

    // sampled Hoelder quotient of the second differences, exponent 1/2,
    // over pairs at Euclidean distance <= 1
    Rng rng(seed);
    const int max_offset = std::max(1, static_cast<int>(1.0 / h));
    double quotient = 0.0;
    if (!margin2_nodes.empty()) {
        for (int k = 0; k < pair_samples; ++k) {
            const auto [col, row] = margin2_nodes[rng.next_below(margin2_nodes.size())];
            const int dc = static_cast<int>(rng.next_below(2 * max_offset + 1)) - max_offset;
            const int dr = static_cast<int>(rng.next_below(2 * max_offset + 1)) - max_offset;
            if (dc == 0 && dr == 0) continue;
            const double dist = h * std::sqrt(double(dc) * dc + double(dr) * dr);
            if (dist > 1.0) continue;
            const int col2 = col + dc, row2 = row + dr;
            if (col2 < 0 || col2 >= n || row2 < 0 || row2 >= n ||
                !inside_margin(col2, row2, 2.0))
                continue;
            for (int c = 0; c < m; ++c) {
                for (int which : {Dxx, Dyy, Dxy}) {
                    const double gap = std::fabs(second_difference(col, row, c, which) -
                                                 second_difference(col2, row2, c, which));
                    quotient = std::max(quotient, gap / std::sqrt(dist));
                }
            }
        }
    }
    out.holder_quotient_sample = quotient;
    return out;
}

ConvergenceStudy2d expand2d(const PdeProblem& p, const Study2dOptions& options) {
    const double W = options.window;
    if (!(options.L0 >= std::max(W, 1.0))) throw ConfigError("L0 must be at least max(W, 1)");
    {
        double q = options.Lmax / options.L0;
        while (q > 1.5) q /= 2.0;
        if (std::fabs(q - 1.0) > 1e-9) throw ConfigError("Lmax must be L0 times a power of two");
    }

    ConvergenceStudy2d study;
    study.window_half_length = W;
    GridFn2D previous_window;
    GridFn2D previous_solution;
    bool have_previous = false;

    for (double L = options.L0; L <= options.Lmax * (1.0 + 1e-12); L *= 2.0) {
        const Grid2D grid = Grid2D::make(L, options.spacing);
        SolveReport2d report;
        if (have_previous) {
            GridFn2D guess = zero_extend(previous_solution, grid);
            report = solve2d(p, grid, options.method, options.solve, &guess);
        } else {
            report = solve2d(p, grid, options.method, options.solve);
        }
        study.Ls.push_back(L);
        if (L > 2.0) study.interior_bounds.push_back(interior_bounds(report.solution));
        GridFn2D window = restrict_to_window(report.solution, W);
        if (have_previous) {
            double d = 0.0;
            for (std::size_t i = 0; i < window.values().size(); ++i)
                d = std::max(d, std::fabs(window.values()[i] - previous_window.values()[i]));
            study.window_diffs.push_back(d);
        }
        previous_window = std::move(window);
        previous_solution = std::move(report.solution);
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
            study.converged = true;
            break;
        }
    }
    study.final_window_solution = std::move(previous_window);
    return study;
}

void write_csv(std::ostream& out, const GridFn2D& f, std::string_view comment) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# L=%g h=%g m=%d\n", f.grid().half_length,
                  f.grid().spacing, f.components());
    out << buf;
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "x1,x2";
    for (int c = 0; c < f.components(); ++c) out << ",u" << (c + 1);
    out << "\n";
    const int n = f.side();
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g", f.grid().node(col),
                          f.grid().node(row));
            out << buf;
            for (int c = 0; c < f.components(); ++c) {
                std::snprintf(buf, sizeof(buf), ",%.17g", f.at(col, row, c));
                out << buf;
            }
            out << "\n";
        }
    }
}

}  // namespace entsol
