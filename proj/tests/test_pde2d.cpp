#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "entsol/errors.hpp"
#include "entsol/pde2d.hpp"
#include "entsol/rng.hpp"

using namespace entsol;

namespace {

PdeProblem mms_gaussian_2d() {
    PdeProblem base;
    base.m = 1;
    base.V = Expr::parse("z1^2");
    base.a = Expr::parse("1");
    base.f = {Expr::parse("0")};
    ProblemSpec spec = base;
    finalize_problem(spec);
    const ProblemSpec mms = manufacture(spec, {Expr::parse("exp(-x1^2 - x2^2)")});
    return std::get<PdeProblem>(mms);
}

GridFn2D sample2d(const Expr& e, const Grid2D& g, int m = 1) {
    Env env;
    GridFn2D f(g, m);
    for (int row = 0; row < g.n_side; ++row) {
        env.set("x2", g.node(row));
        for (int col = 0; col < g.n_side; ++col) {
            env.set("x1", g.node(col));
            const double v = e.eval(env);
            for (int c = 0; c < m; ++c) f.at(col, row, c) = v;
        }
    }
    return f;
}

const PdeProblem& quartic() {
    static const ProblemSpec p = preset("pde_quartic");
    return std::get<PdeProblem>(p);
}

}  // namespace

TEST_CASE("grid2d layout and window restriction") {
    const Grid2D g = Grid2D::make(2.0, 0.5);
    CHECK(g.n_side == 7);
    CHECK_THROWS_AS(Grid2D::make(1.0, 0.3), NonConformingSpacingError);

    GridFn2D f(g, 1);
    for (int row = 0; row < g.n_side; ++row)
        for (int col = 0; col < g.n_side; ++col)
            f.at(col, row, 0) = 10.0 * g.node(col) + g.node(row);
    const GridFn2D w = restrict_to_window(f, 1.0);
    CHECK(w.side() == 3);
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col)
            CHECK(w.at(col, row, 0) == 10.0 * w.grid().node(col) + w.grid().node(row));
    CHECK_THROWS_AS(restrict_to_window(f, 0.75), WindowNotNestedError);
}

TEST_CASE("five-point residual") {
    SUBCASE("annihilates the zero field when forcing vanishes") {
        PdeProblem p = mms_gaussian_2d();
        p.f = {Expr::parse("0")};
        p.exact.clear();
        const Grid2D g = Grid2D::make(2.0, 0.25);
        CHECK(sup_norm(residual2d(p, GridFn2D(g, 1))) == 0.0);
    }
    SUBCASE("exact on quadratics without mixed terms") {
        // Lap(x1^2 + 2 x2^2) = 6 exactly under the five-point stencil
        PdeProblem p;
        p.m = 1;
        p.V = Expr::parse("z1^2");
        p.a = Expr::parse("0");
        p.f = {Expr::parse("6")};
        ProblemSpec spec = p;
        finalize_problem(spec);
        p = std::get<PdeProblem>(spec);
        const Grid2D g = Grid2D::make(1.0, 0.25);
        const GridFn2D u = sample2d(Expr::parse("x1^2 + 2*x2^2"), g);
        const GridFn2D r = residual2d(p, u);
        // interior nodes away from the boundary see the exact Laplacian
        for (int row = 1; row < g.n_side - 1; ++row)
            for (int col = 1; col < g.n_side - 1; ++col)
                CHECK(r.at(col, row, 0) == doctest::Approx(0.0).epsilon(1e-11));
    }
    SUBCASE("manufactured Gaussian: interior residual is O(h^2)") {
        const PdeProblem p = mms_gaussian_2d();
        double sups[2];
        int k = 0;
        for (double h : {0.1, 0.05}) {
            const Grid2D g = Grid2D::make(4.0, h);
            const GridFn2D u = sample2d(p.exact[0], g);
            const GridFn2D r = residual2d(p, u);
            // skip the boundary-adjacent ring: the stencil there sees zero
            // boundary values instead of the (tiny) exact tail
            double sup = 0.0;
            for (int row = 1; row < g.n_side - 1; ++row)
                for (int col = 1; col < g.n_side - 1; ++col)
                    sup = std::max(sup, std::fabs(r.at(col, row, 0)));
            sups[k++] = sup;
        }
        CHECK(sups[0] / sups[1] == doctest::Approx(4.0).epsilon(0.1));
    }
    SUBCASE("quartic with u = -1: zero away from the boundary ring") {
        const Grid2D g = Grid2D::make(2.0, 0.25);
        GridFn2D u(g, 1);
        for (double& v : u.values()) v = -1.0;
        const GridFn2D r = residual2d(quartic(), u);
        for (int row = 1; row < g.n_side - 1; ++row)
            for (int col = 1; col < g.n_side - 1; ++col)
                CHECK(r.at(col, row, 0) == 0.0);
    }
}

TEST_CASE("2-D jacobian and energy gradient match finite differences") {
    const PdeProblem p = quartic();
    const Grid2D g = Grid2D::make(2.0, 0.25);
    Rng rng(71);
    GridFn2D u(g, 1);
    for (double& v : u.values()) v = rng.uniform(-1.0, 1.0);

    SUBCASE("jacobian directional derivatives") {
        const double eps = 1e-6;
        for (int dir = 0; dir < 20; ++dir) {
            GridFn2D v(g, 1);
            for (double& x : v.values()) x = rng.uniform(-1.0, 1.0);
            const GridFn2D Jv = jacobian_apply2d(p, u, v);
            GridFn2D up = u, um = u;
            for (std::size_t k = 0; k < u.values().size(); ++k) {
                up.values()[k] += eps * v.values()[k];
                um.values()[k] -= eps * v.values()[k];
            }
            const GridFn2D rp = residual2d(p, up);
            const GridFn2D rm = residual2d(p, um);
            double err = 0.0, scale = 0.0;
            for (std::size_t k = 0; k < u.values().size(); ++k) {
                const double fd = (rp.values()[k] - rm.values()[k]) / (2.0 * eps);
                err = std::max(err, std::fabs(fd - Jv.values()[k]));
                scale = std::max(scale, std::fabs(Jv.values()[k]));
            }
            CHECK(err <= 1e-6 * (1.0 + scale));
        }
    }
    SUBCASE("energy gradient component-wise") {
        const GridFn2D grad = energy_gradient2d(p, u);
        const double eps = 1e-6;
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t k = rng.next_below(u.values().size());
            GridFn2D up = u, um = u;
            up.values()[k] += eps;
            um.values()[k] -= eps;
            const double fd = (energy2d(p, up) - energy2d(p, um)) / (2.0 * eps);
            CHECK(std::fabs(fd - grad.values()[k]) <= 1e-6 * (1.0 + std::fabs(grad.values()[k])));
        }
    }
}

TEST_CASE("solve2d") {
    SUBCASE("zero forcing with V'(0) = 0 solves immediately") {
        PdeProblem p = mms_gaussian_2d();
        p.f = {Expr::parse("0")};
        p.exact.clear();
        const SolveReport2d r = solve2d(p, Grid2D::make(2.0, 0.25), Method2d::Newton);
        CHECK(sup_norm(r.solution) == 0.0);
    }
    SUBCASE("quartic: central value near -1") {
        const Grid2D g = Grid2D::make(8.0, 0.1);
        const SolveReport2d r = solve2d(quartic(), g, Method2d::Newton);
        CHECK(r.final_residual_sup <= 1e-8);
        const int center = g.n_side / 2;
        CHECK(g.node(center) == 0.0);
        CHECK(std::fabs(r.solution.at(center, center, 0) + 1.0) <= 5e-3);
        CHECK(sup_norm(r.solution) <= 1.0 + 1e-6);  // discrete maximum principle
    }
    SUBCASE("manufactured Gaussian recovered on the window") {
        const PdeProblem p = mms_gaussian_2d();
        double errors[2];
        int k = 0;
        for (double h : {0.05, 0.025}) {
            const SolveReport2d r = solve2d(p, Grid2D::make(4.0, h), Method2d::Newton);
            const GridFn2D w = restrict_to_window(r.solution, 1.5);
            Env env;
            double err = 0.0;
            for (int row = 0; row < w.side(); ++row) {
                env.set("x2", w.grid().node(row));
                for (int col = 0; col < w.side(); ++col) {
                    env.set("x1", w.grid().node(col));
                    err = std::max(err, std::fabs(w.at(col, row, 0) - p.exact[0].eval(env)));
                }
            }
            errors[k++] = err;
        }
        CHECK(errors[0] <= 1e-3);
        CHECK(errors[0] / errors[1] == doctest::Approx(4.0).epsilon(0.2));
    }
    SUBCASE("minimize path agrees with newton path on the quartic") {
        const Grid2D g = Grid2D::make(4.0, 0.1);
        Solve2dOptions opts;
        opts.tolerance = 1e-9;
        const SolveReport2d a = solve2d(quartic(), g, Method2d::Newton, opts);
        const SolveReport2d b = solve2d(quartic(), g, Method2d::Minimize, opts);
        double gap = 0.0;
        for (std::size_t k = 0; k < a.solution.values().size(); ++k)
            gap = std::max(gap, std::fabs(a.solution.values()[k] - b.solution.values()[k]));
        CHECK(gap <= 1e-7);
    }
}

TEST_CASE("2-D energy: zero extension is energy-neutral and M_L non-increasing") {
    const PdeProblem p = mms_gaussian_2d();
    Solve2dOptions opts;
    opts.tolerance = 1e-10;
    const Grid2D small = Grid2D::make(2.0, 0.1);
    const Grid2D big = Grid2D::make(4.0, 0.1);
    const SolveReport2d us = solve2d(p, small, Method2d::Minimize, opts);
    const GridFn2D extended = zero_extend(us.solution, big);
    CHECK(energy2d(p, extended) == doctest::Approx(energy2d(p, us.solution)).epsilon(1e-13));
    const SolveReport2d ub = solve2d(p, big, Method2d::Minimize, opts, &extended);
    CHECK(energy2d(p, ub.solution) <= energy2d(p, us.solution) + 1e-8);
}

TEST_CASE("interior bounds") {
    SUBCASE("zero field") {
        const Grid2D g = Grid2D::make(4.0, 0.25);
        const InteriorBounds b = interior_bounds(GridFn2D(g, 1));
        CHECK(b.sup_u_full == 0.0);
        CHECK(b.sup_Du_margin1 == 0.0);
        CHECK(b.sup_D2u_margin2 == 0.0);
        CHECK(b.holder_quotient_sample == 0.0);
    }
    SUBCASE("margins require L > 2") {
        const Grid2D g = Grid2D::make(2.0, 0.25);
        CHECK_THROWS_AS(interior_bounds(GridFn2D(g, 1)), MarginTooLargeError);
    }
    SUBCASE("bilinear field: pure second differences vanish, mixed is 1") {
        const Grid2D g = Grid2D::make(4.0, 0.25);
        const GridFn2D u = sample2d(Expr::parse("x1*x2"), g);
        const InteriorBounds b = interior_bounds(u);
        CHECK(b.sup_D2u_margin2 == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("quartic solves: quantities stay level-independent") {
        Solve2dOptions opts;
        const SolveReport2d a = solve2d(quartic(), Grid2D::make(4.0, 0.1), Method2d::Newton, opts);
        const SolveReport2d b = solve2d(quartic(), Grid2D::make(8.0, 0.1), Method2d::Newton, opts);
        const InteriorBounds ba = interior_bounds(a.solution);
        const InteriorBounds bb = interior_bounds(b.solution);
        CHECK(bb.sup_u_full <= ba.sup_u_full * 1.05);
        CHECK(bb.sup_Du_margin1 <= ba.sup_Du_margin1 * 1.05);
        CHECK(bb.sup_D2u_margin2 <= ba.sup_D2u_margin2 * 1.05);
        CHECK(bb.holder_quotient_sample <= ba.holder_quotient_sample * 1.05);
    }
}

TEST_CASE("expand2d") {
    SUBCASE("quartic converges to the constant interior profile") {
        Study2dOptions opts;
        opts.window = 2.0;
        opts.tolerance = 5e-3;
        opts.L0 = 4.0;
        opts.Lmax = 16.0;
        opts.spacing = 0.1;
        const ConvergenceStudy2d study = expand2d(quartic(), opts);
        REQUIRE(study.converged);
        double err = 0.0;
        for (double v : study.final_window_solution.values())
            err = std::max(err, std::fabs(v + 1.0));
        CHECK(err <= 5e-3);
    }
    SUBCASE("manufactured Gaussian study converges to the exact solution") {
        const PdeProblem p = mms_gaussian_2d();
        Study2dOptions opts;
        opts.window = 1.0;
        opts.tolerance = 1e-4;
        opts.L0 = 2.0;
        opts.Lmax = 8.0;
        opts.spacing = 0.1;
        const ConvergenceStudy2d study = expand2d(p, opts);
        REQUIRE(study.converged);
        Env env;
        double err = 0.0;
        const GridFn2D& w = study.final_window_solution;
        for (int row = 0; row < w.side(); ++row) {
            env.set("x2", w.grid().node(row));
            for (int col = 0; col < w.side(); ++col) {
                env.set("x1", w.grid().node(col));
                err = std::max(err, std::fabs(w.at(col, row, 0) - p.exact[0].eval(env)));
            }
        }
        CHECK(err <= 5e-3);  // discretization error at h = 0.1
    }
    SUBCASE("tol = infinity: single solve, trivially converged") {
        Study2dOptions opts;
        opts.window = 2.0;
        opts.tolerance = std::numeric_limits<double>::infinity();
        opts.L0 = 4.0;
        opts.Lmax = 4.0;
        opts.spacing = 0.25;
        const ConvergenceStudy2d study = expand2d(quartic(), opts);
        CHECK(study.converged);
        CHECK(study.Ls.size() == 1);
    }
}
