#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "entsol/errors.hpp"
#include "entsol/expr.hpp"
#include "entsol/grid.hpp"
#include "entsol/rng.hpp"

using namespace entsol;

namespace {

GridFn sample_expression(const char* text, const Grid1D& grid) {
    const Expr e = Expr::parse(text);
    Env env;
    GridFn f(grid, 1);
    for (int j = 0; j < grid.n_interior; ++j) {
        env.set("t", grid.node(j));
        f.at(j, 0) = e.eval(env);
    }
    return f;
}

// independent oracle: maximize |t sin t| on [-10, 10] by dense scan + local
// golden-section refinement
double true_sup_t_sin_t() {
    auto f = [](double t) { return std::fabs(t * std::sin(t)); };
    double best_t = 0.0, best = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        const double t = -10.0 + 20.0 * i / 100000;
        if (f(t) > best) {
            best = f(t);
            best_t = t;
        }
    }
    double lo = best_t - 1e-3, hi = best_t + 1e-3;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    for (int k = 0; k < 80; ++k) {
        if (f(a) > f(b)) {
            hi = b;
            b = a;
            a = hi - phi * (hi - lo);
        } else {
            lo = a;
            a = b;
            b = lo + phi * (hi - lo);
        }
    }
    return f(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("grid construction and spacing conformity") {
    const Grid1D g1 = Grid1D::make(1.0, 0.5);
    CHECK(g1.n_interior == 3);
    const Grid1D g2 = Grid1D::make(2.0, 0.5);
    CHECK(g2.n_interior == 7);
    CHECK_THROWS_AS(Grid1D::make(1.0, 0.3), NonConformingSpacingError);
    CHECK_THROWS_AS(Grid1D::make(1.0, 4.0), NonConformingSpacingError);
}

TEST_CASE("nesting: nodes of the L grid are bitwise nodes of the 2L grid") {
    for (double h : {0.5, 0.01, 0.05}) {
        const Grid1D small = Grid1D::make(4.0, h);
        const Grid1D big = Grid1D::make(8.0, h);
        const int shift = (big.intervals() - small.intervals()) / 2;
        for (int j = 0; j < small.n_interior; ++j) {
            CHECK(small.node(j) == big.node(j + shift));  // exact, not approximate
        }
    }
}

TEST_CASE("sup norm") {
    const Grid1D g = Grid1D::make(1.0, 0.5);
    GridFn zero(g, 1);
    CHECK(sup_norm(zero) == 0.0);
    GridFn f(g, 1);
    f.at(0, 0) = 1.0;
    f.at(1, 0) = -3.0;
    f.at(2, 0) = 2.0;
    CHECK(sup_norm(f) == 3.0);
}

TEST_CASE("sup norm of a sampled function approaches the true sup") {
    const Grid1D g = Grid1D::make(10.0, 0.01);
    const GridFn f = sample_expression("t*sin(t)", g);
    const double oracle = true_sup_t_sin_t();
    CHECK(oracle == doctest::Approx(7.9167).epsilon(2e-4));
    CHECK(std::fabs(sup_norm(f) - oracle) <= 1e-3);
}

TEST_CASE("H1 seminorm: hand cases and refinement invariance") {
    const Grid1D g = Grid1D::make(1.0, 0.5);
    GridFn zero(g, 1);
    CHECK(h1_seminorm_sq(zero) == 0.0);

    GridFn hat(g, 1);
    hat.at(0, 0) = 0.5;
    hat.at(1, 0) = 1.0;
    hat.at(2, 0) = 0.5;
    CHECK(h1_seminorm_sq(hat) == doctest::Approx(2.0).epsilon(1e-15));

    // cos(pi t / 2) vanishes at the boundary of [-1, 1]; its derivative is
    // -(pi/2) sin(pi t / 2), so the seminorm^2 tends to the closed form
    // (pi/2)^2 * int sin^2 = pi^2/4
    double prev_gap = 1e9;
    for (double h : {0.01, 0.005}) {
        const GridFn s = sample_expression("cos(1.5707963267948966*t)", Grid1D::make(1.0, h));
        const double gap = std::fabs(h1_seminorm_sq(s) - M_PI * M_PI / 4.0);
        CHECK(gap < 1e-3);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }

    // piecewise-linear refinement by midpoint insertion preserves the value
    Rng rng(3);
    const Grid1D coarse = Grid1D::make(2.0, 0.25);
    GridFn data(coarse, 2);
    for (double& v : data.values()) v = rng.uniform(-1.0, 1.0);
    const Grid1D fine = Grid1D::make(2.0, 0.125);
    const GridFn refined = prolong_midpoint(data, fine);
    CHECK(h1_seminorm_sq(refined) == doctest::Approx(h1_seminorm_sq(data)).epsilon(1e-13));
}

TEST_CASE("window restriction") {
    const Grid1D g = Grid1D::make(2.0, 0.5);
    GridFn f(g, 1);
    for (int j = 0; j < g.n_interior; ++j) f.at(j, 0) = g.node(j);

    const GridFn w = restrict_to_window(f, 1.0);
    CHECK(w.grid().n_interior == 3);
    for (int j = 0; j < 3; ++j) {
        CHECK(w.at(j, 0) == w.grid().node(j));
    }

    // W = L is the identity
    const GridFn same = restrict_to_window(f, 2.0);
    for (int j = 0; j < g.n_interior; ++j) CHECK(same.at(j, 0) == f.at(j, 0));

    CHECK_THROWS_AS(restrict_to_window(f, 1.3), WindowNotNestedError);
    CHECK_THROWS_AS(restrict_to_window(f, 1.25), WindowNotNestedError);  // parity mismatch
    CHECK_THROWS_AS(restrict_to_window(f, 3.0), WindowNotNestedError);
}

TEST_CASE("double restriction equals direct restriction") {
    Rng rng(5);
    const Grid1D g = Grid1D::make(4.0, 0.25);
    GridFn f(g, 2);
    for (double& v : f.values()) v = rng.uniform(-2.0, 2.0);
    const GridFn two_step = restrict_to_window(restrict_to_window(f, 2.0), 1.0);
    const GridFn direct = restrict_to_window(f, 1.0);
    for (std::size_t i = 0; i < direct.values().size(); ++i)
        CHECK(two_step.values()[i] == direct.values()[i]);
}

TEST_CASE("derivative bound arithmetic") {
    CHECK(derivative_bound_chain(1.0, 2.0) == 3.0);
    CHECK(derivative_bound_chain(0.0, 0.0) == 0.0);
    CHECK(derivative_bound_chain(1.0, 0.0) == 2.0);
}

TEST_CASE("zero extension plants values on the shared nodes") {
    const Grid1D small = Grid1D::make(1.0, 0.5);
    const Grid1D big = Grid1D::make(2.0, 0.5);
    GridFn f(small, 1);
    f.at(0, 0) = 1.0;
    f.at(1, 0) = 2.0;
    f.at(2, 0) = 3.0;
    const GridFn ext = zero_extend(f, big);
    CHECK(ext.at(0, 0) == 0.0);
    CHECK(ext.at(1, 0) == 0.0);
    CHECK(ext.at(2, 0) == 1.0);
    CHECK(ext.at(3, 0) == 2.0);
    CHECK(ext.at(4, 0) == 3.0);
    CHECK(ext.at(5, 0) == 0.0);
    CHECK(ext.at(6, 0) == 0.0);
}

TEST_CASE("CSV serialization carries grid metadata and boundary rows") {
    const Grid1D g = Grid1D::make(1.0, 0.5);
    GridFn f(g, 2);
    f.at(1, 1) = 0.25;
    std::ostringstream out;
    write_csv(out, f, "demo");
    const std::string text = out.str();
    CHECK(text.find("# L=1 h=0.5 m=2") != std::string::npos);
    CHECK(text.find("# demo") != std::string::npos);
    CHECK(text.find("t,u1,u2") != std::string::npos);
    CHECK(text.find("-1,0,0") != std::string::npos);  // left boundary row
    CHECK(text.find("0,0,0.25") != std::string::npos);
}
