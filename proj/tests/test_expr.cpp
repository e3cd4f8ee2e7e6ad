#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "entsol/errors.hpp"
#include "entsol/expr.hpp"
#include "entsol/rng.hpp"

using namespace entsol;

namespace {

double eval_at(const Expr& e, std::initializer_list<std::pair<const char*, double>> binds) {
    Env env;
    for (const auto& [name, value] : binds) env.set(name, value);
    return e.eval(env);
}

// independent derivative oracle: central finite difference
double central_difference(const Expr& e, const Env& base, const std::string& var, double at,
                          double step = 1e-5) {
    Env env = base;
    env.set(var, at + step);
    const double plus = e.eval(env);
    env.set(var, at - step);
    const double minus = e.eval(env);
    return (plus - minus) / (2.0 * step);
}

}  // namespace

TEST_CASE("parsing the demo forcing term") {
    const Expr e = Expr::parse("2*cos(t) - t*sin(t) - t^3*sin(t)^3");
    CHECK(eval_at(e, {{"t", 0.0}}) == doctest::Approx(2.0).epsilon(1e-15));
    // spot value against direct arithmetic
    const double t = 1.37;
    const double expected =
        2.0 * std::cos(t) - t * std::sin(t) - t * t * t * std::pow(std::sin(t), 3);
    CHECK(eval_at(e, {{"t", t}}) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("variables and simple polynomials") {
    const Expr t = Expr::parse("t");
    CHECK(eval_at(t, {{"t", 3.5}}) == 3.5);
    const Expr e = Expr::parse("z1^4 + z2^2");
    CHECK(eval_at(e, {{"z1", 1.0}, {"z2", 2.0}}) == 5.0);
}

TEST_CASE("declared precedence") {
    CHECK(eval_at(Expr::parse("2+3*4"), {}) == 14.0);
    CHECK(eval_at(Expr::parse("-2^2"), {}) == -4.0);
    CHECK(eval_at(Expr::parse("(1+2)^2"), {}) == 9.0);
    CHECK(eval_at(Expr::parse("2*3^2"), {}) == 18.0);
    CHECK(eval_at(Expr::parse("12/3/2"), {}) == 2.0);
    CHECK(eval_at(Expr::parse("1 - 2 - 3"), {}) == -4.0);
}

TEST_CASE("parse errors carry byte offsets") {
    CHECK_THROWS_AS(Expr::parse(""), SyntaxError);
    CHECK_THROWS_AS(Expr::parse("2*"), SyntaxError);
    CHECK_THROWS_AS(Expr::parse("(1+2"), SyntaxError);
    CHECK_THROWS_AS(Expr::parse("2^t"), SyntaxError);
    CHECK_THROWS_AS(Expr::parse("2^-1"), SyntaxError);
    CHECK_THROWS_AS(Expr::parse("foo(3)"), UnknownFunctionError);
    try {
        Expr::parse("1 + @");
    } catch (const SyntaxError& e) {
        CHECK(e.byte_offset() == 4);
    }
    // unknown variables are fine at parse time, fail at eval
    const Expr e = Expr::parse("bogus + 1");
    CHECK_THROWS_AS(eval_at(e, {}), UnboundVariableError);
}

TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(eval_at(Expr::parse("t"), {}), UnboundVariableError);
    CHECK_THROWS_AS(eval_at(Expr::parse("1/t"), {{"t", 0.0}}), DivisionByZeroError);
}

TEST_CASE("symbolic derivatives, fixed cases") {
    const Expr d1 = Expr::parse("z1^4").diff("z1");
    for (double z : {-1.5, 0.0, 0.3, 2.0})
        CHECK(eval_at(d1, {{"z1", z}}) == doctest::Approx(4.0 * z * z * z).epsilon(1e-14));

    const Expr d2 = Expr::parse("sin(t)").diff("t");
    for (double t : {-2.0, 0.0, 0.7})
        CHECK(eval_at(d2, {{"t", t}}) == doctest::Approx(std::cos(t)).epsilon(1e-14));
}

TEST_CASE("potential gradient value cross-checked by finite differences") {
    const Expr V = Expr::parse("z1^4 + z2^2 + exp(-z1^2 - z2^2)");
    const Expr dV = V.diff("z1");
    Env env;
    env.set("z1", 1.0);
    env.set("z2", 0.0);
    const double symbolic = dV.eval(env);
    const double oracle = central_difference(V, env, "z1", 1.0);
    CHECK(symbolic == doctest::Approx(oracle).epsilon(1e-7));
    // hand differentiation: 4 z1^3 - 2 z1 exp(-z1^2 - z2^2) at (1, 0)
    CHECK(symbolic == doctest::Approx(4.0 - 2.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(symbolic == doctest::Approx(3.2642411176571153).epsilon(1e-14));
}

TEST_CASE("abs differentiates to sgn with sgn(0) = 0") {
    const Expr d = Expr::parse("abs(t)").diff("t");
    CHECK(eval_at(d, {{"t", 2.0}}) == 1.0);
    CHECK(eval_at(d, {{"t", -2.0}}) == -1.0);
    CHECK(eval_at(d, {{"t", 0.0}}) == 0.0);
    // the printed derivative must stay parseable
    CHECK_NOTHROW(Expr::parse(d.str()));
}

namespace {

// random expression trees for the property checks; denominators are kept
// away from zero so finite differences stay meaningful
Expr random_expr(Rng& rng, const std::vector<std::string>& vars, int depth) {
    if (depth == 0 || rng.next_below(5) == 0) {
        if (rng.next_below(3) == 0) return Expr::constant(rng.uniform(-2.0, 2.0));
        return Expr::variable(vars[rng.next_below(vars.size())]);
    }
    switch (rng.next_below(8)) {
        case 0: return random_expr(rng, vars, depth - 1) + random_expr(rng, vars, depth - 1);
        case 1: return random_expr(rng, vars, depth - 1) - random_expr(rng, vars, depth - 1);
        case 2: return random_expr(rng, vars, depth - 1) * random_expr(rng, vars, depth - 1);
        case 3: {
            const Expr denom = Expr::constant(rng.uniform(1.0, 3.0)) +
                               Expr::variable(vars[rng.next_below(vars.size())]).pow(2);
            return random_expr(rng, vars, depth - 1) / denom;
        }
        case 4: return sin(random_expr(rng, vars, depth - 1));
        case 5: return cos(random_expr(rng, vars, depth - 1));
        case 6: return tanh(random_expr(rng, vars, depth - 1));
        default: return random_expr(rng, vars, depth - 1).pow(1 + static_cast<int>(rng.next_below(3)));
    }
}

}  // namespace

TEST_CASE("property: symbolic derivative matches central differences") {
    Rng rng(7);
    const std::vector<std::string> vars{"t", "x", "y"};
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Expr e = random_expr(rng, vars, 3);
        Env env;
        for (const auto& v : vars) env.set(v, rng.uniform(0.2, 1.5));
        const std::string var = vars[rng.next_below(vars.size())];
        const Expr de = e.diff(var);
        const double at = *env.lookup(var);
        double symbolic, fd;
        try {
            symbolic = de.eval(env);
            fd = central_difference(e, env, var, at);
        } catch (const DivisionByZeroError&) {
            continue;
        }
        if (!std::isfinite(symbolic) || std::fabs(symbolic) > 1e6) continue;  // exp blowups
        CHECK(std::fabs(symbolic - fd) <= 1e-6 * (1.0 + std::fabs(symbolic)));
        ++checked;
    }
    CHECK(checked >= 80);  // the generator must mostly produce usable cases
}

TEST_CASE("property: printed form evaluates identically after reparsing") {
    Rng rng(11);
    const std::vector<std::string> vars{"t", "x", "y"};
    for (int trial = 0; trial < 200; ++trial) {
        const Expr e = random_expr(rng, vars, 3);
        const Expr reparsed = Expr::parse(e.str());
        Env env;
        for (const auto& v : vars) env.set(v, rng.uniform(-1.5, 1.5));
        double a, b;
        try {
            a = e.eval(env);
            b = reparsed.eval(env);
        } catch (const DivisionByZeroError&) {
            continue;
        }
        if (std::isnan(a)) {
            CHECK(std::isnan(b));
        } else {
            CHECK(a == b);  // identical trees evaluate bit-identically
        }
    }
}

TEST_CASE("substitution composes potentials with solution expressions") {
    const Expr V = Expr::parse("z1^2 + z1*z2");
    const Expr composed = V.substitute("z1", Expr::parse("sin(t)")).substitute("z2", Expr::parse("t"));
    const double t = 0.83;
    CHECK(eval_at(composed, {{"t", t}}) ==
          doctest::Approx(std::sin(t) * std::sin(t) + std::sin(t) * t).epsilon(1e-15));
}
