#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entsol/driver.hpp"
#include "entsol/errors.hpp"

using namespace entsol;

namespace {

ProblemSpec mms_gaussian() {
    ScalarProblem base;
    base.a = Expr::parse("1");
    base.f = Expr::parse("0");
    base.a0 = base.a1 = 1.0;
    return manufacture(base, {Expr::parse("exp(-t^2)")});
}

}  // namespace

TEST_CASE("expand_until_converged on the constant model") {
    StudyOptions opts;
    opts.window = 2.0;
    opts.tolerance = 1e-6;
    opts.L0 = 4.0;
    opts.Lmax = 32.0;
    opts.spacing = 0.01;
    const ConvergenceStudy study = expand_until_converged(preset("model_constant"), opts);
    REQUIRE(study.converged);
    // the window profile is the whole-line constant -1
    double err = 0.0;
    for (int j = 0; j < study.final_window_solution.nodes(); ++j)
        err = std::max(err, std::fabs(study.final_window_solution.at(j, 0) + 1.0));
    CHECK(err <= 1e-4);
    // strictly decreasing diffs
    for (std::size_t i = 1; i < study.window_diffs.size(); ++i)
        CHECK(study.window_diffs[i] < study.window_diffs[i - 1]);
    CHECK(study.window_diffs.back() <= 1e-6);
    // uniform bounds: identical predicted triple, every level passes
    REQUIRE(!study.bounds_reports.empty());
    for (const BoundsReport& b : study.bounds_reports) {
        CHECK(b.pass);
        CHECK(*b.K0_predicted == *study.bounds_reports.front().K0_predicted);
        CHECK(*b.K1_predicted == *study.bounds_reports.front().K1_predicted);
        CHECK(*b.K2_predicted == *study.bounds_reports.front().K2_predicted);
    }
}

TEST_CASE("expand_until_converged recovers the manufactured solution") {
    StudyOptions opts;
    opts.window = 2.0;
    opts.tolerance = 1e-6;
    opts.L0 = 4.0;
    opts.Lmax = 32.0;
    opts.spacing = 0.01;
    const ProblemSpec mms = mms_gaussian();
    const ConvergenceStudy study = expand_until_converged(mms, opts);
    REQUIRE(study.converged);
    const auto& exact = std::get<ScalarProblem>(mms).exact[0];
    Env env;
    double err = 0.0;
    for (int j = 0; j < study.final_window_solution.nodes(); ++j) {
        env.set("t", study.final_window_solution.grid().node(j));
        err = std::max(err, std::fabs(study.final_window_solution.at(j, 0) - exact.eval(env)));
    }
    CHECK(err <= 2e-4);
}

TEST_CASE("study through the variational route matches the homotopy route") {
    StudyOptions newton_opts;
    newton_opts.window = 2.0;
    newton_opts.tolerance = 1e-6;
    newton_opts.L0 = 4.0;
    newton_opts.Lmax = 32.0;
    newton_opts.spacing = 0.02;
    newton_opts.solver = SolverChoice::Continuation;
    StudyOptions var_opts = newton_opts;
    var_opts.solver = SolverChoice::Variational;

    const ProblemSpec p = preset("example2");
    const ConvergenceStudy a = expand_until_converged(p, newton_opts);
    const ConvergenceStudy b = expand_until_converged(p, var_opts);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    REQUIRE(!b.energy_reports.empty());
    double gap = 0.0;
    for (std::size_t k = 0; k < a.final_window_solution.values().size(); ++k)
        gap = std::max(gap, std::fabs(a.final_window_solution.values()[k] -
                                      b.final_window_solution.values()[k]));
    CHECK(gap <= 1e-6);
}

TEST_CASE("study configuration validation") {
    StudyOptions opts;
    opts.window = 8.0;
    opts.L0 = 4.0;
    CHECK_THROWS_AS(expand_until_converged(preset("model_constant"), opts), ConfigError);
    opts.window = 2.0;
    opts.L0 = 4.0;
    opts.Lmax = 12.0;  // not L0 * 2^k
    CHECK_THROWS_AS(expand_until_converged(preset("model_constant"), opts), ConfigError);
}

TEST_CASE("an unreachable window tolerance ends at Lmax with partial data") {
    StudyOptions opts;
    opts.window = 1.0;
    opts.tolerance = 1e-30;
    opts.L0 = 2.0;
    opts.Lmax = 8.0;
    opts.spacing = 0.05;
    const ConvergenceStudy study = expand_until_converged(preset("model_constant"), opts);
    CHECK_FALSE(study.converged);
    CHECK(study.Ls.size() == 3);
    CHECK(study.window_diffs.size() == 2);
    CHECK(study.final_window_solution.nodes() > 0);
}

TEST_CASE("studies are bitwise reproducible") {
    StudyOptions opts;
    opts.window = 1.0;
    opts.tolerance = 1e-6;
    opts.L0 = 2.0;
    opts.Lmax = 8.0;
    opts.spacing = 0.05;
    const ConvergenceStudy a = expand_until_converged(preset("model_constant"), opts);
    const ConvergenceStudy b = expand_until_converged(preset("model_constant"), opts);
    REQUIRE(a.final_window_solution.values().size() ==
            b.final_window_solution.values().size());
    for (std::size_t k = 0; k < a.final_window_solution.values().size(); ++k)
        CHECK(a.final_window_solution.values()[k] == b.final_window_solution.values()[k]);
}

TEST_CASE("uniqueness probe") {
    const ProblemSpec s_spec = preset("model_constant");
    const auto& s = std::get<ScalarProblem>(s_spec);
    SUBCASE("four initializations agree") {
        const double diff = uniqueness_probe(s, 2.0, 8.0, 0.02, 4, 0);
        CHECK(diff <= 1e-8);
    }
    SUBCASE("zero forcing: all runs return the zero solution") {
        ScalarProblem z;
        z.a = Expr::parse("1");
        z.f = Expr::parse("0");
        z.a0 = z.a1 = 1.0;
        z.M = 0.0;
        CHECK(uniqueness_probe(z, 1.0, 4.0, 0.05, 4, 0) == 0.0);
    }
    SUBCASE("one seed is trivially zero") {
        CHECK(uniqueness_probe(s, 1.0, 4.0, 0.05, 1, 0) == 0.0);
    }
}

TEST_CASE("exact-solution residual oracle") {
    const ProblemSpec s_spec = preset("counterexample_91");
    const auto& s = std::get<ScalarProblem>(s_spec);
    const Expr u_exact = Expr::parse("t*sin(t)");
    SUBCASE("t = 0 node matches the Taylor value -h^2/3") {
        for (double h : {0.1, 0.01}) {
            const Grid1D g = Grid1D::make(10.0, h);
            const GridFn r = exact_expression_residual(s, u_exact, g);
            double at_zero = 0.0;
            for (int j = 0; j < g.n_interior; ++j)
                if (g.node(j) == 0.0) at_zero = r.at(j, 0);
            CHECK(at_zero == doctest::Approx(-h * h / 3.0).epsilon(0.01));
        }
    }
    SUBCASE("sup residual drops by ~4 when h halves") {
        const double sup_h = sup_norm(exact_expression_residual(s, u_exact, Grid1D::make(10.0, 0.01)));
        const double sup_half =
            sup_norm(exact_expression_residual(s, u_exact, Grid1D::make(10.0, 0.005)));
        CHECK(sup_h / sup_half == doctest::Approx(4.0).epsilon(0.1));
    }
}

TEST_CASE("blow-up demo") {
    const ProblemSpec s_spec = preset("counterexample_91");
    const auto& s = std::get<ScalarProblem>(s_spec);
    const double Ls[] = {4.0, 8.0, 16.0};
    const BlowupReport report = blowup_demo(s, Ls, 0.01, 2.0);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].sup_u < report.rows[1].sup_u);
    CHECK(report.rows[1].sup_u < report.rows[2].sup_u);
    CHECK(report.growth_ok);
    CHECK(report.rows[2].sup_u > report.growth_threshold);
    CHECK(report.rows[2].sup_u > 4.0);
    CHECK(report.residual_ratio > 3.6);
    CHECK(report.residual_ratio < 4.4);
    CHECK(report.residual_at_zero ==
          doctest::Approx(report.residual_at_zero_model).epsilon(0.15));
}
