#include "entsol/entsol.h"

#include <cctype>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "entsol/errors.hpp"
#include "entsol/io.hpp"

using nlohmann::json;

struct entsol_problem {
    entsol::ProblemSpec spec;
    std::string source;  // preset name, file path, or "inline"
};

struct entsol_result {
    std::string report_json;
    std::vector<std::pair<std::string, std::string>> artifacts;  // name -> CSV text
};

namespace {

thread_local std::string g_last_error = "no error";

entsol_status fail(entsol_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

entsol_status classify(const entsol::Error& e) {
    const std::string& code = e.code();
    if (code == "SyntaxError" || code == "UnknownFunction" || code == "ProblemFileError" ||
        code == "UnboundVariable" || code == "DivisionByZero" || code == "UnknownPreset")
        return ENTSOL_ERROR_PARSE;
    if (code == "ConfigError" || code == "NonConformingSpacing" || code == "WindowNotNested" ||
        code == "MarginTooLarge")
        return ENTSOL_ERROR_CONFIG;
    if (code == "ContinuationFailed") return ENTSOL_ERROR_NO_CONVERGENCE;
    if (code == "NewtonStalled" || code == "MaxIterations" || code == "LineSearchStalled" ||
        code == "CGNoConvergence" || code == "SingularSystem")
        return ENTSOL_ERROR_SOLVE;
    return ENTSOL_ERROR_UNKNOWN;
}

// Shared wrapper: translate exceptions to status codes + last_error.
template <typename Fn>
entsol_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const entsol::Error& e) {
        return fail(classify(e), e.what());
    } catch (const std::exception& e) {
        return fail(ENTSOL_ERROR_UNKNOWN, e.what());
    }
}

json options_json(const entsol_options& o, const char* command, const std::string& source) {
    json j{{"command", command},
           {"problem", source},
           {"h", o.h},
           {"tol", o.tol},
           {"solve_tol", o.solve_tol},
           {"seed", o.seed}};
    if (std::isfinite(o.L)) j["L"] = o.L;
    if (std::isfinite(o.L0)) j["L0"] = o.L0;
    if (std::isfinite(o.Lmax)) j["Lmax"] = o.Lmax;
    if (std::isfinite(o.W)) j["W"] = o.W;
    if (std::isfinite(o.box)) j["box"] = o.box;
    if (o.Ls) j["Ls"] = o.Ls;
    if (o.solver) j["solver"] = o.solver;
    if (o.u_star) j["u_star"] = o.u_star;
    if (o.dim) j["dim"] = o.dim;
    if (o.samples) j["samples"] = o.samples;
    if (o.seeds) j["seeds"] = o.seeds;
    return j;
}

std::vector<double> parse_L_list(const char* text, const char* fallback) {
    const char* s = text ? text : fallback;
    std::vector<double> out;
    std::string token;
    for (const char* p = s;; ++p) {
        if (*p == ',' || *p == '\0') {
            if (!token.empty()) {
                try {
                    out.push_back(std::stod(token));
                } catch (const std::exception&) {
                    throw entsol::ConfigError("bad L list entry '" + token + "'");
                }
                token.clear();
            }
            if (*p == '\0') break;
        } else if (!std::isspace(static_cast<unsigned char>(*p))) {
            token += *p;
        }
    }
    if (out.empty()) throw entsol::ConfigError("empty L list");
    return out;
}

entsol_result* make_result(json report, const json& config,
                           std::vector<std::pair<std::string, std::string>> artifacts = {}) {
    report["config"] = config;
    auto* r = new entsol_result;
    r->report_json = report.dump(2);
    r->artifacts = std::move(artifacts);
    return r;
}

bool arg_check(const void* p, const char* what) {
    if (p) return true;
    fail(ENTSOL_ERROR_INVALID_ARGUMENT, std::string(what) + " must not be NULL");
    return false;
}

std::string config_comment(const json& config) { return "config: " + config.dump(); }

}  // namespace

extern "C" {

const char* entsol_last_error(void) { return g_last_error.c_str(); }

const char* entsol_version(void) { return "0.1.0"; }

entsol_status entsol_problem_create_preset(const char* name, entsol_problem** out) {
    if (!arg_check(name, "name") || !arg_check(out, "out")) return ENTSOL_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        auto* p = new entsol_problem{entsol::preset(name), name};
        *out = p;
        return ENTSOL_OK;
    });
}

entsol_status entsol_problem_create_from_text(const char* text, entsol_problem** out) {
    if (!arg_check(text, "text") || !arg_check(out, "out")) return ENTSOL_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        auto* p = new entsol_problem{entsol::parse_problem_text(text), "inline"};
        *out = p;
        return ENTSOL_OK;
    });
}

entsol_status entsol_problem_create_from_file(const char* path, entsol_problem** out) {
    if (!arg_check(path, "path") || !arg_check(out, "out")) return ENTSOL_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        auto* p = new entsol_problem{entsol::load_problem_file(path), path};
        *out = p;
        return ENTSOL_OK;
    });
}

void entsol_problem_destroy(entsol_problem* problem) { delete problem; }

const char* entsol_problem_kind(const entsol_problem* problem) {
    if (!problem) return "invalid";
    return entsol::problem_kind_name(problem->spec);
}

void entsol_options_init(entsol_options* options) {
    if (!options) return;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    options->L = nan;
    options->L0 = nan;
    options->Lmax = nan;
    options->W = nan;
    options->h = 0.01;
    options->tol = 1e-6;
    options->solve_tol = 1e-10;
    options->box = 5.0;
    options->Ls = nullptr;
    options->solver = nullptr;
    options->u_star = nullptr;
    options->dim = 0;
    options->samples = 10000;
    options->seeds = 4;
    options->seed = 0;
}

entsol_status entsol_run_solve(const entsol_problem* problem, const entsol_options* options,
                               entsol_result** out) {
    if (!arg_check(problem, "problem") || !arg_check(options, "options") ||
        !arg_check(out, "out"))
        return ENTSOL_ERROR_INVALID_ARGUMENT;
    return guarded([&]() -> entsol_status {
        const entsol_options& o = *options;
        if (!std::isfinite(o.L)) throw entsol::ConfigError("solve requires L");
        const json config = options_json(o, "solve", problem->source);
        json report;
        std::vector<std::pair<std::string, std::string>> artifacts;
        const std::string solver = o.solver ? o.solver : "";

        if (const auto* q = std::get_if<entsol::PdeProblem>(&problem->spec)) {
            const entsol::Grid2D grid = entsol::Grid2D::make(o.L, o.h);
            entsol::Solve2dOptions sopt;
            sopt.tolerance = o.solve_tol;
            const entsol::Method2d method =
                solver == "minimize" ? entsol::Method2d::Minimize : entsol::Method2d::Newton;
            entsol::SolveReport2d r = entsol::solve2d(*q, grid, method, sopt);
            report = r;
            if (o.L > 2.0)
                report["interior_bounds"] = entsol::interior_bounds(r.solution, o.seed);
            artifacts.emplace_back("solution.csv",
                                   entsol::csv_string(r.solution, config_comment(config)));
        } else if (solver == "variational") {
            const entsol::Grid1D grid = entsol::Grid1D::make(o.L, o.h);
            entsol::MinimizeOptions mopt;
            mopt.tolerance = o.solve_tol * o.h;
            auto [u, energy_report] = entsol::minimize_multilevel(problem->spec, grid, mopt);
            report = energy_report;
            report["kind"] = "energy_report";
            artifacts.emplace_back("solution.csv",
                                   entsol::csv_string(u, config_comment(config)));
        } else {
            const entsol::Grid1D grid = entsol::Grid1D::make(o.L, o.h);
            entsol::ContinuationOptions copt;
            copt.tolerance = o.solve_tol;
            entsol::SolveReport r = entsol::continuation_solve(problem->spec, grid, copt);
            report = r;
            artifacts.emplace_back("solution.csv",
                                   entsol::csv_string(r.solution, config_comment(config)));
        }
        *out = make_result(std::move(report), config, std::move(artifacts));
        return ENTSOL_OK;
    });
}

entsol_status entsol_run_study(const entsol_problem* problem, const entsol_options* options,
                               entsol_result** out) {
    if (!arg_check(problem, "problem") || !arg_check(options, "options") ||
        !arg_check(out, "out"))
        return ENTSOL_ERROR_INVALID_ARGUMENT;
    return guarded([&]() -> entsol_status {
        const entsol_options& o = *options;
        if (!std::isfinite(o.L0) || !std::isfinite(o.W))
            throw entsol::ConfigError("study requires L0 and W");
        const double Lmax = std::isfinite(o.Lmax) ? o.Lmax : o.L0 * 8.0;
        if (o.W > o.L0) throw entsol::ConfigError("window W must not exceed L0");
        const json config = options_json(o, "study", problem->source);
        const std::string solver = o.solver ? o.solver : "";

        bool converged = false;
        json report;
        std::vector<std::pair<std::string, std::string>> artifacts;
        if (const auto* q = std::get_if<entsol::PdeProblem>(&problem->spec)) {
            entsol::Study2dOptions sopt;
            sopt.window = o.W;
            sopt.tolerance = o.tol;
            sopt.L0 = o.L0;
            sopt.Lmax = Lmax;
            sopt.spacing = o.h;
            sopt.method =
                solver == "minimize" ? entsol::Method2d::Minimize : entsol::Method2d::Newton;
            sopt.solve.tolerance = o.solve_tol;
            entsol::ConvergenceStudy2d study = entsol::expand2d(*q, sopt);
            converged = study.converged;
            report = study;
            artifacts.emplace_back(
                "window.csv",
                entsol::csv_string(study.final_window_solution, config_comment(config)));
        } else {
            entsol::StudyOptions sopt;
            sopt.window = o.W;
            sopt.tolerance = o.tol;
            sopt.L0 = o.L0;
            sopt.Lmax = Lmax;
            sopt.spacing = o.h;
            sopt.solver = solver == "variational" ? entsol::SolverChoice::Variational
                                                  : entsol::SolverChoice::Continuation;
            sopt.solve_tolerance = o.solve_tol;
            entsol::ConvergenceStudy study = entsol::expand_until_converged(problem->spec, sopt);
            converged = study.converged;
            report = study;
            artifacts.emplace_back(
                "window.csv",
                entsol::csv_string(study.final_window_solution, config_comment(config)));
        }
        *out = make_result(std::move(report), config, std::move(artifacts));
        if (!converged)
            return fail(ENTSOL_ERROR_NO_CONVERGENCE,
                        "domain expansion reached Lmax without window convergence");
        return ENTSOL_OK;
    });
}

entsol_status entsol_run_validate(const entsol_problem* problem, const entsol_options* options,
                                  entsol_result** out) {
    if (!arg_check(problem, "problem") || !arg_check(options, "options") ||
        !arg_check(out, "out"))
        return ENTSOL_ERROR_INVALID_ARGUMENT;
    return guarded([&]() -> entsol_status {
        const entsol_options& o = *options;
        const double domain = std::isfinite(o.L) ? o.L : 8.0;
        const json config = options_json(o, "validate", problem->source);
        entsol::HypothesisReport r =
            entsol::validate_hypotheses(problem->spec, domain, o.samples, o.seed);
        json report = r;
        *out = make_result(std::move(report), config);
        return ENTSOL_OK;
    });
}

entsol_status entsol_run_uniqueness(const entsol_problem* problem, const entsol_options* options,
                                    entsol_result** out) {
    if (!arg_check(problem, "problem") || !arg_check(options, "options") ||
        !arg_check(out, "out"))
        return ENTSOL_ERROR_INVALID_ARGUMENT;
    return guarded([&]() -> entsol_status {
        const entsol_options& o = *options;
        const auto* s = std::get_if<entsol::ScalarProblem>(&problem->spec);
        if (!s) throw entsol::ConfigError("the uniqueness probe is defined for scalar problems");
        if (!std::isfinite(o.L) || !std::isfinite(o.W))
            throw entsol::ConfigError("uniqueness requires L and W");
        const json config = options_json(o, "uniqueness", problem->source);
        const double diff =
            entsol::uniqueness_probe(*s, o.W, o.L, o.h, o.seeds, o.seed, o.solve_tol);
        json report{{"kind", "uniqueness_probe"},
                    {"seeds", o.seeds},
                    {"max_pairwise_window_diff", diff}};
        *out = make_result(std::move(report), config);
        return ENTSOL_OK;
    });
}

entsol_status entsol_run_blowup_demo(const entsol_problem* problem,
                                     const entsol_options* options, entsol_result** out) {
    if (!arg_check(problem, "problem") || !arg_check(options, "options") ||
        !arg_check(out, "out"))
        return ENTSOL_ERROR_INVALID_ARGUMENT;
    return guarded([&]() -> entsol_status {
        const entsol_options& o = *options;
        const auto* s = std::get_if<entsol::ScalarProblem>(&problem->spec);
        if (!s) throw entsol::ConfigError("the blow-up demo is defined for scalar problems");
        const std::vector<double> Ls = parse_L_list(o.Ls, "4,8,16");
        const double W = std::isfinite(o.W) ? o.W : 2.0;
        const json config = options_json(o, "demo-blowup", problem->source);
        entsol::BlowupReport r =
            entsol::blowup_demo(*s, Ls, o.h, W, std::max(o.solve_tol, 1e-8));
        json report = r;
        std::vector<std::pair<std::string, std::string>> artifacts;
        artifacts.emplace_back("growth.csv", entsol::blowup_csv(r, config_comment(config)));
        *out = make_result(std::move(report), config, std::move(artifacts));
        if (!r.growth_ok)
            return fail(ENTSOL_ERROR_NO_CONVERGENCE,
                        "growth table did not exceed the bounded-forcing level");
        return ENTSOL_OK;
    });
}

entsol_status entsol_run_psd_check(const entsol_problem* problem, const entsol_options* options,
                                   entsol_result** out) {
    if (!arg_check(problem, "problem") || !arg_check(options, "options") ||
        !arg_check(out, "out"))
        return ENTSOL_ERROR_INVALID_ARGUMENT;
    return guarded([&]() -> entsol_status {
        const entsol_options& o = *options;
        const auto* c = std::get_if<entsol::CoupledSystemProblem>(&problem->spec);
        if (!c) throw entsol::ConfigError("psd-check is defined for coupled systems");
        const json config = options_json(o, "psd-check", problem->source);
        entsol::PsdReport r = entsol::psd_check(*c, o.box, o.samples, o.seed);
        json report = r;
        *out = make_result(std::move(report), config);
        return ENTSOL_OK;
    });
}

entsol_status entsol_run_energy_monotone(const entsol_problem* problem,
                                         const entsol_options* options, entsol_result** out) {
    if (!arg_check(problem, "problem") || !arg_check(options, "options") ||
        !arg_check(out, "out"))
        return ENTSOL_ERROR_INVALID_ARGUMENT;
    return guarded([&]() -> entsol_status {
        const entsol_options& o = *options;
        if (!std::holds_alternative<entsol::HamiltonianProblem>(problem->spec) &&
            !std::holds_alternative<entsol::ScalarProblem>(problem->spec))
            throw entsol::ConfigError(
                "energy-monotone is defined for scalar and Hamiltonian problems");
        const std::vector<double> Ls = parse_L_list(o.Ls, "2,4,8");
        const json config = options_json(o, "energy-monotone", problem->source);
        entsol::MinimizeOptions mopt;
        mopt.tolerance = o.solve_tol * o.h;
        const std::vector<entsol::EnergyLevel> levels =
            entsol::min_energy_sequence(problem->spec, Ls, o.h, mopt);
        bool monotone = true;
        for (std::size_t i = 1; i < levels.size(); ++i)
            if (levels[i].M_L > levels[i - 1].M_L + 1e-8) monotone = false;
        json report{{"kind", "energy_monotone"}, {"levels", levels}, {"monotone", monotone}};
        std::vector<std::pair<std::string, std::string>> artifacts;
        artifacts.emplace_back("levels.csv",
                               entsol::energy_levels_csv(levels, config_comment(config)));
        *out = make_result(std::move(report), config, std::move(artifacts));
        if (!monotone)
            return fail(ENTSOL_ERROR_NO_CONVERGENCE,
                        "minimum energy values were not non-increasing");
        return ENTSOL_OK;
    });
}

entsol_status entsol_run_mms(const entsol_options* options, entsol_result** out) {
    if (!arg_check(options, "options") || !arg_check(out, "out"))
        return ENTSOL_ERROR_INVALID_ARGUMENT;
    return guarded([&]() -> entsol_status {
        const entsol_options& o = *options;
        const int dim = o.dim == 0 ? 1 : o.dim;
        const json config = options_json(o, "mms", dim == 1 ? "mms-1d" : "mms-2d");
        json report{{"kind", "mms"}, {"dim", dim}};
        std::vector<std::pair<std::string, std::string>> artifacts;

        if (dim == 1) {
            const double W = std::isfinite(o.W) ? o.W : 2.0;
            const double L0 = std::isfinite(o.L0) ? o.L0 : 4.0;
            const double Lmax = std::isfinite(o.Lmax) ? o.Lmax : 4.0 * L0;
            entsol::ScalarProblem base;
            base.a = entsol::Expr::parse("1");
            base.f = entsol::Expr::parse("0");
            base.a0 = base.a1 = 1.0;
            entsol::ProblemSpec mms = entsol::manufacture(
                base, {entsol::Expr::parse(o.u_star ? o.u_star : "exp(-t^2)")});
            const auto& exact = std::get<entsol::ScalarProblem>(mms).exact[0];

            entsol::ConvergenceStudy last_study;
            auto window_error = [&](double h) {
                entsol::StudyOptions sopt;
                sopt.window = W;
                sopt.tolerance = o.tol;
                sopt.L0 = L0;
                sopt.Lmax = Lmax;
                sopt.spacing = h;
                sopt.solve_tolerance = o.solve_tol;
                entsol::ConvergenceStudy study = entsol::expand_until_converged(mms, sopt);
                entsol::Env env;
                double err = 0.0;
                const entsol::GridFn& w = study.final_window_solution;
                for (int j = 0; j < w.nodes(); ++j) {
                    env.set("t", w.grid().node(j));
                    err = std::max(err, std::fabs(w.at(j, 0) - exact.eval(env)));
                }
                last_study = std::move(study);
                return err;
            };
            const double err_h = window_error(o.h);
            entsol::ConvergenceStudy study_h = std::move(last_study);
            const double err_half = window_error(o.h / 2.0);
            report["window_error_at_h"] = err_h;
            report["window_error_at_half_h"] = err_half;
            report["error_ratio"] = err_h / err_half;
            report["study"] = study_h;
            artifacts.emplace_back(
                "window.csv",
                entsol::csv_string(study_h.final_window_solution, config_comment(config)));
        } else if (dim == 2) {
            const double W = std::isfinite(o.W) ? o.W : 1.5;
            const double L = std::isfinite(o.L) ? o.L : 4.0;
            entsol::PdeProblem base;
            base.m = 1;
            base.V = entsol::Expr::parse("z1^2");
            base.a = entsol::Expr::parse("1");
            base.f = {entsol::Expr::parse("0")};
            entsol::ProblemSpec base_spec = base;
            entsol::finalize_problem(base_spec);
            entsol::ProblemSpec mms = entsol::manufacture(
                base_spec, {entsol::Expr::parse(o.u_star ? o.u_star : "exp(-x1^2 - x2^2)")});
            const auto& pde = std::get<entsol::PdeProblem>(mms);
            const auto& exact = pde.exact[0];

            entsol::SolveReport2d last_solve;
            auto window_error = [&](double h) {
                entsol::Solve2dOptions sopt;
                sopt.tolerance = o.solve_tol;
                entsol::SolveReport2d r =
                    entsol::solve2d(pde, entsol::Grid2D::make(L, h), entsol::Method2d::Newton,
                                    sopt);
                entsol::GridFn2D w = entsol::restrict_to_window(r.solution, W);
                entsol::Env env;
                double err = 0.0;
                for (int row = 0; row < w.side(); ++row) {
                    env.set("x2", w.grid().node(row));
                    for (int col = 0; col < w.side(); ++col) {
                        env.set("x1", w.grid().node(col));
                        err = std::max(err, std::fabs(w.at(col, row, 0) - exact.eval(env)));
                    }
                }
                last_solve = std::move(r);
                return err;
            };
            const double err_h = window_error(o.h);
            entsol::GridFn2D window_at_h =
                entsol::restrict_to_window(last_solve.solution, W);
            const double err_half = window_error(o.h / 2.0);
            report["window_error_at_h"] = err_h;
            report["window_error_at_half_h"] = err_half;
            report["error_ratio"] = err_h / err_half;
            artifacts.emplace_back("window.csv",
                                   entsol::csv_string(window_at_h, config_comment(config)));
        } else {
            throw entsol::ConfigError("dim must be 1 or 2");
        }
        *out = make_result(std::move(report), config, std::move(artifacts));
        return ENTSOL_OK;
    });
}

const char* entsol_result_report_json(const entsol_result* result) {
    if (!result) return "";
    return result->report_json.c_str();
}

int entsol_result_artifact_count(const entsol_result* result) {
    if (!result) return 0;
    return static_cast<int>(result->artifacts.size());
}

const char* entsol_result_artifact_name(const entsol_result* result, int index) {
    if (!result || index < 0 || index >= static_cast<int>(result->artifacts.size())) return "";
    return result->artifacts[index].first.c_str();
}

const char* entsol_result_artifact_data(const entsol_result* result, int index) {
    if (!result || index < 0 || index >= static_cast<int>(result->artifacts.size())) return "";
    return result->artifacts[index].second.c_str();
}

void entsol_result_destroy(entsol_result* result) { delete result; }

}  // extern "C"
