// Command-line front end. Talks to the solver library exclusively through
// the C API in entsol/entsol.h; its own work is flag parsing, artifact
// placement and exit-code mapping.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 numerical
// non-convergence (domain expansion, homotopy or growth/monotonicity demos
// that did not reach their target).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "entsol/entsol.h"

namespace {

struct CommonFlags {
    std::string preset;
    std::string problem_file;
    std::string out_dir;
    unsigned long long seed = 0;
};

int status_to_exit(entsol_status status) {
    switch (status) {
        case ENTSOL_OK: return 0;
        case ENTSOL_ERROR_NO_CONVERGENCE: return 2;
        case ENTSOL_ERROR_SOLVE: return 2;
        default: return 1;
    }
}

std::filesystem::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("ENTSOL_OUT")) return env;
    return ".";
}

entsol_problem* open_problem(const CommonFlags& flags) {
    entsol_problem* problem = nullptr;
    entsol_status status;
    if (!flags.preset.empty() && !flags.problem_file.empty()) {
        std::cerr << "error: pass either --preset or --problem, not both\n";
        return nullptr;
    }
    if (!flags.preset.empty())
        status = entsol_problem_create_preset(flags.preset.c_str(), &problem);
    else if (!flags.problem_file.empty())
        status = entsol_problem_create_from_file(flags.problem_file.c_str(), &problem);
    else {
        std::cerr << "error: a problem is required (--preset NAME or --problem FILE)\n";
        return nullptr;
    }
    if (status != ENTSOL_OK) {
        std::cerr << "error: " << entsol_last_error() << "\n";
        return nullptr;
    }
    return problem;
}

int write_artifacts(const entsol_result* result, const std::filesystem::path& dir,
                    const std::string& stem) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << dir << "\n";
        return 1;
    }
    const std::filesystem::path report_path = dir / (stem + ".json");
    {
        std::ofstream out(report_path);
        if (!out) {
            std::cerr << "error: cannot write " << report_path << "\n";
            return 1;
        }
        out << entsol_result_report_json(result) << "\n";
    }
    std::cout << "wrote " << report_path.string() << "\n";
    for (int i = 0; i < entsol_result_artifact_count(result); ++i) {
        const std::filesystem::path path =
            dir / (stem + "_" + entsol_result_artifact_name(result, i));
        std::ofstream out(path);
        if (!out) {
            std::cerr << "error: cannot write " << path << "\n";
            return 1;
        }
        out << entsol_result_artifact_data(result, i);
        std::cout << "wrote " << path.string() << "\n";
    }
    return 0;
}

// Runs one command against the C API and handles artifacts + exit mapping.
template <typename RunFn>
int run_command(const CommonFlags& flags, const std::string& stem, RunFn&& run) {
    entsol_result* result = nullptr;
    const entsol_status status = run(&result);
    int exit_code = status_to_exit(status);
    if (status != ENTSOL_OK) std::cerr << "error: " << entsol_last_error() << "\n";
    if (result) {
        const int write_failure =
            write_artifacts(result, resolve_out_dir(flags.out_dir), stem);
        if (exit_code == 0) exit_code = write_failure;
        entsol_result_destroy(result);
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounded entire solutions of nonlinear ODE/PDE systems by domain truncation"};
    app.require_subcommand(1);
    // --h is the grid-spacing flag everywhere, so help loses its short form
    app.set_help_flag("--help", "print help");

    CommonFlags flags;
    entsol_options options;
    entsol_options_init(&options);
    std::string solver, Ls, u_star;
    int exit_code = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_problem) {
        cmd->set_help_flag("--help", "print help");
        if (needs_problem) {
            cmd->add_option("--preset", flags.preset, "preset problem name");
            cmd->add_option("--problem", flags.problem_file, "problem file path");
        }
        cmd->add_option("--out", flags.out_dir,
                        "output directory (default: $ENTSOL_OUT or .)");
        cmd->add_option("--seed", options.seed, "seed for randomized checks");
        cmd->add_option("--h", options.h, "grid spacing (2L/h must be integral)");
        cmd->add_option("--solve-tol", options.solve_tol, "inner solver sup-residual tolerance");
    };

    auto* solve = app.add_subcommand("solve", "single Dirichlet solve on [-L, L]");
    add_common(solve, true);
    solve->add_option("--L", options.L, "domain half-length")->required();
    solve->add_option("--solver", solver, "continuation | variational | newton | minimize");
    solve->callback([&] {
        entsol_problem* problem = open_problem(flags);
        if (!problem) return;
        if (!solver.empty()) options.solver = solver.c_str();
        exit_code = run_command(flags, "solve", [&](entsol_result** out) {
            return entsol_run_solve(problem, &options, out);
        });
        entsol_problem_destroy(problem);
    });

    auto* study = app.add_subcommand(
        "study", "expand the domain L0, 2 L0, ... and test window convergence");
    add_common(study, true);
    study->add_option("--W", options.W, "comparison window half-length")->required();
    study->add_option("--L0", options.L0, "first half-length")->required();
    study->add_option("--Lmax", options.Lmax, "last half-length (L0 * 2^k)");
    study->add_option("--tol", options.tol, "window convergence tolerance");
    study->add_option("--solver", solver, "continuation | variational | newton | minimize");
    study->callback([&] {
        entsol_problem* problem = open_problem(flags);
        if (!problem) return;
        if (!solver.empty()) options.solver = solver.c_str();
        exit_code = run_command(flags, "study", [&](entsol_result** out) {
            return entsol_run_study(problem, &options, out);
        });
        entsol_problem_destroy(problem);
    });

    auto* validate = app.add_subcommand(
        "validate", "sample the declared coefficient bounds and structure hypotheses");
    add_common(validate, true);
    validate->add_option("--L", options.L, "domain half-length to sample over");
    validate->add_option("--samples", options.samples, "sample count");
    validate->callback([&] {
        entsol_problem* problem = open_problem(flags);
        if (!problem) return;
        exit_code = run_command(flags, "validate", [&](entsol_result** out) {
            return entsol_run_validate(problem, &options, out);
        });
        entsol_problem_destroy(problem);
    });

    auto* uniq = app.add_subcommand(
        "uniqueness", "solve from several initializations and compare on the window");
    add_common(uniq, true);
    uniq->add_option("--W", options.W, "window half-length")->required();
    uniq->add_option("--L", options.L, "domain half-length")->required();
    uniq->add_option("--seeds", options.seeds, "number of initializations");
    uniq->callback([&] {
        entsol_problem* problem = open_problem(flags);
        if (!problem) return;
        exit_code = run_command(flags, "uniqueness", [&](entsol_result** out) {
            return entsol_run_uniqueness(problem, &options, out);
        });
        entsol_problem_destroy(problem);
    });

    auto* blowup = app.add_subcommand(
        "demo-blowup", "growth table of Dirichlet solves under unbounded forcing");
    add_common(blowup, true);
    blowup->add_option("--Ls", Ls, "comma list of half-lengths (default 4,8,16)");
    blowup->add_option("--W", options.W, "window for the bounded-forcing comparison level");
    blowup->callback([&] {
        if (flags.preset.empty() && flags.problem_file.empty())
            flags.preset = "counterexample_91";
        entsol_problem* problem = open_problem(flags);
        if (!problem) return;
        if (!Ls.empty()) options.Ls = Ls.c_str();
        exit_code = run_command(flags, "demo_blowup", [&](entsol_result** out) {
            return entsol_run_blowup_demo(problem, &options, out);
        });
        entsol_problem_destroy(problem);
    });

    auto* mms = app.add_subcommand(
        "mms", "manufactured-solution verification: window error at h and h/2");
    add_common(mms, false);
    mms->add_option("--dim", options.dim, "1 or 2")->required();
    mms->add_option("--W", options.W, "comparison window half-length");
    mms->add_option("--L", options.L, "2-D domain half-length");
    mms->add_option("--L0", options.L0, "1-D first half-length");
    mms->add_option("--Lmax", options.Lmax, "1-D last half-length");
    mms->add_option("--tol", options.tol, "1-D window convergence tolerance");
    mms->add_option("--u-star", u_star, "manufactured solution expression");
    mms->callback([&] {
        if (!u_star.empty()) options.u_star = u_star.c_str();
        exit_code = run_command(flags, "mms", [&](entsol_result** out) {
            return entsol_run_mms(&options, out);
        });
    });

    auto* psd = app.add_subcommand(
        "psd-check", "sampled positive semi-definiteness of the coupling quadratic form");
    add_common(psd, true);
    psd->add_option("--box", options.box, "sampling box half-width");
    psd->add_option("--count", options.samples, "sample count");
    psd->callback([&] {
        entsol_problem* problem = open_problem(flags);
        if (!problem) return;
        exit_code = run_command(flags, "psd_check", [&](entsol_result** out) {
            return entsol_run_psd_check(problem, &options, out);
        });
        entsol_problem_destroy(problem);
    });

    auto* mono = app.add_subcommand(
        "energy-monotone", "minimum energy values over nested growing intervals");
    add_common(mono, true);
    mono->add_option("--Ls", Ls, "comma list of half-lengths (default 2,4,8)");
    mono->callback([&] {
        entsol_problem* problem = open_problem(flags);
        if (!problem) return;
        if (!Ls.empty()) options.Ls = Ls.c_str();
        exit_code = run_command(flags, "energy_monotone", [&](entsol_result** out) {
            return entsol_run_energy_monotone(problem, &options, out);
        });
        entsol_problem_destroy(problem);
    });

    CLI11_PARSE(app, argc, argv);
    return exit_code;
}
