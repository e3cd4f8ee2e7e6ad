#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "entsol/expr.hpp"

namespace entsol {

/// u'' - a(t) u^3 = f(t). The bounds a0 <= a <= a1 and |f| <= M are declared
/// by the problem author and checked by sampling, never proven.
struct ScalarProblem {
    Expr a;
    Expr f;
    double a0 = 1.0;
    double a1 = 1.0;
    double M = 0.0;
    std::vector<Expr> exact;  // manufactured solution when known (size 1)
};

/// u'' - a1(t) f(u,v) = h1(t),  v'' - a2(t) g(u,v) = h2(t).
struct CoupledSystemProblem {
    Expr a1_t, a2_t;          // coefficient expressions in t
    Expr f, g;                // nonlinearities in (x, y)
    Expr fx, fy, gx, gy;      // symbolic partials, built on construction
    Expr h1, h2;              // forcing in t
    double a0 = 1.0;
    double a1 = 1.0;
    double M = 0.0;
    double alpha = 0.0;       // declared lower bound for x f and y g
};

/// u_i'' - a(t) V_{z_i}(u) = f_i(t), i = 1..m.
struct HamiltonianProblem {
    int m = 1;
    Expr V;                    // potential in z1..zm
    std::vector<Expr> Vz;      // gradient, built on construction
    std::vector<Expr> Vzz;     // Hessian, row-major m*m, built on construction
    Expr a;
    std::vector<Expr> f;       // size m
    std::optional<Expr> f0;    // integrable minorant for the energy bound
    std::vector<Expr> exact;   // manufactured solution when known (size m)
};

/// Laplacian(u_i) - a(x1,x2) V_{z_i}(u) = f_i(x1,x2) on squares [-L,L]^2.
struct PdeProblem {
    int m = 1;
    Expr V;
    std::vector<Expr> Vz;
    std::vector<Expr> Vzz;
    Expr a;                    // in x1, x2
    std::vector<Expr> f;       // size m, in x1, x2
    std::vector<Expr> exact;
};

using ProblemSpec = std::variant<ScalarProblem, CoupledSystemProblem, HamiltonianProblem, PdeProblem>;

/// Rebuilds the derived expressions (partials, gradients, Hessians) from the
/// primary fields. Called by every constructor path; call it manually after
/// assembling a problem struct by hand.
void finalize_problem(ProblemSpec& p);

const char* problem_kind_name(const ProblemSpec& p);
int problem_components(const ProblemSpec& p);

/// Named problems: model_constant, counterexample_91, example1, example2,
/// pde_quartic. Throws UnknownPreset.
ProblemSpec preset(std::string_view name);

/// Positive semi-definiteness of the symmetric quadratic form
///   [[a1 f_x, (a1 f_y + a2 g_x)/2], [(a1 f_y + a2 g_x)/2, a2 g_y]]
/// sampled at `count` random points (t, x, y) with |.| <= box.
struct PsdReport {
    double min_eigenvalue = 0.0;
    double at_t = 0.0, at_x = 0.0, at_y = 0.0;
    int samples = 0;
    bool pass = false;
};
PsdReport psd_check(const CoupledSystemProblem& p, double box, int count, std::uint64_t seed);

/// Method of manufactured solutions: replaces the forcing of `templ` by the
/// expression that makes u_star an exact solution, and stores u_star. For
/// 1-D problems u_star is in t; for PDE problems in x1, x2.
ProblemSpec manufacture(const ProblemSpec& templ, const std::vector<Expr>& u_star);

/// Key = value problem description. Schema (see README): kind, expressions
/// as strings, bound_* declarations; `preset = name` overrides everything.
/// Throws ProblemFileError with a line number.
ProblemSpec parse_problem_text(std::string_view text);
ProblemSpec load_problem_file(const std::string& path);

/// Sampling validation of the declared hypotheses over the working domain
/// (plus a fixed margin). A failed check is reported, not thrown: bounds
/// declared "for all t" can only ever be spot-checked numerically.
struct HypothesisReport {
    std::string kind;
    double a_min = 0.0, a_max = 0.0;     // sampled range of the coefficient(s)
    double f_sup = 0.0;                  // sampled sup of the forcing magnitude
    bool bounds_ok = false;              // declared a0/a1/M hold on the samples
    bool structure_ok = true;            // kind-specific hypotheses (PSD, alpha,
                                         // f0 minorant) hold on the samples
    std::vector<std::string> notes;
};
HypothesisReport validate_hypotheses(const ProblemSpec& p, double domain_half_length,
                                     int samples, std::uint64_t seed);

}  // namespace entsol
