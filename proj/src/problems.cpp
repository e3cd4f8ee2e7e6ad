#include "entsol/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "entsol/errors.hpp"
#include "entsol/rng.hpp"

namespace entsol {

namespace {

std::string z_name(int i) { return "z" + std::to_string(i + 1); }

void build_potential_derivatives(int m, const Expr& V, std::vector<Expr>& Vz,
                                 std::vector<Expr>& Vzz) {
    Vz.clear();
    Vzz.clear();
    for (int i = 0; i < m; ++i) Vz.push_back(V.diff(z_name(i)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) Vzz.push_back(Vz[i].diff(z_name(j)));
    // Mixed partials are symmetric; use one representative per pair so the
    // assembled Jacobians are exactly symmetric.
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j) Vzz[i * m + j] = Vzz[j * m + i];
}

Expr constant(double v) { return Expr::constant(v); }

}  // namespace

void finalize_problem(ProblemSpec& p) {
    if (auto* c = std::get_if<CoupledSystemProblem>(&p)) {
        c->fx = c->f.diff("x");
        c->fy = c->f.diff("y");
        c->gx = c->g.diff("x");
        c->gy = c->g.diff("y");
    } else if (auto* hp = std::get_if<HamiltonianProblem>(&p)) {
        build_potential_derivatives(hp->m, hp->V, hp->Vz, hp->Vzz);
    } else if (auto* pp = std::get_if<PdeProblem>(&p)) {
        build_potential_derivatives(pp->m, pp->V, pp->Vz, pp->Vzz);
    }
}

const char* problem_kind_name(const ProblemSpec& p) {
    switch (p.index()) {
        case 0: return "scalar";
        case 1: return "coupled";
        case 2: return "hamiltonian";
        default: return "pde";
    }
}

int problem_components(const ProblemSpec& p) {
    if (std::holds_alternative<ScalarProblem>(p)) return 1;
    if (std::holds_alternative<CoupledSystemProblem>(p)) return 2;
    if (const auto* hp = std::get_if<HamiltonianProblem>(&p)) return hp->m;
    return std::get<PdeProblem>(p).m;
}

ProblemSpec preset(std::string_view name) {
    ProblemSpec p;
    if (name == "model_constant") {
        ScalarProblem s;
        s.a = Expr::parse("1");
        s.f = Expr::parse("1");
        s.a0 = s.a1 = s.M = 1.0;
        p = std::move(s);
    } else if (name == "counterexample_91") {
        // u'' - u^3 = 2 cos t - t sin t - t^3 sin(t)^3, solved exactly by
        // t sin t. The forcing is unbounded, so the declared M only covers
        // |t| <= 1 and hypothesis validation over a real domain reports the
        // violation; that failure is the point of the demo.
        ScalarProblem s;
        s.a = Expr::parse("1");
        s.f = Expr::parse("2*cos(t) - t*sin(t) - t^3*sin(t)^3");
        s.a0 = s.a1 = 1.0;
        s.M = 2.0;
        p = std::move(s);
    } else if (name == "example1") {
        CoupledSystemProblem c;
        c.a1_t = Expr::parse("1");
        c.a2_t = Expr::parse("1");
        c.f = Expr::parse("x + x^3 + 0.05*tanh(y)");
        c.g = Expr::parse("y + y^3 + 0.05*tanh(x)");
        c.h1 = Expr::parse("0.5");
        c.h2 = Expr::parse("0.5");
        c.a0 = c.a1 = 1.0;
        c.M = 0.5;
        // x f(x,y) >= x^2 + x^4 - 0.05 |x| >= -0.05^2 / 4
        c.alpha = -0.000625;
        p = std::move(c);
    } else if (name == "example2") {
        HamiltonianProblem hm;
        hm.m = 2;
        hm.V = Expr::parse("z1^4 + z2^2 + exp(-z1^2 - z2^2)");
        hm.a = Expr::parse("1");
        hm.f = {Expr::parse("exp(-t^2)"), Expr::parse("exp(-t^2)")};
        // Young's inequality with eps = a0/2 absorbs the linear forcing terms
        // into the quartic/quadratic parts of V, leaving the integrable
        // minorant f0 = c3 (f1^{4/3} + f2^2).
        const double eps = 0.5;
        const double c3 = std::max(3.0 / (4.0 * std::cbrt(4.0 * eps)), 1.0 / (4.0 * eps));
        hm.f0 = constant(c3) *
                (exp(constant(-4.0 / 3.0) * Expr::variable("t").pow(2)) +
                 exp(constant(-2.0) * Expr::variable("t").pow(2)));
        p = std::move(hm);
    } else if (name == "pde_quartic") {
        PdeProblem q;
        q.m = 1;
        q.V = Expr::parse("z1^4");
        q.a = Expr::parse("1");
        q.f = {Expr::parse("4")};
        p = std::move(q);
    } else {
        throw UnknownPresetError(std::string(name));
    }
    finalize_problem(p);
    return p;
}

PsdReport psd_check(const CoupledSystemProblem& p, double box, int count, std::uint64_t seed) {
    Rng rng(seed);
    Env env;
    PsdReport report;
    report.samples = count;
    report.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (int k = 0; k < count; ++k) {
        const double t = rng.uniform(-box, box);
        const double x = rng.uniform(-box, box);
        const double y = rng.uniform(-box, box);
        env.set("t", t);
        env.set("x", x);
        env.set("y", y);
        const double a1 = p.a1_t.eval(env);
        const double a2 = p.a2_t.eval(env);
        const double A = a1 * p.fx.eval(env);
        const double C = a2 * p.gy.eval(env);
        const double B = 0.5 * (a1 * p.fy.eval(env) + a2 * p.gx.eval(env));
        const double mid = 0.5 * (A + C);
        const double rad = std::sqrt(0.25 * (A - C) * (A - C) + B * B);
        const double eig_min = mid - rad;
        if (eig_min < report.min_eigenvalue) {
            report.min_eigenvalue = eig_min;
            report.at_t = t;
            report.at_x = x;
            report.at_y = y;
        }
    }
    report.pass = report.min_eigenvalue >= -1e-12;
    return report;
}

namespace {

Expr second_derivative(const Expr& e, const char* var) { return e.diff(var).diff(var); }

// sup |e(t)| over a dense sample of [-domain, domain]
double sampled_sup(const Expr& e, const char* var, double domain, int samples) {
    Env env;
    double sup = 0.0;
    for (int i = 0; i <= samples; ++i) {
        env.set(var, -domain + 2.0 * domain * i / samples);
        sup = std::max(sup, std::fabs(e.eval(env)));
    }
    return sup;
}

}  // namespace

ProblemSpec manufacture(const ProblemSpec& templ, const std::vector<Expr>& u_star) {
    ProblemSpec out = templ;
    if (auto* s = std::get_if<ScalarProblem>(&out)) {
        if (u_star.size() != 1)
            throw ConfigError("scalar problems take exactly one manufactured component");
        const Expr& u = u_star[0];
        s->f = second_derivative(u, "t") - s->a * u.pow(3);
        s->exact = u_star;
        s->M = sampled_sup(s->f, "t", 16.0, 20000);
    } else if (auto* hp = std::get_if<HamiltonianProblem>(&out)) {
        if (static_cast<int>(u_star.size()) != hp->m)
            throw ConfigError("manufactured solution must have m components");
        for (int i = 0; i < hp->m; ++i) {
            Expr Vz_at_u = hp->Vz[i];
            for (int j = 0; j < hp->m; ++j) Vz_at_u = Vz_at_u.substitute(z_name(j), u_star[j]);
            hp->f[i] = second_derivative(u_star[i], "t") - hp->a * Vz_at_u;
        }
        hp->exact = u_star;
    } else if (auto* pp = std::get_if<PdeProblem>(&out)) {
        if (static_cast<int>(u_star.size()) != pp->m)
            throw ConfigError("manufactured solution must have m components");
        for (int i = 0; i < pp->m; ++i) {
            Expr Vz_at_u = pp->Vz[i];
            for (int j = 0; j < pp->m; ++j) Vz_at_u = Vz_at_u.substitute(z_name(j), u_star[j]);
            pp->f[i] = second_derivative(u_star[i], "x1") + second_derivative(u_star[i], "x2") -
                       pp->a * Vz_at_u;
        }
        pp->exact = u_star;
    } else {
        throw ConfigError("manufactured solutions are not defined for coupled systems");
    }
    return out;
}

// --- problem files --------------------------------------------------------

namespace {

struct KeyValueFile {
    std::map<std::string, std::pair<std::string, int>> entries;  // key -> (value, line)

    bool has(const std::string& key) const { return entries.count(key) != 0; }

    const std::string& require(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end()) throw ProblemFileError("missing required key '" + key + "'", 0);
        return it->second.first;
    }

    Expr expr(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end()) throw ProblemFileError("missing required key '" + key + "'", 0);
        try {
            return Expr::parse(it->second.first);
        } catch (const SyntaxError& e) {
            throw ProblemFileError("bad expression for '" + key + "': " + e.what(),
                                   it->second.second);
        }
    }

    double number(const std::string& key, std::optional<double> fallback = {}) const {
        auto it = entries.find(key);
        if (it == entries.end()) {
            if (fallback) return *fallback;
            throw ProblemFileError("missing required key '" + key + "'", 0);
        }
        try {
            std::size_t used = 0;
            double v = std::stod(it->second.first, &used);
            if (used != it->second.first.size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            throw ProblemFileError("bad numeric value for '" + key + "'", it->second.second);
        }
    }
};

KeyValueFile scan_key_values(std::string_view text) {
    KeyValueFile kv;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ProblemFileError("expected 'key = value'", line_no);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ProblemFileError("empty key", line_no);
        if (value.empty()) throw ProblemFileError("empty value for '" + key + "'", line_no);
        if (kv.entries.count(key)) throw ProblemFileError("duplicate key '" + key + "'", line_no);
        kv.entries[key] = {value, line_no};
    }
    return kv;
}

}  // namespace

ProblemSpec parse_problem_text(std::string_view text) {
    KeyValueFile kv = scan_key_values(text);
    if (kv.has("preset")) return preset(kv.require("preset"));

    const std::string kind = kv.require("kind");
    ProblemSpec p;
    if (kind == "scalar") {
        ScalarProblem s;
        s.a = kv.expr("a");
        s.f = kv.expr("f");
        s.a0 = kv.number("bound_a0");
        s.a1 = kv.number("bound_a1");
        s.M = kv.number("bound_M");
        if (!(s.a0 > 0.0)) throw ProblemFileError("bound_a0 must be positive", 0);
        p = std::move(s);
    } else if (kind == "coupled") {
        CoupledSystemProblem c;
        c.a1_t = kv.expr("a1");
        c.a2_t = kv.expr("a2");
        c.f = kv.expr("f");
        c.g = kv.expr("g");
        c.h1 = kv.expr("h1");
        c.h2 = kv.expr("h2");
        c.a0 = kv.number("bound_a0");
        c.a1 = kv.number("bound_a1");
        c.M = kv.number("bound_M");
        c.alpha = kv.number("alpha", 0.0);
        if (!(c.a0 > 0.0)) throw ProblemFileError("bound_a0 must be positive", 0);
        p = std::move(c);
    } else if (kind == "hamiltonian" || kind == "pde") {
        const int m = static_cast<int>(kv.number("m", 1.0));
        if (m < 1 || m > 16) throw ProblemFileError("m must be between 1 and 16", 0);
        if (kind == "hamiltonian") {
            HamiltonianProblem hm;
            hm.m = m;
            hm.V = kv.expr("V");
            hm.a = kv.expr("a");
            for (int i = 1; i <= m; ++i) hm.f.push_back(kv.expr("f" + std::to_string(i)));
            if (kv.has("f0")) hm.f0 = kv.expr("f0");
            p = std::move(hm);
        } else {
            PdeProblem q;
            q.m = m;
            q.V = kv.expr("V");
            q.a = kv.expr("a");
            for (int i = 1; i <= m; ++i) q.f.push_back(kv.expr("f" + std::to_string(i)));
            p = std::move(q);
        }
    } else {
        throw ProblemFileError("unknown kind '" + kind + "'", 0);
    }
    finalize_problem(p);
    return p;
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open problem file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str());
}

// --- hypothesis validation --------------------------------------------------

HypothesisReport validate_hypotheses(const ProblemSpec& p, double domain_half_length,
                                     int samples, std::uint64_t seed) {
    const double D = domain_half_length + 1.0;  // declared margin
    HypothesisReport report;
    report.kind = problem_kind_name(p);
    Env env;
    char note[160];

    if (const auto* s = std::get_if<ScalarProblem>(&p)) {
        double a_min = std::numeric_limits<double>::infinity(), a_max = -a_min, f_sup = 0.0;
        for (int i = 0; i <= samples; ++i) {
            env.set("t", -D + 2.0 * D * i / samples);
            const double av = s->a.eval(env);
            a_min = std::min(a_min, av);
            a_max = std::max(a_max, av);
            f_sup = std::max(f_sup, std::fabs(s->f.eval(env)));
        }
        report.a_min = a_min;
        report.a_max = a_max;
        report.f_sup = f_sup;
        report.bounds_ok = s->a0 > 0.0 && a_min >= s->a0 - 1e-12 && a_max <= s->a1 + 1e-12 &&
                           f_sup <= s->M + 1e-12;
        if (!report.bounds_ok) {
            std::snprintf(note, sizeof(note),
                          "sampled sup|f| = %.6g versus declared M = %.6g on [%.3g, %.3g]",
                          f_sup, s->M, -D, D);
            report.notes.push_back(note);
        }
    } else if (const auto* c = std::get_if<CoupledSystemProblem>(&p)) {
        Rng rng(seed);
        double a_min = std::numeric_limits<double>::infinity(), a_max = -a_min, f_sup = 0.0;
        for (int i = 0; i <= samples; ++i) {
            env.set("t", -D + 2.0 * D * i / samples);
            for (const Expr* ae : {&c->a1_t, &c->a2_t}) {
                const double av = ae->eval(env);
                a_min = std::min(a_min, av);
                a_max = std::max(a_max, av);
            }
            f_sup = std::max({f_sup, std::fabs(c->h1.eval(env)), std::fabs(c->h2.eval(env))});
        }
        report.a_min = a_min;
        report.a_max = a_max;
        report.f_sup = f_sup;
        report.bounds_ok = c->a0 > 0.0 && a_min >= c->a0 - 1e-12 && a_max <= c->a1 + 1e-12 &&
                           f_sup <= c->M + 1e-12;
        // x f(x,y) >= alpha, y g(x,y) >= alpha on a sampled box
        const double box = 5.0;
        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k < samples; ++k) {
            const double x = rng.uniform(-box, box);
            const double y = rng.uniform(-box, box);
            env.set("x", x);
            env.set("y", y);
            worst = std::min({worst, x * c->f.eval(env), y * c->g.eval(env)});
        }
        if (worst < c->alpha - 1e-9) {
            report.structure_ok = false;
            std::snprintf(note, sizeof(note),
                          "sampled min of x*f / y*g = %.6g below declared alpha = %.6g", worst,
                          c->alpha);
            report.notes.push_back(note);
        }
        const PsdReport psd = psd_check(*c, box, samples, seed + 1);
        if (!psd.pass) {
            report.structure_ok = false;
            std::snprintf(note, sizeof(note),
                          "coupling quadratic form has sampled min eigenvalue %.6g",
                          psd.min_eigenvalue);
            report.notes.push_back(note);
        }
    } else if (const auto* hp = std::get_if<HamiltonianProblem>(&p)) {
        double a_min = std::numeric_limits<double>::infinity(), a_max = -a_min, f_sup = 0.0;
        for (int i = 0; i <= samples; ++i) {
            env.set("t", -D + 2.0 * D * i / samples);
            const double av = hp->a.eval(env);
            a_min = std::min(a_min, av);
            a_max = std::max(a_max, av);
            for (const Expr& fi : hp->f) f_sup = std::max(f_sup, std::fabs(fi.eval(env)));
        }
        report.a_min = a_min;
        report.a_max = a_max;
        report.f_sup = f_sup;
        report.bounds_ok = a_min > 0.0;
        if (hp->f0) {
            // a(t) V(z) + sum z_i f_i(t) >= -f0(t) on a coarse (t, z) lattice
            const double zbox = 3.0;
            const int nt = 41, nz = 21;
            double worst_gap = std::numeric_limits<double>::infinity();
            std::vector<int> idx(hp->m, 0);
            for (int it = 0; it < nt; ++it) {
                const double t = -D + 2.0 * D * it / (nt - 1);
                env.set("t", t);
                const double at = hp->a.eval(env);
                const double f0t = hp->f0->eval(env);
                std::vector<double> fi(hp->m);
                for (int i = 0; i < hp->m; ++i) fi[i] = hp->f[i].eval(env);
                std::fill(idx.begin(), idx.end(), 0);
                for (;;) {
                    double zf = 0.0;
                    for (int i = 0; i < hp->m; ++i) {
                        const double zi = -zbox + 2.0 * zbox * idx[i] / (nz - 1);
                        env.set(z_name(i), zi);
                        zf += zi * fi[i];
                    }
                    worst_gap = std::min(worst_gap, at * hp->V.eval(env) + zf + f0t);
                    int d = 0;
                    while (d < hp->m && ++idx[d] == nz) idx[d++] = 0;
                    if (d == hp->m) break;
                }
            }
            if (worst_gap < -1e-9) {
                report.structure_ok = false;
                std::snprintf(note, sizeof(note),
                              "a V(z) + z.f + f0 dips to %.6g on the sampled lattice", worst_gap);
                report.notes.push_back(note);
            }
        } else {
            report.notes.emplace_back("no f0 declared; energy lower-bound diagnostic skipped");
        }
    } else {
        const auto& q = std::get<PdeProblem>(p);
        Rng rng(seed);
        double a_min = std::numeric_limits<double>::infinity(), a_max = -a_min, f_sup = 0.0;
        for (int k = 0; k < samples; ++k) {
            env.set("x1", rng.uniform(-D, D));
            env.set("x2", rng.uniform(-D, D));
            const double av = q.a.eval(env);
            a_min = std::min(a_min, av);
            a_max = std::max(a_max, av);
            for (const Expr& fi : q.f) f_sup = std::max(f_sup, std::fabs(fi.eval(env)));
        }
        report.a_min = a_min;
        report.a_max = a_max;
        report.f_sup = f_sup;
        report.bounds_ok = a_min > 0.0;
    }
    report.notes.emplace_back("hypotheses checked by sampling only");
    return report;
}

}  // namespace entsol
