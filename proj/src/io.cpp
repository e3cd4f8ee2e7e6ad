#include "entsol/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace entsol {

using nlohmann::json;

namespace {

json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

void to_json(json& j, const LambdaStep& s) {
    j = json{{"lambda", s.lambda}, {"newton_iterations", s.newton_iterations}};
}

void to_json(json& j, const BoundsReport& r) {
    j = json{{"K0_measured", r.K0_measured},
             {"K1_measured", r.K1_measured},
             {"K2_measured", r.K2_measured},
             {"pass", r.pass}};
    if (r.K0_predicted) j["K0_predicted"] = *r.K0_predicted;
    if (r.K1_predicted) j["K1_predicted"] = *r.K1_predicted;
    if (r.K2_predicted) j["K2_predicted"] = *r.K2_predicted;
}

void to_json(json& j, const SolveReport& r) {
    j = json{{"kind", "solve_report"},
             {"grid", {{"L", r.solution.grid().half_length},
                       {"h", r.solution.grid().spacing},
                       {"m", r.solution.components()}}},
             {"lambda_path", r.lambda_path},
             {"final_residual_sup", r.final_residual_sup},
             {"solution_sup", sup_norm(r.solution)}};
    if (r.bounds) j["bounds"] = *r.bounds;
}

void to_json(json& j, const EnergyReport& r) {
    j = json{{"J", r.J_value},
             {"rest_energy", r.rest_energy},
             {"grad_sup", r.grad_sup},
             {"iterations", r.iterations},
             {"h1_seminorm_sq", r.h1_seminorm_sq}};
}

void to_json(json& j, const EnergyLevel& level) {
    j = json{{"L", level.L},
             {"M_L", level.M_L},
             {"rest_energy", level.rest_energy},
             {"h1_seminorm_sq", level.h1_seminorm_sq},
             {"iterations", level.iterations}};
}

void to_json(json& j, const ConvergenceStudy& s) {
    j = json{{"kind", "study"},
             {"window", s.window_half_length},
             {"Ls", s.Ls},
             {"window_diffs", s.window_diffs},
             {"converged", s.converged},
             {"final_window_sup", sup_norm(s.final_window_solution)}};
    if (!s.bounds_reports.empty()) j["bounds_reports"] = s.bounds_reports;
    if (!s.energy_reports.empty()) j["energy_reports"] = s.energy_reports;
}

void to_json(json& j, const PsdReport& r) {
    j = json{{"min_eigenvalue", r.min_eigenvalue},
             {"argmin", {{"t", r.at_t}, {"x", r.at_x}, {"y", r.at_y}}},
             {"samples", r.samples},
             {"pass", r.pass}};
}

void to_json(json& j, const HypothesisReport& r) {
    j = json{{"kind", "validation"},
             {"problem_kind", r.kind},
             {"sampled", true},
             {"a_min", finite_or_null(r.a_min)},
             {"a_max", finite_or_null(r.a_max)},
             {"f_sup", finite_or_null(r.f_sup)},
             {"bounds_ok", r.bounds_ok},
             {"structure_ok", r.structure_ok},
             {"notes", r.notes}};
}

void to_json(json& j, const BlowupReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) rows.push_back({{"L", row.L}, {"sup_u", row.sup_u}});
    j = json{{"kind", "blowup_demo"},
             {"rows", rows},
             {"residual_oracle",
              {{"h", r.oracle_h},
               {"sup_at_h", r.exact_residual_sup},
               {"sup_at_half_h", r.exact_residual_sup_half},
               {"ratio", r.residual_ratio},
               {"at_zero", r.residual_at_zero},
               {"at_zero_model", r.residual_at_zero_model}}},
             {"window_sup_f", r.window_sup_f},
             {"growth_threshold", r.growth_threshold},
             {"growth_ok", r.growth_ok}};
}

void to_json(json& j, const InteriorBounds& b) {
    j = json{{"sup_u", b.sup_u_full},
             {"sup_Du_margin1", b.sup_Du_margin1},
             {"sup_D2u_margin2", b.sup_D2u_margin2},
             {"holder_quotient_sample", b.holder_quotient_sample}};
}

void to_json(json& j, const SolveReport2d& r) {
    j = json{{"kind", "solve_report_2d"},
             {"grid", {{"L", r.solution.grid().half_length},
                       {"h", r.solution.grid().spacing},
                       {"m", r.solution.components()}}},
             {"method", r.method == Method2d::Newton ? "newton" : "minimize"},
             {"iterations", r.iterations},
             {"final_residual_sup", r.final_residual_sup},
             {"solution_sup", sup_norm(r.solution)}};
    if (!r.lambda_path.empty()) j["lambda_path"] = r.lambda_path;
}

void to_json(json& j, const ConvergenceStudy2d& s) {
    j = json{{"kind", "study_2d"},
             {"window", s.window_half_length},
             {"Ls", s.Ls},
             {"window_diffs", s.window_diffs},
             {"converged", s.converged},
             {"final_window_sup", sup_norm(s.final_window_solution)}};
    if (!s.interior_bounds.empty()) j["interior_bounds"] = s.interior_bounds;
}

std::string csv_string(const GridFn& f, std::string_view comment) {
    std::ostringstream out;
    write_csv(out, f, comment);
    return out.str();
}

std::string csv_string(const GridFn2D& f, std::string_view comment) {
    std::ostringstream out;
    write_csv(out, f, comment);
    return out.str();
}

std::string energy_levels_csv(const std::vector<EnergyLevel>& levels, std::string_view comment) {
    std::ostringstream out;
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "L,M_L,h1_seminorm_sq,iterations,rest_energy\n";
    char buf[128];
    for (const auto& level : levels) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%.17g\n", level.L, level.M_L,
                      level.h1_seminorm_sq, level.iterations, level.rest_energy);
        out << buf;
    }
    return out.str();
}

std::string blowup_csv(const BlowupReport& report, std::string_view comment) {
    std::ostringstream out;
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "L,sup_u\n";
    char buf[64];
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", row.L, row.sup_u);
        out << buf;
    }
    return out.str();
}

}  // namespace entsol
