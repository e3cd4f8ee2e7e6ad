#pragma once

#include <string>

#include <json.hpp>

#include "entsol/bvp1d.hpp"
#include "entsol/driver.hpp"
#include "entsol/pde2d.hpp"
#include "entsol/problems.hpp"
#include "entsol/variational.hpp"

namespace entsol {

// nlohmann ADL hooks; `json j = report;` works for every report type.
void to_json(nlohmann::json& j, const LambdaStep& s);
void to_json(nlohmann::json& j, const BoundsReport& r);
void to_json(nlohmann::json& j, const SolveReport& r);
void to_json(nlohmann::json& j, const EnergyReport& r);
void to_json(nlohmann::json& j, const EnergyLevel& level);
void to_json(nlohmann::json& j, const ConvergenceStudy& s);
void to_json(nlohmann::json& j, const PsdReport& r);
void to_json(nlohmann::json& j, const HypothesisReport& r);
void to_json(nlohmann::json& j, const BlowupReport& r);
void to_json(nlohmann::json& j, const InteriorBounds& b);
void to_json(nlohmann::json& j, const SolveReport2d& r);
void to_json(nlohmann::json& j, const ConvergenceStudy2d& s);

std::string csv_string(const GridFn& f, std::string_view comment = {});
std::string csv_string(const GridFn2D& f, std::string_view comment = {});
std::string energy_levels_csv(const std::vector<EnergyLevel>& levels,
                              std::string_view comment = {});
std::string blowup_csv(const BlowupReport& report, std::string_view comment = {});

}  // namespace entsol
