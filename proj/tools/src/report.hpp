#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skewtorus/inference.hpp"
#include "skewtorus/mixture.hpp"

namespace skewtorus::app {

using json = nlohmann::ordered_json;

/// Short names used in comparison tables: S, SS, C, SC, WC, SWC, U, SU.
std::string variant_name(Family family, bool skewed);

json component_json(const SkewModel& model, double weight);

/// Model record for a successful fit. `single` carries standard errors for
/// K = 1 fits.
json model_record(const std::string& name, bool skewed, const MixtureFitResult& fit,
                  const FitResult* single);
/// Model record for a failed fit.
json failed_record(const std::string& name, Family family, bool skewed, int components, std::size_t n,
                   int dim, const std::string& error);

json symmetry_record(Family family, int components, const SymmetryTestResult& test);
json selection_record(const ModelRanking& ranking);

/// Rebuilds a mixture from a model record (or any object with "family" and
/// "components").
MixtureModel mixture_from_json(const json& record);

/// Table with one row per component, in the layout of a model comparison table.
std::string render_table(const std::vector<json>& records);

}  // namespace skewtorus::app
