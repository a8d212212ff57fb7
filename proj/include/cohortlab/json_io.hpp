#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "cohortlab/balance.hpp"
#include "cohortlab/diagnostics.hpp"
#include "cohortlab/fit.hpp"
#include "cohortlab/permute.hpp"
#include "cohortlab/pseudo_survey.hpp"
#include "cohortlab/search_model.hpp"
#include "cohortlab/synth.hpp"

namespace cohortlab {

using json = nlohmann::json;

// ---- configuration parsing (structured key-value files) -----------------

// Panel presets: "paper" (sorted assignment, planted published effects),
// "null" (random assignment, nothing planted), "mover" / "mover-null"
// (work provinces and the Q4 indicator, with/without the planted culture
// effect). Throws DomainError on unknown names.
struct PanelPreset {
  std::string name;
  DgpSpec spec;
  PanelCalibration calibration;
  bool mover = false;
};
PanelPreset panel_preset(const std::string& name);
PanelPreset parse_panel_config(const json& j);

// Search-model presets: "table9" carries the elicited-beliefs calibration
// on the default environment; "quadratic" the closed-form check point.
struct SearchPreset {
  std::string name;
  SearchEnvironment env;
  Beliefs beliefs_low;
  Beliefs beliefs_high;
  std::string elicitation_note;  // the /10 mapping, surfaced in reports
};
SearchPreset search_preset(const std::string& name);
SearchPreset parse_search_config(const json& j);

// Fit specifications: either one outcome or an outcome list sharing the
// design (rows = treatments, columns = outcomes in the emitted table).
struct SpecGroup {
  std::string name;
  std::vector<std::string> outcomes;
  Specification base;              // outcome field filled per run
  bool exclude_trend_flagged = false;
  std::string shock_characteristic;  // empty: no shock filter
  double shock_keep_fraction = 1.0;
};
SpecGroup fit_preset(const std::string& name);
SpecGroup parse_spec_group(const json& j);

json dgp_spec_to_json(const DgpSpec& spec);
json calibration_to_json(const PanelCalibration& cal);

// ---- artifact serialization (every artifact carries a schema tag) -------

json fit_result_to_json(const FitResult& r);
json balance_report_to_json(const BalanceReport& r);
json permutation_to_json(const PermutationSummary& r);
json residual_variation_to_json(const ResidualVariationReport& r);
json trend_flags_to_json(const TrendFlagReport& r);
json belief_gap_to_json(const BeliefGapReport& r, const SearchPreset& preset);
json survey_regressions_to_json(const SurveyRegressions& r);
json comparative_statics_to_json(const ComparativeStatics& r);

// Validates the "schema" tag of a loaded artifact; throws DataContractError.
void require_schema(const json& j, const std::string& kind);

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace cohortlab
