#pragma once

#include <cstdint>
#include <vector>

#include "cohortlab/fit.hpp"
#include "cohortlab/search_model.hpp"

namespace cohortlab {

// Model-generated stand-in for the elicited beliefs data: respondents hold
// heterogeneous (alpha, gamma), their intended part-time acceptance is the
// model's 1 - F(R/theta) plus survey noise, and study fields shift both
// beliefs and intentions so field effects load on the regressors.
struct PseudoSurveyConfig {
  int n_respondents = 463;
  int n_fields = 10;
  double alpha_mean = 0.34;
  double alpha_sd = 0.10;
  double gamma_mean = 0.54;
  double gamma_sd = 0.23;     // matches the elicited one-SD of 23pp
  double field_gamma_sd = 0.06;      // field shifts of gamma
  double field_alpha_loading = -0.4; // field alpha shift per unit gamma shift
  double field_acceptance_pp = 40.0; // direct field effect on acceptance per unit gamma shift
  double noise_pp = 8.0;             // idiosyncratic acceptance noise
};

struct PseudoSurvey {
  std::vector<double> alpha;           // beliefs, 0..1
  std::vector<double> gamma;
  std::vector<double> acceptance_pct;  // intended part-time acceptance, 0..100
  std::vector<std::int32_t> field;
};

PseudoSurvey generate_pseudo_survey(const SearchEnvironment& env, const PseudoSurveyConfig& cfg,
                                    std::uint64_t seed);

// The four survey regressions: acceptance on gamma and on alpha, each with
// and without field effects (percent scales on both sides).
struct SurveyRegressions {
  FitResult gamma_plain;
  FitResult gamma_field_fe;
  FitResult alpha_plain;
  FitResult alpha_field_fe;
};

SurveyRegressions survey_regressions(const PseudoSurvey& survey);

}  // namespace cohortlab
