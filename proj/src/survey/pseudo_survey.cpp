#include "cohortlab/pseudo_survey.hpp"

#include <algorithm>
#include <cmath>

#include "cohortlab/errors.hpp"
#include "cohortlab/rng.hpp"

namespace cohortlab {

PseudoSurvey generate_pseudo_survey(const SearchEnvironment& env, const PseudoSurveyConfig& cfg,
                                    std::uint64_t seed) {
  if (cfg.n_respondents < 10) throw DomainError("pseudo survey needs at least 10 respondents");
  env.validate();

  RandomStream rng(derive_seed(seed, 0x5EED));
  std::vector<double> field_gamma_shift(cfg.n_fields);
  for (auto& s : field_gamma_shift) s = rng.normal(0.0, cfg.field_gamma_sd);

  PseudoSurvey out;
  out.alpha.resize(cfg.n_respondents);
  out.gamma.resize(cfg.n_respondents);
  out.acceptance_pct.resize(cfg.n_respondents);
  out.field.resize(cfg.n_respondents);

  for (int i = 0; i < cfg.n_respondents; ++i) {
    const int f = static_cast<int>(rng.uniform_int(cfg.n_fields));
    const double gshift = field_gamma_shift[f];
    const double a = std::clamp(
        rng.normal(cfg.alpha_mean + cfg.field_alpha_loading * gshift, cfg.alpha_sd), 0.02, 0.98);
    const double g =
        std::clamp(rng.normal(cfg.gamma_mean + gshift, cfg.gamma_sd), 0.02, 0.98);
    Beliefs bel{a, g, ""};
    const double accept = acceptance_probability_parttime(env, bel);
    out.field[i] = f;
    out.alpha[i] = a;
    out.gamma[i] = g;
    out.acceptance_pct[i] = std::clamp(
        100.0 * accept + cfg.field_acceptance_pp * gshift + rng.normal(0.0, cfg.noise_pp), 0.0,
        100.0);
  }
  return out;
}

SurveyRegressions survey_regressions(const PseudoSurvey& survey) {
  const std::size_t n = survey.alpha.size();
  std::vector<double> gamma_pct(n), alpha_pct(n);
  for (std::size_t i = 0; i < n; ++i) {
    gamma_pct[i] = 100.0 * survey.gamma[i];
    alpha_pct[i] = 100.0 * survey.alpha[i];
  }
  SurveyRegressions out;
  out.gamma_plain = simple_ols(survey.acceptance_pct, {"gamma_pct"}, {&gamma_pct});
  out.gamma_field_fe =
      simple_ols(survey.acceptance_pct, {"gamma_pct"}, {&gamma_pct}, &survey.field);
  out.alpha_plain = simple_ols(survey.acceptance_pct, {"alpha_pct"}, {&alpha_pct});
  out.alpha_field_fe =
      simple_ols(survey.acceptance_pct, {"alpha_pct"}, {&alpha_pct}, &survey.field);
  return out;
}

}  // namespace cohortlab
