#include "cohortlab/json_io.hpp"

#include <fstream>

#include "cohortlab/errors.hpp"

namespace cohortlab {

namespace {

constexpr const char* kSchemaPrefix = "cohortlab/";
constexpr const char* kSchemaVersion = "/v1";

json schema_tag(const std::string& kind) { return kSchemaPrefix + kind + kSchemaVersion; }

SampleFilter parse_filter(const json& j) {
  SampleFilter f;
  if (j.contains("gender")) {
    const std::string g = j.at("gender").get<std::string>();
    if (g == "F") {
      f.female = true;
    } else if (g == "M") {
      f.female = false;
    } else if (g != "any") {
      throw DomainError("filter.gender must be F, M, or any");
    }
  }
  f.employed_only = j.value("employed_only", true);
  f.q4_sample = j.value("q4_sample", false);
  if (j.contains("exclude_degrees")) {
    f.exclude_degrees = j.at("exclude_degrees").get<std::vector<std::int32_t>>();
  }
  return f;
}

}  // namespace

PanelPreset panel_preset(const std::string& name) {
  PanelPreset p;
  p.name = name;
  if (name == "paper") {
    p.spec.regime = DgpSpec::Regime::sorted;
  } else if (name == "null") {
    p.spec.regime = DgpSpec::Regime::random;
    p.spec.delta_fp_earnings = p.spec.delta_fp_hours = p.spec.delta_fp_fulltime = 0.0;
    p.spec.delta_mp_earnings = p.spec.delta_mp_hours = p.spec.delta_mp_fulltime = 0.0;
    p.spec.female_gap_earnings = p.spec.female_gap_hours = p.spec.female_gap_fulltime = 0.0;
    p.spec.own_earnings = p.spec.own_hours = p.spec.own_fulltime = 0.0;
  } else if (name == "random") {
    // random assignment with the published planted effects
    p.spec.regime = DgpSpec::Regime::random;
  } else if (name == "mover" || name == "mover-null") {
    p.mover = true;
    p.spec.regime = DgpSpec::Regime::sorted;
    p.spec.own_earnings = p.spec.own_hours = p.spec.own_fulltime = 0.0;
    p.spec.q4_fulltime_effect = name == "mover" ? 0.022 : 0.0;
  } else {
    throw DomainError("unknown panel preset: '" + name + "'");
  }
  return p;
}

PanelPreset parse_panel_config(const json& j) {
  PanelPreset p = panel_preset(j.value("preset", std::string("null")));
  if (j.contains("name")) p.name = j.at("name").get<std::string>();
  json spec = j.value("dgp", json::object());
  auto& s = p.spec;
  if (spec.contains("regime")) {
    const std::string r = spec.at("regime").get<std::string>();
    if (r == "random") {
      s.regime = DgpSpec::Regime::random;
    } else if (r == "sorted") {
      s.regime = DgpSpec::Regime::sorted;
    } else {
      throw DomainError("dgp.regime must be random or sorted");
    }
  }
  s.sorting_intensity = spec.value("sorting_intensity", s.sorting_intensity);
  s.cohort_drift = spec.value("cohort_drift", s.cohort_drift);
  s.confounded = spec.value("confounded", s.confounded);
  s.confound_loading = spec.value("confound_loading", s.confound_loading);
  s.delta_fp_earnings = spec.value("delta_fp_earnings", s.delta_fp_earnings);
  s.delta_fp_hours = spec.value("delta_fp_hours", s.delta_fp_hours);
  s.delta_fp_fulltime = spec.value("delta_fp_fulltime", s.delta_fp_fulltime);
  s.delta_mp_earnings = spec.value("delta_mp_earnings", s.delta_mp_earnings);
  s.delta_mp_hours = spec.value("delta_mp_hours", s.delta_mp_hours);
  s.delta_mp_fulltime = spec.value("delta_mp_fulltime", s.delta_mp_fulltime);
  s.own_earnings = spec.value("own_earnings", s.own_earnings);
  s.own_hours = spec.value("own_hours", s.own_hours);
  s.own_fulltime = spec.value("own_fulltime", s.own_fulltime);
  s.female_gap_earnings = spec.value("female_gap_earnings", s.female_gap_earnings);
  s.female_gap_hours = spec.value("female_gap_hours", s.female_gap_hours);
  s.female_gap_fulltime = spec.value("female_gap_fulltime", s.female_gap_fulltime);
  s.q4_fulltime_effect = spec.value("q4_fulltime_effect", s.q4_fulltime_effect);
  s.employment_rate = spec.value("employment_rate", s.employment_rate);
  if (j.contains("mover")) p.mover = j.at("mover").get<bool>();

  json cal = j.value("calibration", json::object());
  auto& c = p.calibration;
  c.n_provinces = cal.value("n_provinces", c.n_provinces);
  c.n_regions = cal.value("n_regions", c.n_regions);
  c.flfp_mean = cal.value("flfp_mean", c.flfp_mean);
  c.flfp_sd = cal.value("flfp_sd", c.flfp_sd);
  c.flfp_min = cal.value("flfp_min", c.flfp_min);
  c.flfp_max = cal.value("flfp_max", c.flfp_max);
  c.n_degrees = cal.value("n_degrees", c.n_degrees);
  c.n_cohorts = cal.value("n_cohorts", c.n_cohorts);
  c.first_cohort = cal.value("first_cohort", c.first_cohort);
  c.size_median = cal.value("size_median", c.size_median);
  c.size_mean = cal.value("size_mean", c.size_mean);
  c.size_shift = cal.value("size_shift", c.size_shift);
  c.size_min = cal.value("size_min", c.size_min);
  c.size_max = cal.value("size_max", c.size_max);
  c.cohort_size_cv = cal.value("cohort_size_cv", c.cohort_size_cv);
  c.female_share = cal.value("female_share", c.female_share);
  return p;
}

SearchPreset search_preset(const std::string& name) {
  SearchPreset p;
  p.name = name;
  p.elicitation_note = "offers_out_of_10 / 10";
  if (name == "table9") {
    p.env = SearchEnvironment{0.95, 0.2, 0.7, WageDistribution::uniform(0.0, 1.0), 0.3365,
                              0.5442};
    p.beliefs_low = beliefs_from_elicited(3.206, 57.64, "L");
    p.beliefs_high = beliefs_from_elicited(3.524, 51.19, "H");
  } else if (name == "quadratic") {
    p.env = SearchEnvironment{0.9, 0.0, 0.5, WageDistribution::uniform(0.0, 1.0), 0.6, 0.5};
    p.beliefs_low = Beliefs{1.0, 0.0, "single-type"};
    p.beliefs_high = Beliefs{1.0, 0.0, "single-type"};
  } else if (name == "default") {
    p.env = SearchEnvironment{0.95, 0.2, 0.5, WageDistribution::uniform(0.0, 1.0), 0.5, 0.5};
    p.beliefs_low = Beliefs{0.4, 0.6, "L"};
    p.beliefs_high = Beliefs{0.6, 0.4, "H"};
  } else {
    throw DomainError("unknown search preset: '" + name + "'");
  }
  return p;
}

SearchPreset parse_search_config(const json& j) {
  SearchPreset p = search_preset(j.value("preset", std::string("default")));
  if (j.contains("env")) {
    const json& e = j.at("env");
    p.env.beta = e.value("beta", p.env.beta);
    p.env.b = e.value("b", p.env.b);
    p.env.theta = e.value("theta", p.env.theta);
    p.env.alpha_true = e.value("alpha_true", p.env.alpha_true);
    p.env.gamma_true = e.value("gamma_true", p.env.gamma_true);
    if (e.contains("wage_dist")) {
      const json& w = e.at("wage_dist");
      const std::string family = w.value("family", std::string("uniform"));
      if (family == "uniform") {
        p.env.wage_dist =
            WageDistribution::uniform(w.value("min", 0.0), w.value("max", 1.0));
      } else if (family == "trunc_lognormal") {
        p.env.wage_dist = WageDistribution::truncated_lognormal(
            w.value("min", 0.1), w.value("max", 3.0), w.value("mu_log", 0.0),
            w.value("sigma_log", 0.5));
      } else {
        throw DomainError("wage_dist.family must be uniform or trunc_lognormal");
      }
    }
  }
  const auto parse_beliefs = [&](const char* key, Beliefs& out) {
    if (!j.contains(key)) return;
    const json& b = j.at(key);
    if (b.contains("offers_out_of_10")) {
      out = beliefs_from_elicited(b.at("offers_out_of_10").get<double>(),
                                  b.value("parttime_pct", 100.0 * out.gamma),
                                  b.value("label", out.group_label));
    } else {
      out.alpha = b.value("alpha", out.alpha);
      out.gamma = b.value("gamma", out.gamma);
      out.group_label = b.value("label", out.group_label);
    }
  };
  parse_beliefs("beliefs_low", p.beliefs_low);
  parse_beliefs("beliefs_high", p.beliefs_high);
  return p;
}

SpecGroup fit_preset(const std::string& name) {
  SpecGroup g;
  g.name = name;
  g.outcomes = {"log_earnings", "log_hours", "fulltime", "log_wage"};
  g.base.treatments = {"loo_female_mean", "loo_male_mean"};
  g.base.controls = {"flfp_origin"};
  g.base.fixed_effects = {"degree", "cohort"};
  g.base.cluster = "degree";
  g.base.filter.female = true;
  if (name == "table6") {
    // baseline linear-in-means design
  } else if (name == "table6_degree_trends") {
    g.base.trend = Specification::Trend::degree_linear;
  } else if (name == "table6_region_trends") {
    g.base.trend = Specification::Trend::region_linear;
  } else if (name == "table6_province_fe") {
    g.base.fixed_effects = {"degree", "cohort", "province_origin"};
    g.base.controls.clear();
  } else if (name == "table6_no_size_trends") {
    g.exclude_trend_flagged = true;
  } else if (name == "table6_male") {
    g.base.filter.female = false;
  } else if (name == "table3_movers") {
    g.outcomes = {"fulltime", "log_hours"};
    g.base.treatments = {"q4_flfp"};
    g.base.controls.clear();
    g.base.fixed_effects = {"degree", "cohort", "province_job"};
    g.base.standardize_treatments = false;
    g.base.filter.q4_sample = true;
  } else {
    throw DomainError("unknown fit preset: '" + name + "'");
  }
  return g;
}

SpecGroup parse_spec_group(const json& j) {
  SpecGroup g;
  if (j.contains("preset")) g = fit_preset(j.at("preset").get<std::string>());
  if (j.contains("name")) g.name = j.at("name").get<std::string>();
  if (g.name.empty()) g.name = "custom";
  if (j.contains("outcomes")) g.outcomes = j.at("outcomes").get<std::vector<std::string>>();
  if (j.contains("outcome")) g.outcomes = {j.at("outcome").get<std::string>()};
  if (j.contains("treatments")) {
    g.base.treatments = j.at("treatments").get<std::vector<std::string>>();
  }
  if (j.contains("controls")) g.base.controls = j.at("controls").get<std::vector<std::string>>();
  if (j.contains("fixed_effects")) {
    g.base.fixed_effects = j.at("fixed_effects").get<std::vector<std::string>>();
  }
  if (j.contains("trend")) {
    const std::string t = j.at("trend").get<std::string>();
    if (t == "none") {
      g.base.trend = Specification::Trend::none;
    } else if (t == "degree_linear") {
      g.base.trend = Specification::Trend::degree_linear;
    } else if (t == "region_linear") {
      g.base.trend = Specification::Trend::region_linear;
    } else {
      throw DomainError("trend must be none, degree_linear, or region_linear");
    }
  }
  if (j.contains("cluster")) g.base.cluster = j.at("cluster").get<std::string>();
  if (j.contains("standardize_treatments")) {
    g.base.standardize_treatments = j.at("standardize_treatments").get<bool>();
  }
  if (j.contains("filter")) g.base.filter = parse_filter(j.at("filter"));
  if (j.contains("exclude_trend_flagged")) {
    g.exclude_trend_flagged = j.at("exclude_trend_flagged").get<bool>();
  }
  if (j.contains("shock_filter")) {
    g.shock_characteristic = j.at("shock_filter").value("characteristic", std::string());
    g.shock_keep_fraction = j.at("shock_filter").value("keep_fraction", 0.75);
  }
  if (g.outcomes.empty()) throw DomainError("specification needs at least one outcome");
  if (g.base.treatments.empty()) throw DomainError("specification needs treatments");
  return g;
}

json dgp_spec_to_json(const DgpSpec& s) {
  return json{{"regime", s.regime == DgpSpec::Regime::sorted ? "sorted" : "random"},
              {"sorting_intensity", s.sorting_intensity},
              {"cohort_drift", s.cohort_drift},
              {"confounded", s.confounded},
              {"confound_loading", s.confound_loading},
              {"delta_fp", {{"log_earnings", s.delta_fp_earnings},
                            {"log_hours", s.delta_fp_hours},
                            {"fulltime", s.delta_fp_fulltime}}},
              {"delta_mp", {{"log_earnings", s.delta_mp_earnings},
                            {"log_hours", s.delta_mp_hours},
                            {"fulltime", s.delta_mp_fulltime}}},
              {"own_origin", {{"log_earnings", s.own_earnings},
                              {"log_hours", s.own_hours},
                              {"fulltime", s.own_fulltime}}},
              {"female_gap", {{"log_earnings", s.female_gap_earnings},
                              {"log_hours", s.female_gap_hours},
                              {"fulltime", s.female_gap_fulltime}}},
              {"hours_on_fulltime", s.hours_on_fulltime},
              {"q4_fulltime_effect", s.q4_fulltime_effect},
              {"employment_rate", s.employment_rate}};
}

json calibration_to_json(const PanelCalibration& c) {
  return json{{"n_provinces", c.n_provinces}, {"n_regions", c.n_regions},
              {"flfp_mean", c.flfp_mean},     {"flfp_sd", c.flfp_sd},
              {"flfp_min", c.flfp_min},       {"flfp_max", c.flfp_max},
              {"n_degrees", c.n_degrees},     {"n_cohorts", c.n_cohorts},
              {"first_cohort", c.first_cohort}, {"size_median", c.size_median},
              {"size_mean", c.size_mean},     {"size_shift", c.size_shift},
              {"size_min", c.size_min},       {"size_max", c.size_max},
              {"female_share", c.female_share}};
}

json fit_result_to_json(const FitResult& r) {
  json terms = json::array();
  for (int j = 0; j < r.coef.size(); ++j) {
    terms.push_back(json{{"term", r.terms[static_cast<std::size_t>(j)]},
                         {"coef", r.coef(j)},
                         {"se", r.se(j)},
                         {"t", r.tstat(j)}});
  }
  json vcov = json::array();
  for (int a = 0; a < r.vcov.rows(); ++a) {
    json row = json::array();
    for (int b = 0; b < r.vcov.cols(); ++b) row.push_back(r.vcov(a, b));
    vcov.push_back(row);
  }
  return json{{"schema", schema_tag("fit")},
              {"name", r.name},
              {"outcome", r.outcome},
              {"terms", terms},
              {"vcov", vcov},
              {"r2", r.r2_full},
              {"r2_within", r.r2_within},
              {"n_obs", r.n_obs},
              {"n_clusters", r.n_clusters},
              {"demean_sweeps", r.demean_sweeps},
              {"demean_converged", r.demean_converged},
              {"singleton_rows_dropped", r.singleton_rows_dropped},
              {"missing_rows_dropped", r.missing_rows_dropped},
              {"absorbed_dof", r.absorbed_dof},
              {"cr1_factor", r.cr1_factor},
              {"warnings", r.warnings}};
}

json balance_report_to_json(const BalanceReport& r) {
  json cov = json::array(), pred = json::array(), joint = json::array();
  for (const auto& row : r.covariate_rows) cov.push_back(fit_result_to_json(row));
  for (const auto& row : r.predicted_outcome_rows) pred.push_back(fit_result_to_json(row));
  for (const auto& jt : r.joint_tests) {
    joint.push_back(json{{"treatment", jt.treatment},
                         {"f_classical", jt.f_classical},
                         {"p_classical", jt.p_classical},
                         {"dof1", jt.dof1},
                         {"dof2", jt.dof2},
                         {"f_cluster", jt.f_cluster},
                         {"p_cluster", jt.p_cluster},
                         {"dof2_cluster", jt.dof2_cluster}});
  }
  return json{{"schema", schema_tag("balance")},
              {"covariates", cov},
              {"predicted_outcomes", pred},
              {"joint_f_tests", joint}};
}

json permutation_to_json(const PermutationSummary& r) {
  return json{{"schema", schema_tag("permutation")},
              {"n_draws", r.n_draws},
              {"observed", r.observed},
              {"mean", r.mean},
              {"sd", r.sd},
              {"min", r.min},
              {"max", r.max},
              {"percentile_of_observed", r.percentile_of_observed},
              {"draws", r.draws}};
}

json residual_variation_to_json(const ResidualVariationReport& r) {
  json quintiles = json::array();
  for (const auto& q : r.by_size_quintile) {
    quintiles.push_back(json{{"quintile", q.quintile},
                             {"avg_size_min", q.avg_size_min},
                             {"avg_size_max", q.avg_size_max},
                             {"n_cells", q.n_cells},
                             {"raw_sd", q.raw_sd},
                             {"residual_sd", q.residual_sd}});
  }
  json hist = json::array();
  for (const auto& b : r.residual_histogram) {
    hist.push_back(json{{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  }
  return json{{"schema", schema_tag("residual_variation")},
              {"characteristic", r.characteristic},
              {"n_cells", r.n_cells},
              {"n_degrees", r.n_degrees},
              {"n_degrees_dropped", r.n_degrees_dropped},
              {"raw_mean", r.raw_mean},
              {"raw_sd", r.raw_sd},
              {"raw_min", r.raw_min},
              {"raw_max", r.raw_max},
              {"residual_sd", r.residual_sd},
              {"residual_sd_weighted", r.residual_sd_weighted},
              {"residual_min", r.residual_min},
              {"residual_max", r.residual_max},
              {"histogram_bin_width", r.histogram_bin_width},
              {"histogram", hist},
              {"by_size_quintile", quintiles},
              {"demean_sweeps", r.demean_sweeps}};
}

json trend_flags_to_json(const TrendFlagReport& r) {
  return json{{"schema", schema_tag("flags")},
              {"p_threshold", r.p_threshold},
              {"n_tested", r.n_tested},
              {"n_skipped", r.n_skipped},
              {"n_flagged", r.flagged.size()},
              {"flagged_degrees", r.flagged}};
}

json belief_gap_to_json(const BeliefGapReport& r, const SearchPreset& preset) {
  const auto group = [](const GroupSolution& g) {
    return json{{"label", g.beliefs.group_label},
                {"alpha", g.beliefs.alpha},
                {"gamma", g.beliefs.gamma},
                {"reservation_earnings", g.reservation_earnings},
                {"w_res_parttime", g.w_res_parttime},
                {"acceptance_parttime", g.acceptance_parttime},
                {"job_finding_rate", g.job_finding_rate}};
  };
  return json{{"schema", schema_tag("belief_gap")},
              {"preset", preset.name},
              {"elicitation_mapping", preset.elicitation_note},
              {"env",
               {{"beta", preset.env.beta},
                {"b", preset.env.b},
                {"theta", preset.env.theta},
                {"alpha_true", preset.env.alpha_true},
                {"gamma_true", preset.env.gamma_true},
                {"wage_family", preset.env.wage_dist.family_name()},
                {"wage_min", preset.env.wage_dist.support_min()},
                {"wage_max", preset.env.wage_dist.support_max()}}},
              {"low", group(r.low)},
              {"high", group(r.high)},
              {"orderings",
               {{"reservation_low_below_high", r.reservation_low_below_high},
                {"lambda_low_above_high", r.lambda_low_above_high},
                {"acceptance_low_above_high", r.acceptance_low_above_high}}}};
}

json survey_regressions_to_json(const SurveyRegressions& r) {
  return json{{"schema", schema_tag("survey_regressions")},
              {"acceptance_on_gamma", fit_result_to_json(r.gamma_plain)},
              {"acceptance_on_gamma_field_fe", fit_result_to_json(r.gamma_field_fe)},
              {"acceptance_on_alpha", fit_result_to_json(r.alpha_plain)},
              {"acceptance_on_alpha_field_fe", fit_result_to_json(r.alpha_field_fe)}};
}

json comparative_statics_to_json(const ComparativeStatics& r) {
  return json{{"fd_dalpha", r.fd_dalpha},
              {"fd_dgamma", r.fd_dgamma},
              {"analytic_dalpha", r.analytic_dalpha},
              {"analytic_dgamma", r.analytic_dgamma},
              {"step_alpha", r.step_alpha},
              {"step_gamma", r.step_gamma}};
}

void require_schema(const json& j, const std::string& kind) {
  const std::string want = kSchemaPrefix + kind + kSchemaVersion;
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != want) {
    throw DataContractError("artifact does not declare schema '" + want + "'");
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataContractError("cannot open JSON file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataContractError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataContractError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace cohortlab
