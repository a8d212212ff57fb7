// cohortlab: batch front-end for the search-model and peer-effects pipeline.
//
// Subcommands: synth, exposures, diagnose, fit, balance, permute, solve,
// sweep, spells, beliefs, report. Exit codes: 0 success, 1 usage error,
// 2 data/contract violation, 3 numerical non-convergence.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include "cohortlab/balance.hpp"
#include "cohortlab/diagnostics.hpp"
#include "cohortlab/errors.hpp"
#include "cohortlab/fit.hpp"
#include "cohortlab/json_io.hpp"
#include "cohortlab/kernels.hpp"
#include "cohortlab/permute.hpp"
#include "cohortlab/pseudo_survey.hpp"
#include "cohortlab/report.hpp"
#include "cohortlab/search_model.hpp"
#include "cohortlab/synth.hpp"

namespace fs = std::filesystem;
using namespace cohortlab;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOpts {
  std::string out;
  std::uint64_t seed = 0;
  std::string preset;
  std::string spec_path;
  int draws = 500;
  int threads = 1;
  bool force = false;
};

std::string default_out_dir() {
  const char* env = std::getenv("COHORTLAB_OUT");
  return env != nullptr && *env != '\0' ? env : ".";
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_seed, bool with_preset) {
  cmd->add_option("--out", o.out, "output directory")->default_val(default_out_dir());
  if (with_seed) {
    cmd->add_option("--seed", o.seed, "random seed (required)")->required();
  }
  if (with_preset) cmd->add_option("--preset", o.preset, "named preset");
  cmd->add_option("--spec", o.spec_path, "JSON configuration file");
  cmd->add_option("--draws", o.draws, "replication/spell draws");
  cmd->add_option("--threads", o.threads, "worker cap (does not affect results)");
  cmd->add_flag("--force", o.force, "allow overwriting existing outputs");
}

std::string artifact_path(const CommonOpts& o, const std::string& name, bool* fresh = nullptr) {
  fs::create_directories(o.out);
  const std::string p = (fs::path(o.out) / name).string();
  if (fs::exists(p) && !o.force) {
    throw UsageError("refusing to overwrite " + p + " (pass --force)");
  }
  if (fresh != nullptr) *fresh = true;
  return p;
}

std::string input_path(const CommonOpts& o, const std::string& name) {
  const std::string p = (fs::path(o.out) / name).string();
  if (!fs::exists(p)) {
    throw DataContractError("missing input artifact " + p + "; run the producing subcommand");
  }
  return p;
}

PanelPreset resolve_panel_config(const CommonOpts& o) {
  if (!o.spec_path.empty()) return parse_panel_config(load_json_file(o.spec_path));
  return panel_preset(o.preset.empty() ? "null" : o.preset);
}

SearchPreset resolve_search_config(const CommonOpts& o) {
  if (!o.spec_path.empty()) return parse_search_config(load_json_file(o.spec_path));
  return search_preset(o.preset.empty() ? "table9" : o.preset);
}

// ---- subcommand bodies ---------------------------------------------------

void run_synth(const CommonOpts& o) {
  const PanelPreset preset = resolve_panel_config(o);
  const std::string students = artifact_path(o, "students.csv");
  const std::string provinces = artifact_path(o, "provinces.csv");
  const std::string truth = artifact_path(o, "truth.json");

  const PanelGeneration gen = preset.mover
                                  ? generate_mover_sample(preset.spec, preset.calibration, o.seed)
                                  : generate_panel(preset.spec, preset.calibration, o.seed);
  write_students_csv(students, gen.panel);
  write_provinces_csv(provinces, gen.provinces);

  json t;
  t["schema"] = "cohortlab/truth/v1";
  t["preset"] = preset.name;
  t["seed"] = o.seed;
  t["mover"] = preset.mover;
  t["dgp"] = dgp_spec_to_json(preset.spec);
  t["calibration"] = calibration_to_json(preset.calibration);
  t["n_students"] = gen.panel.size();
  t["gender_redraws"] = gen.gender_redraws;
  t["exposure_standardization"] = json{{"female_mean", gen.exposure_female_mean},
                                       {"female_sd", gen.exposure_female_sd},
                                       {"male_mean", gen.exposure_male_mean},
                                       {"male_sd", gen.exposure_male_sd},
                                       {"own_mean", gen.own_flfp_mean},
                                       {"own_sd", gen.own_flfp_sd}};
  write_json_file(truth, t);
  std::printf("synth: %zu students, %lld gender redraws -> %s\n", gen.panel.size(),
              static_cast<long long>(gen.gender_redraws), o.out.c_str());
}

void run_exposures(const CommonOpts& o) {
  const CohortPanel panel = read_students_csv(input_path(o, "students.csv"));
  const ExposureColumns expo = compute_exposures(panel);
  write_exposures_csv(artifact_path(o, "exposures.csv"), panel, expo);
  std::printf("exposures: %zu rows, %lld flagged singleton same-gender cells\n", panel.size(),
              static_cast<long long>(expo.n_missing_same_gender));
}

void run_diagnose(const CommonOpts& o) {
  const CohortPanel panel = read_students_csv(input_path(o, "students.csv"));

  json rv = json::object();
  for (auto c : {CellCharacteristic::flfp_all_peers, CellCharacteristic::flfp_female_peers,
                 CellCharacteristic::flfp_male_peers}) {
    rv[characteristic_name(c)] = residual_variation_to_json(residual_variation(panel, c));
  }
  json diag;
  diag["schema"] = "cohortlab/diagnostics/v1";
  diag["residual_variation"] = rv;
  write_json_file(artifact_path(o, "residual_variation.json"), diag);

  std::ofstream shock_csv(artifact_path(o, "shock_stats.csv"));
  shock_csv << "degree_id,characteristic,z,relative_z,relative_defined,t_max\n";
  for (auto c : {CellCharacteristic::mean_ability, CellCharacteristic::sd_ability,
                 CellCharacteristic::cell_size}) {
    for (const auto& s : shock_statistics(panel, c)) {
      shock_csv << s.degree_id << ',' << s.characteristic << ',' << s.z << ','
                << (s.relative_defined ? std::to_string(s.relative_z) : std::string()) << ','
                << (s.relative_defined ? 1 : 0) << ',' << s.t_max << '\n';
    }
  }
  write_json_file(artifact_path(o, "flags.json"), trend_flags_to_json(flag_size_trends(panel)));
  std::printf("diagnose: residual_variation.json, shock_stats.csv, flags.json -> %s\n",
              o.out.c_str());
}

void run_fit(const CommonOpts& o) {
  const CohortPanel panel = read_students_csv(input_path(o, "students.csv"));
  const ExposureColumns expo = compute_exposures(panel);
  SpecGroup group = !o.spec_path.empty()
                        ? parse_spec_group(load_json_file(o.spec_path))
                        : fit_preset(o.preset.empty() ? "table6" : o.preset);

  if (group.exclude_trend_flagged) {
    const auto flags = flag_size_trends(panel);
    auto& ex = group.base.filter.exclude_degrees;
    ex.insert(ex.end(), flags.flagged.begin(), flags.flagged.end());
  }
  if (!group.shock_characteristic.empty()) {
    const auto stats =
        shock_statistics(panel, parse_characteristic(group.shock_characteristic));
    const auto keep = filter_degrees_by_shock(stats, group.shock_keep_fraction);
    // translate the keep-list into an exclusion list
    std::set<std::int32_t> keep_set(keep.begin(), keep.end());
    for (const auto& s : stats) {
      if (keep_set.count(s.degree_id) == 0) {
        group.base.filter.exclude_degrees.push_back(s.degree_id);
      }
    }
  }

  json fits = json::array();
  std::vector<FitResult> results;
  for (const auto& outcome : group.outcomes) {
    Specification spec = group.base;
    spec.name = group.name + "_" + outcome;
    spec.outcome = outcome;
    FitResult r = fit(panel, expo, spec);
    fits.push_back(fit_result_to_json(r));
    results.push_back(std::move(r));
  }
  json out;
  out["schema"] = "cohortlab/fit_group/v1";
  out["name"] = group.name;
  out["fits"] = fits;
  write_json_file(artifact_path(o, "fit_" + group.name + ".json"), out);

  // coefficient table: rows = terms x stat, columns = outcomes
  std::ofstream csv(artifact_path(o, "fit_" + group.name + ".csv"));
  csv << "term,stat";
  for (const auto& outcome : group.outcomes) csv << ',' << outcome;
  csv << '\n';
  const auto& terms = results.front().terms;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    for (const char* stat : {"coef", "se"}) {
      csv << terms[t] << ',' << stat;
      for (const auto& r : results) {
        csv << ',' << (stat[0] == 'c' ? r.coef(static_cast<int>(t)) : r.se(static_cast<int>(t)));
      }
      csv << '\n';
    }
  }
  csv << "N,count";
  for (const auto& r : results) csv << ',' << r.n_obs;
  csv << "\nclusters,count";
  for (const auto& r : results) csv << ',' << r.n_clusters;
  csv << "\nr2,value";
  for (const auto& r : results) csv << ',' << r.r2_full;
  csv << '\n';
  std::printf("fit: %zu outcomes -> fit_%s.{json,csv}\n", group.outcomes.size(),
              group.name.c_str());
}

void run_balance(const CommonOpts& o) {
  const CohortPanel panel = read_students_csv(input_path(o, "students.csv"));
  const ExposureColumns expo = compute_exposures(panel);
  SpecGroup group = !o.spec_path.empty() ? parse_spec_group(load_json_file(o.spec_path))
                                         : fit_preset("table6");
  group.base.outcome = group.outcomes.front();
  const std::vector<std::string> covariates{"ability", "hs_grade", "parent_tertiary",
                                            "parent_high_ses", "mother_working"};
  const BalanceReport rep = balance_suite(panel, expo, group.base, covariates);
  write_json_file(artifact_path(o, "balance.json"), balance_report_to_json(rep));
  std::printf("balance: %zu covariates, %zu predicted outcomes, %zu joint tests\n",
              rep.covariate_rows.size(), rep.predicted_outcome_rows.size(),
              rep.joint_tests.size());
}

void run_permute(const CommonOpts& o) {
  const CohortPanel panel = read_students_csv(input_path(o, "students.csv"));
  const PermutationSummary summary =
      randomization_inference(panel, o.draws, o.seed, o.threads);
  write_json_file(artifact_path(o, "permutation.json"), permutation_to_json(summary));
  std::printf("permute: %d draws, mean %.4f (range %.4f-%.4f), observed %.4f (pct %.3f)\n",
              summary.n_draws, summary.mean, summary.min, summary.max, summary.observed,
              summary.percentile_of_observed);
}

void run_solve(const CommonOpts& o) {
  const SearchPreset preset = resolve_search_config(o);
  const BeliefGapReport gap =
      belief_gap_experiment(preset.env, preset.beliefs_low, preset.beliefs_high);
  json out = belief_gap_to_json(gap, preset);
  out["comparative_statics"] = json{
      {"low", comparative_statics_to_json(comparative_statics(preset.env, preset.beliefs_low))},
      {"high",
       comparative_statics_to_json(comparative_statics(preset.env, preset.beliefs_high))}};
  write_json_file(artifact_path(o, "solve.json"), out);
  std::printf("solve: R_L=%.5f R_H=%.5f lambda_L=%.5f lambda_H=%.5f accept_L=%.4f accept_H=%.4f\n",
              gap.low.reservation_earnings, gap.high.reservation_earnings,
              gap.low.job_finding_rate, gap.high.job_finding_rate, gap.low.acceptance_parttime,
              gap.high.acceptance_parttime);
}

void run_sweep(const CommonOpts& o) {
  // full proposition grid; overridable through --spec
  std::vector<double> alphas, gammas, betas{0.5, 0.9, 0.99}, thetas{0.3, 0.5, 0.8};
  double b = 0.2;
  for (int i = 1; i <= 9; ++i) alphas.push_back(i / 10.0);
  gammas = alphas;
  if (!o.spec_path.empty()) {
    const json j = load_json_file(o.spec_path);
    if (j.contains("alphas")) alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("gammas")) gammas = j.at("gammas").get<std::vector<double>>();
    if (j.contains("betas")) betas = j.at("betas").get<std::vector<double>>();
    if (j.contains("thetas")) thetas = j.at("thetas").get<std::vector<double>>();
    b = j.value("b", b);
  }

  std::ofstream csv(artifact_path(o, "sweep.csv"));
  csv << "beta,theta,alpha,gamma,reservation_earnings,fd_dalpha,analytic_dalpha,fd_dgamma,"
         "analytic_dgamma,signs_ok,rel_dev\n";
  int n = 0, signs_ok = 0, within_tol = 0;
  double max_rel = 0.0;
  for (double beta : betas) {
    for (double theta : thetas) {
      SearchEnvironment env{beta, b, theta, WageDistribution::uniform(0.0, 1.0), 0.5, 0.5};
      for (double a : alphas) {
        for (double g : gammas) {
          const Beliefs bel{a, g, ""};
          const auto policy = solve_reservation_earnings(env, bel);
          const auto cs = comparative_statics(env, bel);
          const bool sign_ok = cs.fd_dalpha > 0.0 && cs.fd_dgamma < 0.0 &&
                               cs.analytic_dalpha > 0.0 && cs.analytic_dgamma < 0.0;
          const double rel = std::max(
              std::fabs(cs.fd_dalpha - cs.analytic_dalpha) /
                  std::max(1e-8, std::fabs(cs.analytic_dalpha)),
              std::fabs(cs.fd_dgamma - cs.analytic_dgamma) /
                  std::max(1e-8, std::fabs(cs.analytic_dgamma)));
          ++n;
          signs_ok += sign_ok;
          within_tol += rel <= 1e-4;
          max_rel = std::max(max_rel, rel);
          csv << beta << ',' << theta << ',' << a << ',' << g << ','
              << policy.reservation_earnings << ',' << cs.fd_dalpha << ','
              << cs.analytic_dalpha << ',' << cs.fd_dgamma << ',' << cs.analytic_dgamma << ','
              << sign_ok << ',' << rel << '\n';
        }
      }
    }
  }
  json summary;
  summary["schema"] = "cohortlab/sweep/v1";
  summary["grid_points"] = n;
  summary["signs_ok"] = signs_ok;
  summary["within_tol"] = within_tol;
  summary["all_signs_ok"] = signs_ok == n;
  summary["all_within_tol"] = within_tol == n;
  summary["max_rel_deviation"] = max_rel;
  summary["b"] = b;
  write_json_file(artifact_path(o, "sweep_summary.json"), summary);
  std::printf("sweep: %d points, signs ok %d, within 1e-4 %d, max rel dev %.3g\n", n, signs_ok,
              within_tol, max_rel);
}

void run_spells(const CommonOpts& o) {
  const SearchPreset preset = resolve_search_config(o);
  const int n_spells = o.draws;
  const auto spells = simulate_spells(preset.env, preset.beliefs_low, n_spells, o.seed);
  const double lambda = job_finding_rate(preset.env, preset.beliefs_low);

  double person_periods = 0.0;
  std::int64_t parttime = 0;
  for (const auto& s : spells) {
    person_periods += s.duration;
    parttime += s.parttime ? 1 : 0;
  }
  const double hazard = spells.size() / person_periods;
  const double se = std::sqrt(lambda * (1.0 - lambda) / person_periods);

  std::ofstream csv(artifact_path(o, "spells.csv"));
  csv << "spell,duration,accepted_type,accepted_wage,income\n";
  const std::size_t keep = std::min<std::size_t>(spells.size(), 1000);
  for (std::size_t i = 0; i < keep; ++i) {
    csv << i << ',' << spells[i].duration << ',' << (spells[i].parttime ? "parttime" : "fulltime")
        << ',' << spells[i].wage << ',' << spells[i].income << '\n';
  }
  json summary;
  summary["schema"] = "cohortlab/spells/v1";
  summary["n_spells"] = spells.size();
  summary["lambda"] = lambda;
  summary["hazard"] = hazard;
  summary["hazard_se"] = se;
  summary["mean_duration"] = person_periods / spells.size();
  summary["parttime_share"] = static_cast<double>(parttime) / spells.size();
  summary["beliefs"] = json{{"alpha", preset.beliefs_low.alpha},
                            {"gamma", preset.beliefs_low.gamma},
                            {"label", preset.beliefs_low.group_label}};
  write_json_file(artifact_path(o, "spells_summary.json"), summary);
  std::printf("spells: %zu spells, hazard %.5f vs lambda %.5f (se %.5f)\n", spells.size(),
              hazard, lambda, se);
}

void run_beliefs(const CommonOpts& o) {
  const SearchPreset preset = resolve_search_config(o);
  PseudoSurveyConfig cfg;
  if (!o.spec_path.empty()) {
    const json j = load_json_file(o.spec_path);
    if (j.contains("survey")) {
      const json& s = j.at("survey");
      cfg.n_respondents = s.value("n_respondents", cfg.n_respondents);
      cfg.n_fields = s.value("n_fields", cfg.n_fields);
      cfg.noise_pp = s.value("noise_pp", cfg.noise_pp);
    }
  }
  const PseudoSurvey survey = generate_pseudo_survey(preset.env, cfg, o.seed);
  std::ofstream csv(artifact_path(o, "beliefs_survey.csv"));
  csv << "respondent,field,alpha,gamma,acceptance_pct\n";
  for (std::size_t i = 0; i < survey.alpha.size(); ++i) {
    csv << i << ',' << survey.field[i] << ',' << survey.alpha[i] << ',' << survey.gamma[i] << ','
        << survey.acceptance_pct[i] << '\n';
  }
  json out = survey_regressions_to_json(survey_regressions(survey));
  out["elicitation_mapping"] = preset.elicitation_note;
  write_json_file(artifact_path(o, "beliefs_regressions.json"), out);
  std::printf("beliefs: %d respondents -> beliefs_survey.csv, beliefs_regressions.json\n",
              cfg.n_respondents);
}

void run_report(const CommonOpts& o) {
  const json report = build_report(o.out);
  write_json_file(artifact_path(o, "report.json"), report);
  const std::string md_path = artifact_path(o, "report.md");
  std::ofstream md(md_path);
  md << report_markdown(report);
  std::printf("report: %d/%d checks passed -> report.{json,md}\n",
              report.at("n_pass").get<int>(), report.at("n_checks").get<int>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"search-model and cross-cohort peer-effects toolkit"};
  app.require_subcommand(1);

  CommonOpts synth_o, expo_o, diag_o, fit_o, bal_o, perm_o, solve_o, sweep_o, spells_o,
      beliefs_o, report_o;

  add_common(app.add_subcommand("synth", "generate a synthetic cohort panel"), synth_o, true,
             true);
  add_common(app.add_subcommand("exposures", "compute leave-one-out exposures"), expo_o, false,
             false);
  add_common(app.add_subcommand("diagnose", "residual variation, shocks, size-trend flags"),
             diag_o, false, false);
  add_common(app.add_subcommand("fit", "fixed-effects regressions"), fit_o, false, true);
  add_common(app.add_subcommand("balance", "balancing tests and joint F-tests"), bal_o, false,
             true);
  add_common(app.add_subcommand("permute", "randomization inference"), perm_o, true, false);
  add_common(app.add_subcommand("solve", "reservation earnings and belief-gap orderings"),
             solve_o, false, true);
  add_common(app.add_subcommand("sweep", "comparative-statics grid"), sweep_o, false, true);
  add_common(app.add_subcommand("spells", "Monte Carlo search spells"), spells_o, true, true);
  add_common(app.add_subcommand("beliefs", "pseudo-survey beliefs regressions"), beliefs_o, true,
             true);
  add_common(app.add_subcommand("report", "assemble the run report"), report_o, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand("synth")) run_synth(synth_o);
    if (app.got_subcommand("exposures")) run_exposures(expo_o);
    if (app.got_subcommand("diagnose")) run_diagnose(diag_o);
    if (app.got_subcommand("fit")) run_fit(fit_o);
    if (app.got_subcommand("balance")) run_balance(bal_o);
    if (app.got_subcommand("permute")) run_permute(perm_o);
    if (app.got_subcommand("solve")) run_solve(solve_o);
    if (app.got_subcommand("sweep")) run_sweep(sweep_o);
    if (app.got_subcommand("spells")) run_spells(spells_o);
    if (app.got_subcommand("beliefs")) run_beliefs(beliefs_o);
    if (app.got_subcommand("report")) run_report(report_o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const TruncationError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const DataContractError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const GenerationError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
