#include "cohortlab/report.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "cohortlab/errors.hpp"

namespace cohortlab {

namespace {

namespace fs = std::filesystem;

// Published anchors the report compares against.
constexpr double kDeltaFpEarnings = 0.037;
constexpr double kDeltaFpHours = 0.033;
constexpr double kDeltaFpFulltime = 0.019;
constexpr double kDeltaFpWage = 0.003;
constexpr double kResidualBandLo = 1.45;
constexpr double kResidualBandHi = 1.70;
const double kQuintileAnchors[5] = {2.37, 2.01, 1.91, 1.54, 1.23};
constexpr double kQuintileTol = 0.4;
constexpr double kAcceptLowPct = 67.43;   // elicited acceptance, low-FLFP group
constexpr double kAcceptHighPct = 60.39;  // elicited acceptance, high-FLFP group

json check(const std::string& id, const std::string& what, bool pass, const json& detail) {
  return json{{"id", id}, {"check", what}, {"pass", pass}, {"detail", detail}};
}

double term_coef(const json& fit, const std::string& term) {
  for (const auto& t : fit.at("terms")) {
    if (t.at("term") == term) return t.at("coef").get<double>();
  }
  throw DataContractError("fit artifact lacks term '" + term + "'");
}

double term_se(const json& fit, const std::string& term) {
  for (const auto& t : fit.at("terms")) {
    if (t.at("term") == term) return t.at("se").get<double>();
  }
  throw DataContractError("fit artifact lacks term '" + term + "'");
}

}  // namespace

json build_report(const std::string& dir) {
  json report;
  report["schema"] = "cohortlab/report/v1";
  json checks = json::array();
  json sections = json::object();
  json missing = json::array();

  const auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
  const auto have = [&](const char* name) { return fs::exists(path(name)); };

  // --- search-model block -------------------------------------------------
  if (have("solve.json")) {
    const json solve = load_json_file(path("solve.json"));
    require_schema(solve, "belief_gap");
    sections["belief_gap"] = solve;
    const auto& ord = solve.at("orderings");
    const bool pass = ord.at("reservation_low_below_high").get<bool>() &&
                      ord.at("lambda_low_above_high").get<bool>() &&
                      ord.at("acceptance_low_above_high").get<bool>();
    checks.push_back(check(
        "belief_gap_orderings",
        "pessimistic beliefs lower R, raise the exit rate, raise part-time acceptance "
        "(ordinal counterpart of the elicited 67.43 vs 60.39)",
        pass,
        json{{"acceptance_low", solve.at("low").at("acceptance_parttime")},
             {"acceptance_high", solve.at("high").at("acceptance_parttime")},
             {"elicited_low_pct", kAcceptLowPct},
             {"elicited_high_pct", kAcceptHighPct},
             {"note", "published levels are not reproducible in the stylized model; "
                      "the comparison is ordinal only"}}));
  } else {
    missing.push_back("solve.json");
  }

  if (have("sweep_summary.json")) {
    const json sweep = load_json_file(path("sweep_summary.json"));
    require_schema(sweep, "sweep");
    sections["sweep"] = sweep;
    checks.push_back(check(
        "comparative_statics_signs",
        "dR/dalpha > 0 and dR/dgamma < 0 at every grid point, finite differences vs "
        "analytic within 1e-4 relative",
        sweep.at("all_signs_ok").get<bool>() && sweep.at("all_within_tol").get<bool>(),
        json{{"grid_points", sweep.at("grid_points")},
             {"max_rel_deviation", sweep.at("max_rel_deviation")}}));
  } else {
    missing.push_back("sweep_summary.json");
  }

  if (have("spells_summary.json")) {
    const json sp = load_json_file(path("spells_summary.json"));
    require_schema(sp, "spells");
    sections["spells"] = sp;
    checks.push_back(check("hazard_consistency",
                           "empirical exit hazard within 3 binomial SEs of the analytic rate",
                           std::fabs(sp.at("hazard").get<double>() -
                                     sp.at("lambda").get<double>()) <=
                               3.0 * sp.at("hazard_se").get<double>(),
                           json{{"hazard", sp.at("hazard")},
                                {"lambda", sp.at("lambda")},
                                {"se", sp.at("hazard_se")}}));
  } else {
    missing.push_back("spells_summary.json");
  }

  // --- pipeline block -------------------------------------------------------
  if (have("fit_table6.json")) {
    const json fits = load_json_file(path("fit_table6.json"));
    require_schema(fits, "fit_group");
    sections["fit_table6"] = fits;
    json detail = json::object();
    bool pass = true;
    const json& cols = fits.at("fits");
    const double anchors[4] = {kDeltaFpEarnings, kDeltaFpHours, kDeltaFpFulltime, kDeltaFpWage};
    const char* outcomes[4] = {"log_earnings", "log_hours", "fulltime", "log_wage"};
    for (const auto& f : cols) {
      const std::string outcome = f.at("outcome");
      for (int k = 0; k < 4; ++k) {
        if (outcome != outcomes[k]) continue;
        const double coef = term_coef(f, "loo_female_mean");
        const double se = term_se(f, "loo_female_mean");
        const double mcoef = term_coef(f, "loo_male_mean");
        const double mse = term_se(f, "loo_male_mean");
        // the headline recovery check binds on earnings; the remaining
        // columns are reported for the pattern comparison
        if (outcome == "log_earnings") {
          pass = pass && std::fabs(coef - kDeltaFpEarnings) <= 2.0 * se &&
                 std::fabs(mcoef) <= 2.0 * mse;
        }
        detail[outcome] = json{{"delta_fp", coef},      {"se_fp", se},
                               {"delta_mp", mcoef},     {"se_mp", mse},
                               {"anchor_fp", anchors[k]}, {"anchor_mp", 0.0}};
      }
    }
    checks.push_back(check("estimator_recovery",
                           "female-peer effect on earnings within 2 cluster-robust SEs of "
                           "0.037 and male-peer effect within 2 SEs of 0",
                           pass, detail));
  } else {
    missing.push_back("fit_table6.json");
  }

  if (have("permutation.json")) {
    const json perm = load_json_file(path("permutation.json"));
    require_schema(perm, "permutation");
    json slim = perm;
    slim.erase("draws");
    sections["permutation"] = slim;
    const double mean = perm.at("mean").get<double>();
    checks.push_back(
        check("randomization_band",
              "mean permuted residual SD in [1.45, 1.70] (published 1.57, range 1.53-1.62)",
              mean >= kResidualBandLo && mean <= kResidualBandHi,
              json{{"mean", mean},
                   {"min", perm.at("min")},
                   {"max", perm.at("max")},
                   {"observed", perm.at("observed")},
                   {"observed_percentile", perm.at("percentile_of_observed")}}));
  } else {
    missing.push_back("permutation.json");
  }

  // the quintile anchors describe random-assignment fluctuations; the check
  // binds only when the panel's truth file says the regime was random
  bool regime_random = true;
  if (have("truth.json")) {
    const json truth = load_json_file(path("truth.json"));
    require_schema(truth, "truth");
    sections["truth"] = truth;
    regime_random = truth.at("dgp").at("regime") == "random";
  }

  if (have("residual_variation.json")) {
    const json diag = load_json_file(path("residual_variation.json"));
    require_schema(diag, "diagnostics");
    sections["residual_variation"] = diag;
    if (regime_random && diag.at("residual_variation").contains("flfp_all_peers")) {
      const json& all = diag.at("residual_variation").at("flfp_all_peers");
      const json& rows = all.at("by_size_quintile");
      bool decreasing = rows.size() == 5;
      bool within = rows.size() == 5;
      double prev = 1e300;
      json qdetail = json::array();
      for (std::size_t q = 0; q < rows.size() && q < 5; ++q) {
        const double sd = rows[q].at("residual_sd").get<double>();
        decreasing = decreasing && sd < prev;
        within = within && std::fabs(sd - kQuintileAnchors[q]) <= kQuintileTol;
        prev = sd;
        qdetail.push_back(json{{"quintile", q + 1},
                               {"residual_sd", sd},
                               {"anchor", kQuintileAnchors[q]}});
      }
      checks.push_back(check("variance_shrinkage",
                             "residual SD decreases strictly across size quintiles and sits "
                             "within 0.4 of the published 2.37 -> 1.23 profile",
                             decreasing && within, qdetail));
    }
  } else {
    missing.push_back("residual_variation.json");
  }

  if (have("beliefs_regressions.json")) {
    const json srv = load_json_file(path("beliefs_regressions.json"));
    require_schema(srv, "survey_regressions");
    sections["beliefs_regressions"] = srv;
    const double g_slope = term_coef(srv.at("acceptance_on_gamma"), "gamma_pct");
    const double a_slope = term_coef(srv.at("acceptance_on_alpha"), "alpha_pct");
    checks.push_back(check(
        "survey_sign_pattern",
        "part-time acceptance rises with gamma beliefs and falls with alpha beliefs "
        "(sign pattern of the published 0.327 / -0.148; magnitudes are not targets)",
        g_slope > 0.0 && a_slope < 0.0,
        json{{"gamma_slope", g_slope}, {"alpha_slope", a_slope}}));
  } else {
    missing.push_back("beliefs_regressions.json");
  }

  if (have("balance.json")) {
    const json bal = load_json_file(path("balance.json"));
    require_schema(bal, "balance");
    sections["balance"] = bal;
  }
  if (have("flags.json")) {
    const json flags = load_json_file(path("flags.json"));
    require_schema(flags, "flags");
    sections["flags"] = flags;
  }

  int n_pass = 0;
  for (const auto& c : checks) n_pass += c.at("pass").get<bool>() ? 1 : 0;
  report["checks"] = checks;
  report["n_checks"] = checks.size();
  report["n_pass"] = n_pass;
  report["all_pass"] = n_pass == static_cast<int>(checks.size());
  report["sections"] = sections;
  report["artifacts_missing"] = missing;
  return report;
}

std::string report_markdown(const json& report) {
  std::ostringstream md;
  md << "# cohortlab run report\n\n";
  md << "Checks passed: " << report.at("n_pass").get<int>() << " / "
     << report.at("n_checks").get<int>() << "\n\n";
  md << "| check | verdict |\n|---|---|\n";
  for (const auto& c : report.at("checks")) {
    md << "| " << c.at("check").get<std::string>() << " | "
       << (c.at("pass").get<bool>() ? "pass" : "FAIL") << " |\n";
  }
  md << "\n";

  const json& sections = report.at("sections");
  if (sections.contains("belief_gap")) {
    const json& s = sections.at("belief_gap");
    md << "## Belief gap (elicited-beliefs calibration)\n\n";
    md << "Mapping of elicited beliefs to per-period rates: `"
       << s.at("elicitation_mapping").get<std::string>() << "`\n\n";
    md << "| group | alpha | gamma | R | P(accept part-time) | job-finding rate |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const char* g : {"low", "high"}) {
      const json& row = s.at(g);
      md << "| " << g << " | " << row.at("alpha").get<double>() << " | "
         << row.at("gamma").get<double>() << " | "
         << row.at("reservation_earnings").get<double>() << " | "
         << row.at("acceptance_parttime").get<double>() << " | "
         << row.at("job_finding_rate").get<double>() << " |\n";
    }
    md << "\nPublished elicited acceptance: " << kAcceptLowPct << " (low) vs " << kAcceptHighPct
       << " (high); the model is compared on ordering only.\n\n";
  }

  if (sections.contains("fit_table6")) {
    md << "## Peer-effects estimates (treatments x outcomes)\n\n";
    md << "| term | log_earnings | log_hours | fulltime | log_wage |\n|---|---|---|---|---|\n";
    const json& fits = sections.at("fit_table6").at("fits");
    for (const std::string term : {"loo_female_mean", "loo_male_mean", "flfp_origin"}) {
      md << "| " << term << " |";
      for (const char* outcome : {"log_earnings", "log_hours", "fulltime", "log_wage"}) {
        bool found = false;
        for (const auto& f : fits) {
          if (f.at("outcome") != outcome) continue;
          for (const auto& t : f.at("terms")) {
            if (t.at("term") == term) {
              char buf[64];
              std::snprintf(buf, sizeof(buf), " %.4f (%.4f) |", t.at("coef").get<double>(),
                            t.at("se").get<double>());
              md << buf;
              found = true;
            }
          }
        }
        if (!found) md << " - |";
      }
      md << "\n";
    }
    md << "\nPublished pattern: 0.037 (0.013), 0.033 (0.012), 0.019 (0.009), 0.003 (0.012) "
          "for female peers; male-peer effects indistinguishable from zero.\n\n";
  }

  if (sections.contains("permutation")) {
    const json& s = sections.at("permutation");
    md << "## Randomization inference\n\n";
    md << "Permutation mean " << s.at("mean").get<double>() << " (band " << kResidualBandLo
       << "-" << kResidualBandHi << "), range [" << s.at("min").get<double>() << ", "
       << s.at("max").get<double>() << "], observed " << s.at("observed").get<double>()
       << " at percentile " << s.at("percentile_of_observed").get<double>() << ".\n\n";
  }

  if (sections.contains("residual_variation")) {
    const json& rv = sections.at("residual_variation").at("residual_variation");
    md << "## Raw and residual variation of peer composition\n\n";
    md << "| characteristic | raw SD | residual SD | residual SD (size-weighted) |\n";
    md << "|---|---|---|---|\n";
    for (const auto& [name, block] : rv.items()) {
      md << "| " << name << " | " << block.at("raw_sd").get<double>() << " | "
         << block.at("residual_sd").get<double>() << " | "
         << block.at("residual_sd_weighted").get<double>() << " |\n";
    }
    md << "\n";
    if (rv.contains("flfp_all_peers")) {
      md << "Residual SD by degree-size quintile (published profile 2.37, 2.01, 1.91, 1.54, "
            "1.23):\n\n| quintile | residual SD |\n|---|---|\n";
      for (const auto& q : rv.at("flfp_all_peers").at("by_size_quintile")) {
        md << "| " << q.at("quintile").get<int>() << " | " << q.at("residual_sd").get<double>()
           << " |\n";
      }
      md << "\n";
    }
  }

  if (sections.contains("balance")) {
    const json& b = sections.at("balance");
    md << "## Balancing tests\n\n| dependent | coef on female-peer exposure | t |\n|---|---|---|\n";
    for (const char* key : {"covariates", "predicted_outcomes"}) {
      for (const auto& row : b.at(key)) {
        const json& t0 = row.at("terms").at(0);
        md << "| " << row.at("outcome").get<std::string>() << " | "
           << t0.at("coef").get<double>() << " | " << t0.at("t").get<double>() << " |\n";
      }
    }
    md << "\n| treatment | classical F p | cluster-robust F p |\n|---|---|---|\n";
    for (const auto& jt : b.at("joint_f_tests")) {
      md << "| " << jt.at("treatment").get<std::string>() << " | "
         << jt.at("p_classical").get<double>() << " | " << jt.at("p_cluster").get<double>()
         << " |\n";
    }
    md << "\nPublished joint F-test p-values for the two treatments: 0.381 and 0.221.\n\n";
  }

  if (!report.at("artifacts_missing").empty()) {
    md << "## Not computed\n\n";
    for (const auto& m : report.at("artifacts_missing")) {
      md << "- " << m.get<std::string>() << "\n";
    }
  }
  return md.str();
}

}  // namespace cohortlab
