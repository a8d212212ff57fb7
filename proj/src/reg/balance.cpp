#include "cohortlab/balance.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "cohortlab/errors.hpp"
#include "cohortlab/stats.hpp"

namespace cohortlab {

namespace {

// Plain OLS of an outcome on the covariates (with intercept) over employed
// rows of the filtered sample; returns predictions for every panel row that
// has complete covariates (NaN elsewhere).
std::vector<double> predict_outcome(const CohortPanel& panel, const std::string& outcome,
                                    const std::vector<std::string>& covariates,
                                    const SampleFilter& filter) {
  const std::size_t n = panel.size();
  const auto col = [&](const std::string& name) -> std::vector<double> {
    if (name == "ability") return panel.ability;
    if (name == "hs_grade") return panel.hs_grade;
    std::vector<double> out(n);
    if (name == "parent_tertiary") {
      for (std::size_t i = 0; i < n; ++i) out[i] = panel.parent_tertiary[i];
    } else if (name == "parent_high_ses") {
      for (std::size_t i = 0; i < n; ++i) out[i] = panel.parent_high_ses[i];
    } else if (name == "mother_working") {
      for (std::size_t i = 0; i < n; ++i) out[i] = panel.mother_working[i];
    } else {
      throw DataContractError("unknown pre-determined covariate: '" + name + "'");
    }
    return out;
  };
  const auto ycol = [&]() -> std::vector<double> {
    if (outcome == "log_earnings") return panel.log_earnings;
    if (outcome == "log_hours") return panel.log_hours;
    if (outcome == "log_wage") return panel.log_wage;
    if (outcome == "fulltime") {
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = panel.fulltime[i];
      return out;
    }
    throw DataContractError("unknown outcome for prediction: '" + outcome + "'");
  }();

  std::vector<std::vector<double>> xcols;
  for (const auto& c : covariates) xcols.push_back(col(c));
  const int k = static_cast<int>(covariates.size()) + 1;

  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < n; ++i) {
    if (!panel.employed[i]) continue;
    if (filter.female.has_value() && panel.female[i] != *filter.female) continue;
    if (!std::isfinite(ycol[i])) continue;
    train.push_back(i);
  }
  if (train.size() < static_cast<std::size_t>(k) + 2) {
    throw DataContractError("too few employed rows to fit the prediction model");
  }
  Eigen::MatrixXd x(train.size(), k);
  Eigen::VectorXd y(train.size());
  for (std::size_t r = 0; r < train.size(); ++r) {
    for (int j = 0; j < k - 1; ++j) x(r, j) = xcols[j][train[r]];
    x(r, k - 1) = 1.0;
    y(r) = ycol[train[r]];
  }
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);

  std::vector<double> pred(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    double v = beta(k - 1);
    for (int j = 0; j < k - 1; ++j) v += beta(j) * xcols[j][i];
    pred[i] = v;
  }
  return pred;
}

}  // namespace

BalanceReport balance_suite(const CohortPanel& panel, const ExposureColumns& exposures,
                            const Specification& base,
                            const std::vector<std::string>& covariates,
                            const std::vector<std::string>& outcomes) {
  if (covariates.empty()) throw DomainError("balance suite needs covariates");
  BalanceReport report;

  // (i) each covariate on the treatments: the pre-determined sample keeps
  // non-employed students too
  for (const auto& cov : covariates) {
    Specification spec = base;
    spec.name = "balance_" + cov;
    spec.outcome = cov;
    spec.controls.clear();
    spec.filter.employed_only = false;
    report.covariate_rows.push_back(fit(panel, exposures, spec));
  }

  // (ii) predicted outcomes on the treatments
  for (const auto& outcome : outcomes) {
    const auto pred = predict_outcome(panel, outcome, covariates, base.filter);
    ExtraColumns extra;
    const std::string pname = "predicted_" + outcome;
    extra.emplace(pname, &pred);
    Specification spec = base;
    spec.name = "balance_" + pname;
    spec.outcome = pname;
    spec.controls.clear();
    spec.filter.employed_only = false;
    report.predicted_outcome_rows.push_back(fit(panel, exposures, spec, extra));
  }

  // (iii) all covariates jointly predicting each treatment within the FEs
  for (const auto& treatment : base.treatments) {
    Specification spec = base;
    spec.name = "joint_F_" + treatment;
    spec.outcome = treatment;
    spec.treatments = covariates;
    spec.controls.clear();
    spec.standardize_treatments = false;
    spec.filter.employed_only = false;
    const FitResult f = fit(panel, exposures, spec);

    JointFTest jt;
    jt.treatment = treatment;
    const double q = static_cast<double>(covariates.size());
    const double dof2 =
        static_cast<double>(f.n_obs) - q - static_cast<double>(f.absorbed_dof);
    jt.dof1 = q;
    jt.dof2 = dof2;
    const double r2w = f.r2_within;
    jt.f_classical = (r2w / q) / ((1.0 - r2w) / dof2);
    jt.p_classical = f_pvalue(jt.f_classical, q, dof2);

    const Eigen::VectorXd b = f.coef;
    const Eigen::MatrixXd v = f.vcov;
    const double wald = b.transpose() * v.ldlt().solve(b);
    jt.f_cluster = wald / q;
    jt.dof2_cluster = static_cast<double>(f.n_clusters) - 1.0;
    jt.p_cluster = f_pvalue(jt.f_cluster, q, jt.dof2_cluster);
    report.joint_tests.push_back(jt);
  }
  return report;
}

}  // namespace cohortlab
