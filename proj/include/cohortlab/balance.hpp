#pragma once

#include <string>
#include <vector>

#include "cohortlab/fit.hpp"

namespace cohortlab {

struct JointFTest {
  std::string treatment;
  // classical F of all covariates in the within regression of the treatment
  double f_classical = 0.0;
  double p_classical = 1.0;
  double dof1 = 0.0, dof2 = 0.0;
  // cluster-robust Wald version, referred to an F(q, G-1)
  double f_cluster = 0.0;
  double p_cluster = 1.0;
  double dof2_cluster = 0.0;
};

struct BalanceReport {
  // each pre-determined covariate regressed on the treatments within the FEs
  std::vector<FitResult> covariate_rows;
  // outcomes predicted from all covariates, then regressed on the treatments
  std::vector<FitResult> predicted_outcome_rows;
  // all covariates jointly predicting each treatment within the FEs;
  // reported in both conventions because the degrees-of-freedom choice is
  // not pinned down by the published numbers
  std::vector<JointFTest> joint_tests;
};

// The base specification supplies treatments, controls kept alongside them,
// fixed effects, clustering, and the sample filter (its employed_only flag
// is ignored where the design calls for the full pre-determined sample).
BalanceReport balance_suite(const CohortPanel& panel, const ExposureColumns& exposures,
                            const Specification& base,
                            const std::vector<std::string>& covariates,
                            const std::vector<std::string>& outcomes = {
                                "log_earnings", "log_hours", "fulltime", "log_wage"});

}  // namespace cohortlab
