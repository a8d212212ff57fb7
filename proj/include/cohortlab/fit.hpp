#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cohortlab/panel.hpp"

namespace cohortlab {

// Sample restriction applied before estimation. Rows with missing values
// in any used column are always dropped (counted in the result).
struct SampleFilter {
  std::optional<bool> female;          // restrict to one gender
  bool employed_only = true;
  bool q4_sample = false;              // keep only top/bottom origin-FLFP quartiles
  std::vector<std::int32_t> exclude_degrees;
};

struct Specification {
  std::string name;
  std::string outcome;
  std::vector<std::string> treatments;
  std::vector<std::string> controls;
  // absorbed dimensions: degree, cohort, province_origin, province_job
  std::vector<std::string> fixed_effects{"degree", "cohort"};
  enum class Trend { none, degree_linear, region_linear };
  Trend trend = Trend::none;
  std::string cluster = "degree";      // empty: heteroskedasticity-robust
  bool standardize_treatments = true;  // on the estimation sample
  SampleFilter filter;

  // tighter than the 1e-8 the coefficient-equality contract needs, so the
  // dummy-variable equivalence holds with margin
  double demean_tol = 1e-10;
  int demean_max_sweeps = 10000;
};

struct FitResult {
  std::string name;
  std::string outcome;
  std::vector<std::string> terms;  // treatments then controls
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  Eigen::MatrixXd vcov;

  double r2_full = 0.0;    // includes variance soaked up by the absorbed effects
  double r2_within = 0.0;
  std::int64_t n_obs = 0;
  int n_clusters = 0;
  int demean_sweeps = 0;
  bool demean_converged = false;
  std::int64_t singleton_rows_dropped = 0;
  std::int64_t missing_rows_dropped = 0;
  std::int64_t absorbed_dof = 0;  // intercepts and trend slopes soaked up
  double cr1_factor = 1.0;
  std::vector<double> treatment_mean, treatment_sd;  // standardization constants
  std::vector<std::string> warnings;

  double tstat(int j) const { return coef(j) / se(j); }
};

// Extra named columns (panel-length) visible to specifications, e.g.
// predicted outcomes in the balancing suite.
using ExtraColumns = std::map<std::string, const std::vector<double>*>;

// High-dimensional fixed-effects least squares: treatments and controls
// demeaned by alternating projections over the absorbed dimensions
// (Frisch-Waugh equivalent to explicit dummies), cluster-robust CR1
// sandwich covariance. Throws on rank deficiency (naming the offending
// column), demeaning non-convergence, or an empty estimation sample.
FitResult fit(const CohortPanel& panel, const ExposureColumns& exposures,
              const Specification& spec, const ExtraColumns& extra = {});

// Gender-gap preset: each outcome regressed on a female dummy (raw units)
// with degree and cohort effects, optional GPA (ability) control, degree
// clustering, employed sample.
std::map<std::string, FitResult> gender_gap(const CohortPanel& panel,
                                            const ExposureColumns& exposures,
                                            bool control_gpa = true);

// Small-sample OLS with an intercept and HC1 robust standard errors;
// optional group fixed effects enter as explicit dummies. Used for the
// survey-style beliefs regressions.
FitResult simple_ols(const std::vector<double>& y, const std::vector<std::string>& x_names,
                     const std::vector<const std::vector<double>*>& x,
                     const std::vector<std::int32_t>* group_fe = nullptr);

}  // namespace cohortlab
