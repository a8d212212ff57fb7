// Long-running inference calibration: over 500 replications of a null-free
// panel, the 95% cluster-robust confidence interval for the female-peer
// effect must cover the planted value in 95% +- 2pp of runs.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cohortlab/fit.hpp"
#include "cohortlab/synth.hpp"

using namespace cohortlab;

TEST_CASE("cluster-robust confidence intervals attain nominal coverage") {
  PanelCalibration cal;
  cal.n_degrees = 100;
  DgpSpec dgp;
  dgp.regime = DgpSpec::Regime::random;

  const double planted = dgp.delta_fp_earnings;
  int covered = 0;
  const int reps = 500;
  for (int rep = 0; rep < reps; ++rep) {
    const auto gen = generate_panel(dgp, cal, 77000 + rep);
    Specification spec;
    spec.outcome = "log_earnings";
    spec.treatments = {"loo_female_mean", "loo_male_mean"};
    spec.controls = {"flfp_origin"};
    spec.fixed_effects = {"degree", "cohort"};
    spec.cluster = "degree";
    spec.filter.female = true;
    const FitResult res = fit(gen.panel, gen.exposures, spec);
    if (std::fabs(res.coef(0) - planted) <= 1.96 * res.se(0)) ++covered;
  }
  const double coverage = static_cast<double>(covered) / reps;
  MESSAGE("coverage ", coverage, " over ", reps, " replications");
  CHECK(coverage >= 0.93);
  CHECK(coverage <= 0.97);
}
