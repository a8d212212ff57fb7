#pragma once

#include <cstdint>
#include <vector>

#include "cohortlab/panel.hpp"

namespace cohortlab {

// Marginal moments and sizes the generator targets. Defaults reproduce the
// published sample: 103 provinces whose FLFP averages 49.7 (SD 11.2,
// range [27.3, 66.7]), 1,572 degrees observed over the 2012-2016 cohorts,
// cohort sizes with median 34 / mean about 46.5 on [4, 410].
struct PanelCalibration {
  int n_provinces = 103;
  int n_regions = 20;
  double flfp_mean = 49.7;
  double flfp_sd = 11.2;
  double flfp_min = 27.3;
  double flfp_max = 66.7;

  int n_degrees = 1572;
  int n_cohorts = 5;
  int first_cohort = 2012;

  // Degree base size = size_shift + lognormal, clamped to [size_min, size_max].
  // The shift keeps the small-degree tail in line with the published
  // quintile-1 boundary (about 21 students) while preserving the median
  // and mean; a plain lognormal with this median/mean puts far too much
  // mass below 18 students.
  double size_shift = 8.0;
  double size_median = 34.0;
  double size_mean = 42.0;
  double size_min = 4.0;
  double size_max = 410.0;
  // Per-cohort size noise around the degree base: sd = max(1.5, cv * base).
  double cohort_size_cv = 0.06;

  double female_share = 0.578;
};

// Per-outcome-channel error components (log points; fulltime on the
// probability scale).
struct OutcomeChannel {
  double degree_fe_sd;
  double cohort_fe_sd;
  double cell_shock_sd;
  double noise_sd;
};

// Data-generating process with known coefficients, used to validate the
// estimator stack. Peer and own-origin coefficients are in standardized-
// exposure units (the estimation convention); gender gaps are raw.
struct DgpSpec {
  enum class Regime { random, sorted };

  Regime regime = Regime::random;
  // sorted regime: probability a student is drawn from the degree's home
  // region rather than the national pool
  double sorting_intensity = 0.75;
  // probability a degree re-rolls its home region each cohort (stresses the
  // randomization-inference band)
  double cohort_drift = 0.0;

  bool confounded = false;
  // shift of ability (in ability SDs) per SD of the cell's female-peer FLFP
  double confound_loading = 0.0;

  // planted peer effects: totals on each outcome, standardized units
  double delta_fp_earnings = 0.037;
  double delta_fp_hours = 0.033;
  double delta_fp_fulltime = 0.019;
  double delta_mp_earnings = 0.0;
  double delta_mp_hours = 0.0;
  double delta_mp_fulltime = 0.0;
  // own-origin culture coefficients, standardized units
  double own_earnings = 0.02;
  double own_hours = 0.015;
  double own_fulltime = 0.01;

  // planted gender gaps (totals)
  double female_gap_earnings = -0.113;
  double female_gap_hours = -0.083;
  double female_gap_fulltime = -0.051;
  // mediation path: log-hours penalty of a part-time job
  double hours_on_fulltime = 0.598;

  double fulltime_base = 0.82;     // male baseline probability
  double employment_rate = 0.5;    // outcome-observed share, drawn independently

  // mover DGP: full-time premium for top-quartile-origin women (Eq. 1 target)
  double q4_fulltime_effect = 0.0;
  double stay_home_prob = 0.55;    // work province equals origin with this probability

  OutcomeChannel wage{0.20, 0.02, 0.020, 0.25};
  OutcomeChannel hours{0.12, 0.02, 0.015, 0.18};
  OutcomeChannel fulltime{0.05, 0.01, 0.010, 0.0};

  // covariate loadings into outcomes (per SD of ability etc.)
  double ability_on_wage = 0.05;
  double ability_on_hours = 0.02;
  double ability_on_fulltime = 0.02;
  double parent_tertiary_on_wage = 0.02;
};

struct PanelGeneration {
  CohortPanel panel;
  std::vector<Province> provinces;
  ExposureColumns exposures;      // as used for planting
  std::int64_t gender_redraws = 0;  // cells redrawn for the one-man/one-woman rule
  // standardization constants used when planting (population convention)
  double exposure_female_mean = 0.0, exposure_female_sd = 1.0;
  double exposure_male_mean = 0.0, exposure_male_sd = 1.0;
  double own_flfp_mean = 0.0, own_flfp_sd = 1.0;
};

// Deterministic given (spec, calibration, seed). Throws GenerationError if
// the size/gender constraints cannot be satisfied.
PanelGeneration generate_panel(const DgpSpec& spec, const PanelCalibration& calibration,
                               std::uint64_t seed);

// Same pipeline plus work-province labels and the Q4-vs-Q1 origin
// indicator, so the epidemiological regression is runnable.
PanelGeneration generate_mover_sample(const DgpSpec& spec, const PanelCalibration& calibration,
                                      std::uint64_t seed);

// Quartile of each province by FLFP rank: province with rank r of P (1-based,
// ascending FLFP, ties by id) lands in quartile ceil(4r/P). Returns values
// 1..4 indexed by position in `provinces`.
std::vector<int> province_flfp_quartiles(const std::vector<Province>& provinces);

}  // namespace cohortlab
