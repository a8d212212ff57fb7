#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cohortlab/panel.hpp"

namespace cohortlab {

// Degree-cohort characteristics whose cross-cohort variation the validity
// checks track.
enum class CellCharacteristic {
  flfp_all_peers,     // mean origin FLFP over every student in the cell
  flfp_female_peers,  // mean over female students
  flfp_male_peers,    // mean over male students
  mean_ability,
  sd_ability,
  cell_size,
};

CellCharacteristic parse_characteristic(const std::string& name);
std::string characteristic_name(CellCharacteristic c);

// One row per degree-cohort cell, in (degree, cohort) order.
struct CellTable {
  std::vector<std::int32_t> degree;
  std::vector<std::int32_t> cohort;
  std::vector<double> value;
  std::vector<double> size;  // students in the cell
  std::size_t n() const { return value.size(); }
};

CellTable build_cell_table(const CohortPanel& panel, CellCharacteristic characteristic);

struct ResidualVariationReport {
  std::string characteristic;
  int n_cells = 0;
  int n_degrees = 0;
  int n_degrees_dropped = 0;  // fewer than 2 cohorts observed

  double raw_mean = 0, raw_sd = 0, raw_min = 0, raw_max = 0;
  // two-way (degree, cohort) demeaning at the cell level
  double residual_sd = 0, residual_min = 0, residual_max = 0;
  // same residualization weighted by cell size; equals the student-level
  // residual SD of the cell value and is the statistic the permutation
  // band targets
  double residual_sd_weighted = 0;

  struct QuintileRow {
    int quintile = 0;          // 1 (smallest degrees) .. 5
    double avg_size_min = 0, avg_size_max = 0;
    int n_cells = 0;
    double raw_sd = 0;
    double residual_sd = 0;
  };
  std::vector<QuintileRow> by_size_quintile;

  struct HistogramBin {
    double lo = 0, hi = 0;
    std::int64_t count = 0;
  };
  double histogram_bin_width = 0.75;
  std::vector<HistogramBin> residual_histogram;

  int demean_sweeps = 0;
};

// Raw and residual variation of a cell characteristic (degree and cohort
// effects removed), with the size-quintile breakdown and the residual
// histogram binned at width 0.75.
ResidualVariationReport residual_variation(const CohortPanel& panel,
                                           CellCharacteristic characteristic);

struct ShockStatistic {
  std::int32_t degree_id = 0;
  std::string characteristic;
  double z = 0.0;           // mean |two-way-demeaned residual| across the degree's cohorts
  double relative_z = 0.0;  // z divided by the degree's cross-year mean level
  bool relative_defined = true;
  int t_max = 0;            // cohorts observed
};

// Cross-cohort shock severity per degree. Degrees observed in fewer than 2
// cohorts are excluded (their residuals are identically zero).
std::vector<ShockStatistic> shock_statistics(const CohortPanel& panel,
                                             CellCharacteristic characteristic);

// Keeps the ceil(fraction * D) degrees with the smallest relative shock;
// ties broken by degree id. fraction in (0, 1].
std::vector<std::int32_t> filter_degrees_by_shock(std::vector<ShockStatistic> stats,
                                                  double fraction);

struct TrendFlagReport {
  std::vector<std::int32_t> flagged;  // degrees whose size trends at p <= threshold
  int n_tested = 0;
  int n_skipped = 0;  // fewer than 3 cohorts
  double p_threshold = 0.10;
};

// Per-degree OLS of cell size on an intercept and linear time; flags the
// degree when the slope's p-value does not exceed the threshold.
TrendFlagReport flag_size_trends(const CohortPanel& panel, double p_threshold = 0.10);

}  // namespace cohortlab
