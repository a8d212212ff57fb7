#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cohortlab {

struct Province {
  std::int32_t id;
  std::int32_t region;
  double flfp;  // female labor force participation, percentage points
};

// Student-level cohort panel, column oriented. Outcome columns are valid
// only where employed == 1. The mover columns are empty unless the panel
// was produced by the mover generator (or read from a file carrying them).
struct CohortPanel {
  std::vector<std::int32_t> student_id;
  std::vector<std::int32_t> degree_id;
  std::vector<std::int32_t> cohort;  // calendar year
  std::vector<std::uint8_t> female;
  std::vector<std::int32_t> province_id;
  std::vector<double> flfp_origin;
  std::vector<std::int32_t> region_study;

  // pre-determined covariates
  std::vector<double> ability;    // bachelor's final grade scale
  std::vector<double> hs_grade;
  std::vector<std::uint8_t> parent_tertiary;
  std::vector<std::uint8_t> parent_high_ses;
  std::vector<std::uint8_t> mother_working;

  // outcomes
  std::vector<std::uint8_t> employed;
  std::vector<double> log_earnings;
  std::vector<double> log_hours;
  std::vector<std::uint8_t> fulltime;
  std::vector<double> log_wage;

  // mover extension
  std::vector<std::int32_t> work_province;
  std::vector<std::int8_t> q4_flfp;  // 1 = top quartile origin, 0 = bottom, -1 = middle

  std::size_t size() const { return student_id.size(); }
  bool has_mover_columns() const { return !work_province.empty(); }

  // Throws DataContractError if column lengths disagree.
  void validate() const;
};

// Degree-cohort cells in deterministic (degree, cohort) order.
struct CellIndex {
  std::vector<std::int32_t> cell_of_row;     // row -> cell
  std::vector<std::int32_t> degree_of_cell;  // cell -> degree id
  std::vector<std::int32_t> cohort_of_cell;  // cell -> cohort
  std::vector<std::int32_t> cell_size;
  std::int32_t n_cells = 0;

  // distinct degrees/cohorts, compacted in sorted order
  std::vector<std::int32_t> degrees;  // sorted unique degree ids
  std::vector<std::int32_t> cohorts;  // sorted unique cohorts
  std::vector<std::int32_t> degree_index_of_cell;  // cell -> 0..n_degrees-1
  std::vector<std::int32_t> cohort_index_of_cell;
};

CellIndex build_cell_index(const CohortPanel& panel);

// Leave-one-out peer exposures, aligned with panel rows. Same-gender means
// exclude the student herself and are flagged missing when she is the only
// student of her gender in the cell; cross-gender means are plain cell
// means. Values carry NaN where flagged missing.
struct ExposureColumns {
  std::vector<double> loo_female_mean;
  std::vector<double> loo_male_mean;
  std::vector<std::uint8_t> loo_female_missing;
  std::vector<std::uint8_t> loo_male_missing;
  std::vector<std::int32_t> cell_n_female;  // counts of the student's cell
  std::vector<std::int32_t> cell_n_male;
  std::int64_t n_missing_same_gender = 0;
};

// Throws DataContractError if any cell lacks a woman or a man (sample rule:
// every degree-cohort cell carries at least one of each).
ExposureColumns compute_exposures(const CohortPanel& panel);

// --- file contracts ---------------------------------------------------

// students.csv: fixed column order; mover columns appended when present.
void write_students_csv(const std::string& path, const CohortPanel& panel);
CohortPanel read_students_csv(const std::string& path);

void write_provinces_csv(const std::string& path, const std::vector<Province>& provinces);
std::vector<Province> read_provinces_csv(const std::string& path);

// exposures.csv per the peer-metrics file contract.
void write_exposures_csv(const std::string& path, const CohortPanel& panel,
                         const ExposureColumns& exposures);

}  // namespace cohortlab
