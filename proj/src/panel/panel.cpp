#include "cohortlab/panel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cohortlab/errors.hpp"

namespace cohortlab {

void CohortPanel::validate() const {
  const std::size_t n = student_id.size();
  const auto want = [&](std::size_t got, const char* name) {
    if (got != n) {
      throw DataContractError(std::string("panel column '") + name +
                              "' length mismatch: " + std::to_string(got) + " vs " +
                              std::to_string(n));
    }
  };
  want(degree_id.size(), "degree_id");
  want(cohort.size(), "cohort");
  want(female.size(), "gender");
  want(province_id.size(), "province_id");
  want(flfp_origin.size(), "flfp_origin");
  want(region_study.size(), "region_study");
  want(ability.size(), "ability");
  want(hs_grade.size(), "hs_grade");
  want(parent_tertiary.size(), "parent_tertiary");
  want(parent_high_ses.size(), "parent_high_ses");
  want(mother_working.size(), "mother_working");
  want(employed.size(), "employed");
  want(log_earnings.size(), "log_earnings");
  want(log_hours.size(), "log_hours");
  want(fulltime.size(), "fulltime");
  want(log_wage.size(), "log_wage");
  if (has_mover_columns()) {
    want(work_province.size(), "work_province_id");
    want(q4_flfp.size(), "q4_flfp");
  }
}

CellIndex build_cell_index(const CohortPanel& panel) {
  panel.validate();
  const std::size_t n = panel.size();
  if (n == 0) throw DataContractError("empty panel");

  std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> key_to_cell;
  for (std::size_t i = 0; i < n; ++i) {
    key_to_cell.emplace(std::make_pair(panel.degree_id[i], panel.cohort[i]), 0);
  }
  CellIndex idx;
  idx.n_cells = static_cast<std::int32_t>(key_to_cell.size());
  idx.degree_of_cell.reserve(key_to_cell.size());
  idx.cohort_of_cell.reserve(key_to_cell.size());
  std::int32_t next = 0;
  for (auto& [key, cell] : key_to_cell) {
    cell = next++;
    idx.degree_of_cell.push_back(key.first);
    idx.cohort_of_cell.push_back(key.second);
  }
  idx.cell_of_row.resize(n);
  idx.cell_size.assign(idx.n_cells, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cell = key_to_cell.at({panel.degree_id[i], panel.cohort[i]});
    idx.cell_of_row[i] = cell;
    ++idx.cell_size[cell];
  }

  idx.degrees = idx.degree_of_cell;
  std::sort(idx.degrees.begin(), idx.degrees.end());
  idx.degrees.erase(std::unique(idx.degrees.begin(), idx.degrees.end()), idx.degrees.end());
  idx.cohorts = idx.cohort_of_cell;
  std::sort(idx.cohorts.begin(), idx.cohorts.end());
  idx.cohorts.erase(std::unique(idx.cohorts.begin(), idx.cohorts.end()), idx.cohorts.end());

  idx.degree_index_of_cell.resize(idx.n_cells);
  idx.cohort_index_of_cell.resize(idx.n_cells);
  for (std::int32_t c = 0; c < idx.n_cells; ++c) {
    idx.degree_index_of_cell[c] = static_cast<std::int32_t>(
        std::lower_bound(idx.degrees.begin(), idx.degrees.end(), idx.degree_of_cell[c]) -
        idx.degrees.begin());
    idx.cohort_index_of_cell[c] = static_cast<std::int32_t>(
        std::lower_bound(idx.cohorts.begin(), idx.cohorts.end(), idx.cohort_of_cell[c]) -
        idx.cohorts.begin());
  }
  return idx;
}

ExposureColumns compute_exposures(const CohortPanel& panel) {
  const CellIndex idx = build_cell_index(panel);
  const std::size_t n = panel.size();

  std::vector<double> female_sum(idx.n_cells, 0.0), male_sum(idx.n_cells, 0.0);
  std::vector<std::int32_t> female_n(idx.n_cells, 0), male_n(idx.n_cells, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cell = idx.cell_of_row[i];
    if (panel.female[i]) {
      female_sum[cell] += panel.flfp_origin[i];
      ++female_n[cell];
    } else {
      male_sum[cell] += panel.flfp_origin[i];
      ++male_n[cell];
    }
  }
  for (std::int32_t c = 0; c < idx.n_cells; ++c) {
    if (female_n[c] == 0 || male_n[c] == 0) {
      throw DataContractError(
          "degree " + std::to_string(idx.degree_of_cell[c]) + " cohort " +
          std::to_string(idx.cohort_of_cell[c]) +
          " violates the one-man/one-woman sample rule");
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  ExposureColumns out;
  out.loo_female_mean.resize(n);
  out.loo_male_mean.resize(n);
  out.loo_female_missing.assign(n, 0);
  out.loo_male_missing.assign(n, 0);
  out.cell_n_female.resize(n);
  out.cell_n_male.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto cell = idx.cell_of_row[i];
    const std::int32_t nf = female_n[cell];
    const std::int32_t nm = male_n[cell];
    out.cell_n_female[i] = nf;
    out.cell_n_male[i] = nm;
    if (panel.female[i]) {
      if (nf == 1) {
        out.loo_female_mean[i] = nan;
        out.loo_female_missing[i] = 1;
        ++out.n_missing_same_gender;
      } else {
        out.loo_female_mean[i] = (female_sum[cell] - panel.flfp_origin[i]) / (nf - 1);
      }
      out.loo_male_mean[i] = male_sum[cell] / nm;
    } else {
      if (nm == 1) {
        out.loo_male_mean[i] = nan;
        out.loo_male_missing[i] = 1;
        ++out.n_missing_same_gender;
      } else {
        out.loo_male_mean[i] = (male_sum[cell] - panel.flfp_origin[i]) / (nm - 1);
      }
      out.loo_female_mean[i] = female_sum[cell] / nf;
    }
  }
  return out;
}

}  // namespace cohortlab
