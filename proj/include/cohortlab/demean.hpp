#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cohortlab {

// One absorbed dimension: either group intercepts (fixed effects) or
// group-specific linear slopes on a supplied variable (trend terms).
// Slope variables are centered within group on construction so the slope
// projector leaves group means untouched.
struct FeDimension {
  enum class Kind { intercept, slope };

  std::string name;
  Kind kind = Kind::intercept;
  std::vector<std::int32_t> group;  // compact ids, 0..n_groups-1, one per row
  std::int32_t n_groups = 0;
  std::vector<double> slope_t;      // slope dims only; centered internally

  static FeDimension intercepts(std::string name, std::vector<std::int32_t> group,
                                std::int32_t n_groups);
  static FeDimension slopes(std::string name, std::vector<std::int32_t> group,
                            std::int32_t n_groups, std::vector<double> t);
};

struct DemeanResult {
  int sweeps = 0;
  double final_delta = 0.0;
  bool converged = false;
};

// Alternating projections: sweeps over the dimensions, removing (weighted)
// group means or group slopes from every column in place, until the largest
// in-place adjustment of a sweep falls below tol. With a single dimension
// one sweep is exact; with several, convergence follows from the usual
// alternating-projection argument.
DemeanResult demean_columns(const std::vector<double*>& columns, std::size_t n_rows,
                            std::vector<FeDimension>& dims, const double* weights = nullptr,
                            double tol = 1e-8, int max_sweeps = 10000);

// Compacts arbitrary integer labels into 0..k-1 (sorted label order).
std::vector<std::int32_t> compact_groups(const std::vector<std::int32_t>& labels,
                                         std::int32_t* n_groups_out);

}  // namespace cohortlab
