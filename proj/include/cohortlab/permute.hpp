#pragma once

#include <cstdint>
#include <vector>

#include "cohortlab/panel.hpp"

namespace cohortlab {

struct PermutationSummary {
  int n_draws = 0;
  double observed = 0.0;  // the panel's own statistic
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  // share of draws strictly below the observed value plus half the ties
  double percentile_of_observed = 0.0;
  std::vector<double> draws;
};

// Randomization inference for the identifying-variation check: students'
// province labels are reshuffled across the whole panel (cell sizes and the
// outcome process untouched) and the size-weighted residual SD of the cell
// mean origin-FLFP — degree and cohort effects removed — is recomputed per
// draw. Deterministic for any thread count: each draw owns a derived
// stream, and results are collected in draw order.
PermutationSummary randomization_inference(const CohortPanel& panel, int n_draws,
                                           std::uint64_t seed, int threads = 1);

}  // namespace cohortlab
