#include "cohortlab/permute.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "cohortlab/demean.hpp"
#include "cohortlab/errors.hpp"
#include "cohortlab/rng.hpp"
#include "cohortlab/stats.hpp"

namespace cohortlab {

namespace {

// Fixed cell layout shared by all draws; only the value vector changes.
struct PermutationLayout {
  std::vector<std::int32_t> cell_of_row;      // panel row -> kept-cell id, -1 if dropped
  std::vector<double> cell_size;              // kept cells
  std::vector<std::int32_t> degree_group, cohort_group;
  std::int32_t n_degree_groups = 0, n_cohort_groups = 0;
  std::size_t n_cells = 0;

  explicit PermutationLayout(const CohortPanel& panel) {
    const CellIndex idx = build_cell_index(panel);
    // keep degrees observed in at least 2 cohorts, as the diagnostics do
    std::map<std::int32_t, int> cohorts_per_degree;
    for (std::int32_t c = 0; c < idx.n_cells; ++c) ++cohorts_per_degree[idx.degree_of_cell[c]];
    std::vector<std::int32_t> cell_map(idx.n_cells, -1);
    std::vector<std::int32_t> deg_label, coh_label;
    for (std::int32_t c = 0; c < idx.n_cells; ++c) {
      if (cohorts_per_degree[idx.degree_of_cell[c]] < 2) continue;
      cell_map[c] = static_cast<std::int32_t>(cell_size.size());
      cell_size.push_back(idx.cell_size[c]);
      deg_label.push_back(idx.degree_of_cell[c]);
      coh_label.push_back(idx.cohort_of_cell[c]);
    }
    n_cells = cell_size.size();
    if (n_cells < 4) throw DataContractError("too few usable cells for permutation inference");
    cell_of_row.resize(panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i) {
      cell_of_row[i] = cell_map[idx.cell_of_row[i]];
    }
    degree_group = compact_groups(deg_label, &n_degree_groups);
    cohort_group = compact_groups(coh_label, &n_cohort_groups);
  }

  // size-weighted residual SD of cell means after weighted two-way demeaning
  double statistic(const std::vector<double>& values) const {
    std::vector<double> sums(n_cells, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (cell_of_row[i] >= 0) sums[cell_of_row[i]] += values[i];
    }
    for (std::size_t c = 0; c < n_cells; ++c) sums[c] /= cell_size[c];

    std::vector<FeDimension> dims;
    dims.push_back(FeDimension::intercepts("degree", degree_group, n_degree_groups));
    dims.push_back(FeDimension::intercepts("cohort", cohort_group, n_cohort_groups));
    const DemeanResult res =
        demean_columns({sums.data()}, n_cells, dims, cell_size.data(), 1e-10, 10000);
    if (!res.converged) {
      throw SolverError("permutation demeaning did not converge", res.final_delta, res.sweeps);
    }
    double sw = 0.0, swx = 0.0;
    for (std::size_t c = 0; c < n_cells; ++c) {
      sw += cell_size[c];
      swx += cell_size[c] * sums[c];
    }
    const double m = swx / sw;
    double ss = 0.0;
    for (std::size_t c = 0; c < n_cells; ++c) {
      ss += cell_size[c] * (sums[c] - m) * (sums[c] - m);
    }
    return std::sqrt(ss / sw);
  }
};

}  // namespace

PermutationSummary randomization_inference(const CohortPanel& panel, int n_draws,
                                           std::uint64_t seed, int threads) {
  if (n_draws < 1) throw DomainError("randomization inference needs n_draws >= 1");
  if (threads < 1) threads = 1;

  const PermutationLayout layout(panel);
  PermutationSummary out;
  out.n_draws = n_draws;
  out.observed = layout.statistic(panel.flfp_origin);
  out.draws.assign(n_draws, 0.0);

  const auto run_range = [&](int begin, int end) {
    std::vector<double> values;
    for (int d = begin; d < end; ++d) {
      RandomStream rng(derive_seed(seed, 0xD000 + static_cast<std::uint64_t>(d)));
      // fresh copy each draw so results do not depend on the chunking
      values = panel.flfp_origin;
      rng.shuffle(values);
      out.draws[d] = layout.statistic(values);
    }
  };

  if (threads == 1) {
    run_range(0, n_draws);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_draws + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(n_draws, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  out.min = *std::min_element(out.draws.begin(), out.draws.end());
  out.max = *std::max_element(out.draws.begin(), out.draws.end());
  out.mean = mean_of(out.draws);
  out.sd = sd_pop(out.draws);
  int below = 0, ties = 0;
  for (double v : out.draws) {
    if (v < out.observed) ++below;
    if (v == out.observed) ++ties;
  }
  out.percentile_of_observed = (below + 0.5 * ties) / n_draws;
  return out;
}

}  // namespace cohortlab
