#include "cohortlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "cohortlab/demean.hpp"
#include "cohortlab/errors.hpp"
#include "cohortlab/stats.hpp"

namespace cohortlab {

CellCharacteristic parse_characteristic(const std::string& name) {
  if (name == "flfp_all_peers") return CellCharacteristic::flfp_all_peers;
  if (name == "flfp_female_peers") return CellCharacteristic::flfp_female_peers;
  if (name == "flfp_male_peers") return CellCharacteristic::flfp_male_peers;
  if (name == "mean_ability") return CellCharacteristic::mean_ability;
  if (name == "sd_ability") return CellCharacteristic::sd_ability;
  if (name == "cell_size") return CellCharacteristic::cell_size;
  throw DomainError("unknown cell characteristic: " + name);
}

std::string characteristic_name(CellCharacteristic c) {
  switch (c) {
    case CellCharacteristic::flfp_all_peers: return "flfp_all_peers";
    case CellCharacteristic::flfp_female_peers: return "flfp_female_peers";
    case CellCharacteristic::flfp_male_peers: return "flfp_male_peers";
    case CellCharacteristic::mean_ability: return "mean_ability";
    case CellCharacteristic::sd_ability: return "sd_ability";
    case CellCharacteristic::cell_size: return "cell_size";
  }
  return "?";
}

CellTable build_cell_table(const CohortPanel& panel, CellCharacteristic characteristic) {
  const CellIndex idx = build_cell_index(panel);
  const std::size_t n = panel.size();

  std::vector<double> sum(idx.n_cells, 0.0), sumsq(idx.n_cells, 0.0);
  std::vector<std::int32_t> count(idx.n_cells, 0);
  const bool female_only = characteristic == CellCharacteristic::flfp_female_peers;
  const bool male_only = characteristic == CellCharacteristic::flfp_male_peers;
  const bool uses_ability = characteristic == CellCharacteristic::mean_ability ||
                            characteristic == CellCharacteristic::sd_ability;

  for (std::size_t i = 0; i < n; ++i) {
    const auto cell = idx.cell_of_row[i];
    if (female_only && !panel.female[i]) continue;
    if (male_only && panel.female[i]) continue;
    const double v = uses_ability ? panel.ability[i] : panel.flfp_origin[i];
    sum[cell] += v;
    sumsq[cell] += v * v;
    ++count[cell];
  }

  CellTable t;
  t.degree = idx.degree_of_cell;
  t.cohort = idx.cohort_of_cell;
  t.value.resize(idx.n_cells);
  t.size.resize(idx.n_cells);
  for (std::int32_t c = 0; c < idx.n_cells; ++c) {
    t.size[c] = idx.cell_size[c];
    if ((female_only || male_only) && count[c] == 0) {
      throw DataContractError("degree " + std::to_string(idx.degree_of_cell[c]) + " cohort " +
                              std::to_string(idx.cohort_of_cell[c]) +
                              " has no students of the requested gender");
    }
    switch (characteristic) {
      case CellCharacteristic::cell_size:
        t.value[c] = idx.cell_size[c];
        break;
      case CellCharacteristic::sd_ability: {
        const double m = sum[c] / count[c];
        const double var = sumsq[c] / count[c] - m * m;
        t.value[c] = var > 0.0 ? std::sqrt(var) : 0.0;
        break;
      }
      default:
        t.value[c] = sum[c] / count[c];
    }
  }
  return t;
}

namespace {

// Cells of degrees observed in >= 2 cohorts, plus the count of dropped degrees.
std::vector<std::size_t> usable_cells(const CellTable& t, int* dropped_degrees) {
  std::map<std::int32_t, int> cohorts_per_degree;
  for (std::size_t i = 0; i < t.n(); ++i) ++cohorts_per_degree[t.degree[i]];
  int dropped = 0;
  for (const auto& [deg, cnt] : cohorts_per_degree) {
    if (cnt < 2) ++dropped;
  }
  std::vector<std::size_t> keep;
  keep.reserve(t.n());
  for (std::size_t i = 0; i < t.n(); ++i) {
    if (cohorts_per_degree[t.degree[i]] >= 2) keep.push_back(i);
  }
  if (dropped_degrees != nullptr) *dropped_degrees = dropped;
  return keep;
}

struct DemeanedCells {
  std::vector<std::int32_t> degree;   // per kept cell
  std::vector<double> residual;
  std::vector<double> size;
  int sweeps = 0;
};

DemeanedCells twoway_demean_cells(const CellTable& t, const std::vector<std::size_t>& keep,
                                  bool weighted) {
  DemeanedCells out;
  const std::size_t m = keep.size();
  out.degree.resize(m);
  out.residual.resize(m);
  out.size.resize(m);
  std::vector<std::int32_t> cohort_label(m);
  for (std::size_t k = 0; k < m; ++k) {
    out.degree[k] = t.degree[keep[k]];
    cohort_label[k] = t.cohort[keep[k]];
    out.residual[k] = t.value[keep[k]];
    out.size[k] = t.size[keep[k]];
  }
  std::int32_t n_deg = 0, n_coh = 0;
  auto deg_groups = compact_groups(out.degree, &n_deg);
  auto coh_groups = compact_groups(cohort_label, &n_coh);
  std::vector<FeDimension> dims;
  dims.push_back(FeDimension::intercepts("degree", std::move(deg_groups), n_deg));
  dims.push_back(FeDimension::intercepts("cohort", std::move(coh_groups), n_coh));
  const DemeanResult res =
      demean_columns({out.residual.data()}, m, dims, weighted ? out.size.data() : nullptr,
                     1e-10, 10000);
  if (!res.converged) {
    throw SolverError("cell-level two-way demeaning did not converge", res.final_delta,
                      res.sweeps);
  }
  out.sweeps = res.sweeps;
  return out;
}

double weighted_sd(const std::vector<double>& x, const std::vector<double>& w) {
  double sw = 0.0, swx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
  }
  if (sw <= 0.0) return 0.0;
  const double m = swx / sw;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += w[i] * (x[i] - m) * (x[i] - m);
  return std::sqrt(ss / sw);
}

}  // namespace

ResidualVariationReport residual_variation(const CohortPanel& panel,
                                           CellCharacteristic characteristic) {
  const CellTable table = build_cell_table(panel, characteristic);

  ResidualVariationReport rep;
  rep.characteristic = characteristic_name(characteristic);
  const auto keep = usable_cells(table, &rep.n_degrees_dropped);
  if (keep.empty()) throw DataContractError("no degree with at least 2 cohorts");
  rep.n_cells = static_cast<int>(keep.size());

  std::vector<double> raw(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) raw[k] = table.value[keep[k]];
  rep.raw_mean = mean_of(raw);
  rep.raw_sd = sd_pop(raw);
  rep.raw_min = *std::min_element(raw.begin(), raw.end());
  rep.raw_max = *std::max_element(raw.begin(), raw.end());

  const DemeanedCells unweighted = twoway_demean_cells(table, keep, false);
  const DemeanedCells weighted = twoway_demean_cells(table, keep, true);
  rep.demean_sweeps = unweighted.sweeps;
  rep.residual_sd = sd_pop(unweighted.residual);
  rep.residual_min = *std::min_element(unweighted.residual.begin(), unweighted.residual.end());
  rep.residual_max = *std::max_element(unweighted.residual.begin(), unweighted.residual.end());
  rep.residual_sd_weighted = weighted_sd(weighted.residual, weighted.size);

  // degrees ranked by average size across observed cohorts -> quintiles
  std::map<std::int32_t, std::pair<double, int>> size_acc;  // degree -> (sum size, cells)
  for (std::size_t k = 0; k < keep.size(); ++k) {
    auto& acc = size_acc[table.degree[keep[k]]];
    acc.first += table.size[keep[k]];
    ++acc.second;
  }
  rep.n_degrees = static_cast<int>(size_acc.size());
  std::vector<std::pair<double, std::int32_t>> avg_size;  // (avg, degree)
  avg_size.reserve(size_acc.size());
  for (const auto& [deg, acc] : size_acc) avg_size.push_back({acc.first / acc.second, deg});
  std::sort(avg_size.begin(), avg_size.end());  // ties by degree id via pair order
  std::map<std::int32_t, int> quintile_of_degree;
  const std::size_t n_deg = avg_size.size();
  for (std::size_t r = 1; r <= n_deg; ++r) {
    quintile_of_degree[avg_size[r - 1].second] = static_cast<int>((5 * r + n_deg - 1) / n_deg);
  }

  for (int q = 1; q <= 5; ++q) {
    ResidualVariationReport::QuintileRow row;
    row.quintile = q;
    std::vector<double> raw_q, res_q;
    double lo = 1e300, hi = -1e300;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      const auto deg = table.degree[keep[k]];
      if (quintile_of_degree[deg] != q) continue;
      raw_q.push_back(table.value[keep[k]]);
      res_q.push_back(unweighted.residual[k]);
    }
    for (const auto& [avg, deg] : avg_size) {
      if (quintile_of_degree[deg] != q) continue;
      lo = std::min(lo, avg);
      hi = std::max(hi, avg);
    }
    if (raw_q.empty()) continue;
    row.n_cells = static_cast<int>(raw_q.size());
    row.avg_size_min = lo;
    row.avg_size_max = hi;
    row.raw_sd = sd_pop(raw_q);
    row.residual_sd = sd_pop(res_q);
    rep.by_size_quintile.push_back(row);
  }

  // residual histogram, fixed 0.75-wide bins anchored at zero
  const double width = rep.histogram_bin_width;
  const auto bin_of = [&](double v) { return static_cast<long long>(std::floor(v / width)); };
  long long bin_lo = bin_of(rep.residual_min);
  long long bin_hi = bin_of(rep.residual_max);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bin_hi - bin_lo + 1), 0);
  for (double v : unweighted.residual) ++counts[static_cast<std::size_t>(bin_of(v) - bin_lo)];
  for (std::size_t b = 0; b < counts.size(); ++b) {
    ResidualVariationReport::HistogramBin bin;
    bin.lo = (bin_lo + static_cast<long long>(b)) * width;
    bin.hi = bin.lo + width;
    bin.count = counts[b];
    rep.residual_histogram.push_back(bin);
  }
  return rep;
}

std::vector<ShockStatistic> shock_statistics(const CohortPanel& panel,
                                             CellCharacteristic characteristic) {
  const CellTable table = build_cell_table(panel, characteristic);
  int dropped = 0;
  const auto keep = usable_cells(table, &dropped);
  if (keep.empty()) throw DataContractError("no degree with at least 2 cohorts");
  const DemeanedCells dm = twoway_demean_cells(table, keep, false);

  std::map<std::int32_t, ShockStatistic> by_degree;
  std::map<std::int32_t, double> level_sum;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto deg = table.degree[keep[k]];
    auto& s = by_degree[deg];
    s.degree_id = deg;
    s.characteristic = characteristic_name(characteristic);
    s.z += std::fabs(dm.residual[k]);
    level_sum[deg] += table.value[keep[k]];
    ++s.t_max;
  }
  std::vector<ShockStatistic> out;
  out.reserve(by_degree.size());
  for (auto& [deg, s] : by_degree) {
    s.z /= s.t_max;
    const double level = level_sum[deg] / s.t_max;
    if (std::fabs(level) < 1e-12) {
      s.relative_defined = false;
      s.relative_z = std::numeric_limits<double>::quiet_NaN();
    } else {
      s.relative_z = s.z / level;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<std::int32_t> filter_degrees_by_shock(std::vector<ShockStatistic> stats,
                                                  double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) throw DomainError("fraction must lie in (0,1]");
  for (const auto& s : stats) {
    if (!s.relative_defined) {
      throw DomainError("relative shock undefined for degree " + std::to_string(s.degree_id) +
                        "; cannot rank");
    }
  }
  std::sort(stats.begin(), stats.end(), [](const ShockStatistic& a, const ShockStatistic& b) {
    if (a.relative_z != b.relative_z) return a.relative_z < b.relative_z;
    return a.degree_id < b.degree_id;
  });
  const std::size_t want =
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(stats.size())));
  std::vector<std::int32_t> out;
  out.reserve(want);
  for (std::size_t i = 0; i < want && i < stats.size(); ++i) out.push_back(stats[i].degree_id);
  std::sort(out.begin(), out.end());
  return out;
}

TrendFlagReport flag_size_trends(const CohortPanel& panel, double p_threshold) {
  const CellTable table = build_cell_table(panel, CellCharacteristic::cell_size);
  TrendFlagReport rep;
  rep.p_threshold = p_threshold;

  std::map<std::int32_t, std::vector<std::pair<double, double>>> series;  // degree -> (t, size)
  for (std::size_t i = 0; i < table.n(); ++i) {
    series[table.degree[i]].push_back({static_cast<double>(table.cohort[i]), table.value[i]});
  }
  for (const auto& [deg, pts] : series) {
    if (pts.size() < 3) {
      ++rep.n_skipped;
      continue;
    }
    ++rep.n_tested;
    const double n = static_cast<double>(pts.size());
    double mt = 0.0, my = 0.0;
    for (const auto& [t, y] : pts) {
      mt += t;
      my += y;
    }
    mt /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [t, y] : pts) {
      sxx += (t - mt) * (t - mt);
      sxy += (t - mt) * (y - my);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (const auto& [t, y] : pts) {
      const double e = y - my - slope * (t - mt);
      rss += e * e;
    }
    double p;
    if (rss <= 1e-12 * std::max(1.0, my * my)) {
      p = slope == 0.0 ? 1.0 : 0.0;  // perfect fit
    } else {
      const double dof = n - 2.0;
      const double se = std::sqrt(rss / dof / sxx);
      p = t_pvalue(slope / se, dof);
    }
    if (p <= p_threshold) rep.flagged.push_back(deg);
  }
  return rep;
}

}  // namespace cohortlab
