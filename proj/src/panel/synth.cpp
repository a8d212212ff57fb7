#include "cohortlab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "cohortlab/errors.hpp"
#include "cohortlab/rng.hpp"

namespace cohortlab {

namespace {

const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);

// Stratified draws from a truncated normal, then affinely restandardized
// (population convention) so the province marginal hits the calibration
// moments; clamping keeps the configured range.
std::vector<double> draw_province_flfp(const PanelCalibration& cal, RandomStream& rng) {
  const int p = cal.n_provinces;
  if (p < 4) throw GenerationError("need at least 4 provinces");
  const double a = cal.flfp_min, b = cal.flfp_max;
  // Pre-truncation spread inflated so the truncated draw still spans the
  // range; the restandardization below does the exact moment matching.
  const double mu0 = cal.flfp_mean, sd0 = cal.flfp_sd * 1.6;
  const double za = boost::math::cdf(kStdNormal, (a - mu0) / sd0);
  const double zb = boost::math::cdf(kStdNormal, (b - mu0) / sd0);

  std::vector<double> v(p);
  for (int i = 0; i < p; ++i) {
    const double u = (i + rng.u01()) / p;  // one draw per stratum
    const double q = za + u * (zb - za);
    v[i] = mu0 + sd0 * boost::math::quantile(kStdNormal, std::clamp(q, 1e-12, 1.0 - 1e-12));
  }
  for (int round = 0; round < 3; ++round) {
    double m = 0.0, s2 = 0.0;
    for (double x : v) m += x;
    m /= p;
    for (double x : v) s2 += (x - m) * (x - m);
    const double s = std::sqrt(s2 / p);
    for (double& x : v) x = std::clamp(cal.flfp_mean + (x - m) / s * cal.flfp_sd, a, b);
  }
  std::sort(v.begin(), v.end());
  return v;
}

double fit_size_sigma(const PanelCalibration& cal) {
  const double med = cal.size_median - cal.size_shift;
  const double mean = cal.size_mean - cal.size_shift;
  if (!(med > 0.0) || !(mean > med)) {
    throw GenerationError("size calibration requires shift < median < mean");
  }
  return std::sqrt(2.0 * std::log(mean / med));
}

struct OutcomeDraws {
  std::vector<double> degree_fe;  // by degree index
  std::vector<double> cohort_fe;  // by cohort index
  std::vector<double> cell_shock; // by cell
};

OutcomeDraws draw_effects(const OutcomeChannel& ch, int n_degrees, int n_cohorts, int n_cells,
                          RandomStream& rng) {
  OutcomeDraws d;
  d.degree_fe.resize(n_degrees);
  for (auto& x : d.degree_fe) x = rng.normal(0.0, ch.degree_fe_sd);
  d.cohort_fe.resize(n_cohorts);
  for (auto& x : d.cohort_fe) x = rng.normal(0.0, ch.cohort_fe_sd);
  d.cell_shock.resize(n_cells);
  for (auto& x : d.cell_shock) x = rng.normal(0.0, ch.cell_shock_sd);
  return d;
}

struct Standardizer {
  double mean = 0.0;
  double sd = 1.0;
  double z(double x) const { return (x - mean) / sd; }
};

Standardizer fit_standardizer(const std::vector<double>& x, const std::vector<std::uint8_t>* skip) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (skip != nullptr && (*skip)[i]) continue;
    sum += x[i];
    ++n;
  }
  Standardizer s;
  if (n == 0) return s;
  s.mean = sum / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (skip != nullptr && (*skip)[i]) continue;
    ss += (x[i] - s.mean) * (x[i] - s.mean);
  }
  s.sd = std::sqrt(ss / n);
  if (!(s.sd > 0.0)) s.sd = 1.0;
  return s;
}

// Gamma(shape, 1) by Marsaglia-Tsang, with the alpha < 1 boost; only the
// stream's own draws are consumed, so generation stays reproducible.
double gamma_draw(RandomStream& rng, double shape) {
  if (shape < 1.0) {
    const double u = rng.u01_open_below();
    return gamma_draw(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.u01_open_below();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

// Degree-specific province weights: a Dirichlet draw whose concentration is
// boosted on the home region, so degrees mostly recruit locally but with
// idiosyncratic catchments. Returns the cumulative distribution for
// inverse-CDF sampling.
std::vector<double> dirichlet_catchment_cdf(RandomStream& rng, int n_provinces,
                                            const std::vector<std::int32_t>& region_of_province,
                                            int home_region, double home_share) {
  const double conc_out = 0.05;
  int home_count = 0;
  for (int p = 0; p < n_provinces; ++p) home_count += region_of_province[p] == home_region;
  const double other_count = n_provinces - home_count;
  // mean home-region mass equals home_share
  const double conc_home = home_count > 0
                               ? home_share / (1.0 - home_share) * other_count * conc_out /
                                     home_count
                               : conc_out;
  std::vector<double> cdf(n_provinces);
  double total = 0.0;
  for (int p = 0; p < n_provinces; ++p) {
    const double shape = region_of_province[p] == home_region ? conc_home : conc_out;
    total += gamma_draw(rng, shape);
    cdf[p] = total;
  }
  for (auto& v : cdf) v /= total;
  cdf.back() = 1.0;
  return cdf;
}

std::int32_t sample_cdf(RandomStream& rng, const std::vector<double>& cdf) {
  const double u = rng.u01();
  return static_cast<std::int32_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

PanelGeneration generate_impl(const DgpSpec& spec, const PanelCalibration& cal,
                              std::uint64_t seed, bool mover_columns) {
  if (cal.n_degrees < 2 || cal.n_cohorts < 2) {
    throw GenerationError("calibration requires at least 2 degrees and 2 cohorts");
  }
  if (!(cal.female_share > 0.0) || !(cal.female_share < 1.0)) {
    throw GenerationError("female share must be interior for the one-man/one-woman rule");
  }

  PanelGeneration out;

  // --- market geography (stream 0) -------------------------------------
  RandomStream geo_rng(derive_seed(seed, 0));
  const auto flfp = draw_province_flfp(cal, geo_rng);
  const int n_prov = cal.n_provinces;
  out.provinces.resize(n_prov);
  for (int i = 0; i < n_prov; ++i) {
    // provinces come back FLFP-sorted, so contiguous blocks give regions
    // with distinct participation levels
    const int region = static_cast<int>(static_cast<long long>(i) * cal.n_regions / n_prov);
    out.provinces[i] = Province{i, region, flfp[i]};
  }

  std::vector<std::int32_t> region_of_province(n_prov);
  for (int p = 0; p < n_prov; ++p) region_of_province[p] = out.provinces[p].region;

  // --- roster (stream 1) ------------------------------------------------
  RandomStream roster_rng(derive_seed(seed, 1));
  const int n_degrees = cal.n_degrees;
  const int n_cohorts = cal.n_cohorts;
  const double size_sigma = fit_size_sigma(cal);
  const double size_mu = std::log(cal.size_median - cal.size_shift);
  const bool sorted = spec.regime == DgpSpec::Regime::sorted;

  std::vector<double> degree_base(n_degrees);
  std::vector<int> home_region(n_degrees);
  std::vector<int> degree_region_study(n_degrees);
  std::vector<std::vector<double>> catchment_cdf(sorted ? n_degrees : 0);
  for (int d = 0; d < n_degrees; ++d) {
    const double raw = cal.size_shift + std::exp(roster_rng.normal(size_mu, size_sigma));
    degree_base[d] = std::clamp(raw, cal.size_min, cal.size_max);
    home_region[d] = static_cast<int>(roster_rng.uniform_int(cal.n_regions));
    degree_region_study[d] = home_region[d];
    if (sorted) {
      catchment_cdf[d] = dirichlet_catchment_cdf(roster_rng, n_prov, region_of_province,
                                                 home_region[d], spec.sorting_intensity);
    }
  }

  CohortPanel& p = out.panel;
  const auto reserve_n = static_cast<std::size_t>(n_degrees * n_cohorts * cal.size_mean * 1.05);
  p.student_id.reserve(reserve_n);

  std::vector<std::uint8_t> cell_gender;
  std::vector<double> drifted_cdf;
  for (int d = 0; d < n_degrees; ++d) {
    const std::vector<double>* cdf = sorted ? &catchment_cdf[d] : nullptr;
    for (int c = 0; c < n_cohorts; ++c) {
      if (sorted && spec.cohort_drift > 0.0 && c > 0 &&
          roster_rng.u01() < spec.cohort_drift) {
        // the degree's recruitment pool shifts between cohorts
        const int new_home = static_cast<int>(roster_rng.uniform_int(cal.n_regions));
        drifted_cdf = dirichlet_catchment_cdf(roster_rng, n_prov, region_of_province, new_home,
                                              spec.sorting_intensity);
        cdf = &drifted_cdf;
      }
      const double sd = std::max(1.5, cal.cohort_size_cv * degree_base[d]);
      const int n_cell = static_cast<int>(std::clamp(
          std::round(degree_base[d] + sd * roster_rng.normal()), cal.size_min, cal.size_max));

      // gender composition: redraw until both genders present
      cell_gender.assign(n_cell, 0);
      bool ok = false;
      for (int attempt = 0; attempt < 10000; ++attempt) {
        int nf = 0;
        for (int i = 0; i < n_cell; ++i) {
          cell_gender[i] = roster_rng.bernoulli(cal.female_share) ? 1 : 0;
          nf += cell_gender[i];
        }
        if (nf > 0 && nf < n_cell) {
          ok = true;
          break;
        }
        ++out.gender_redraws;
      }
      if (!ok) {
        throw GenerationError("could not draw a mixed-gender cell of size " +
                              std::to_string(n_cell) + "; female share " +
                              std::to_string(cal.female_share) + " is too extreme");
      }

      for (int i = 0; i < n_cell; ++i) {
        p.student_id.push_back(static_cast<std::int32_t>(p.student_id.size()));
        p.degree_id.push_back(d);
        p.cohort.push_back(cal.first_cohort + c);
        p.female.push_back(cell_gender[i]);
        const std::int32_t prov =
            sorted ? sample_cdf(roster_rng, *cdf)
                   : static_cast<std::int32_t>(roster_rng.uniform_int(n_prov));
        p.province_id.push_back(prov);
        p.flfp_origin.push_back(out.provinces[prov].flfp);
        p.region_study.push_back(degree_region_study[d]);
        p.ability.push_back(roster_rng.truncated_normal(98.0, 7.0, 66.0, 110.0));
        p.hs_grade.push_back(std::clamp(
            70.0 + 0.35 * (p.ability.back() - 98.0) + roster_rng.normal(0.0, 8.0), 60.0, 100.0));
        p.parent_tertiary.push_back(roster_rng.bernoulli(0.21) ? 1 : 0);
        p.parent_high_ses.push_back(roster_rng.bernoulli(0.33) ? 1 : 0);
        p.mother_working.push_back(roster_rng.bernoulli(0.72) ? 1 : 0);
      }
    }
  }
  const std::size_t n = p.size();
  p.employed.resize(n);
  p.log_earnings.assign(n, std::numeric_limits<double>::quiet_NaN());
  p.log_hours.assign(n, std::numeric_limits<double>::quiet_NaN());
  p.fulltime.assign(n, 0);
  p.log_wage.assign(n, std::numeric_limits<double>::quiet_NaN());

  // --- exposures and planted confounding -------------------------------
  out.exposures = compute_exposures(p);
  const CellIndex cells = build_cell_index(p);

  const Standardizer std_own = fit_standardizer(p.flfp_origin, nullptr);
  const Standardizer std_fp =
      fit_standardizer(out.exposures.loo_female_mean, &out.exposures.loo_female_missing);
  const Standardizer std_mp =
      fit_standardizer(out.exposures.loo_male_mean, &out.exposures.loo_male_missing);
  out.exposure_female_mean = std_fp.mean;
  out.exposure_female_sd = std_fp.sd;
  out.exposure_male_mean = std_mp.mean;
  out.exposure_male_sd = std_mp.sd;
  out.own_flfp_mean = std_own.mean;
  out.own_flfp_sd = std_own.sd;

  if (spec.confounded && spec.confound_loading != 0.0) {
    // ability drifts with the cell's female-peer composition
    std::vector<double> cell_female_mean(cells.n_cells, 0.0);
    std::vector<int> cell_nf(cells.n_cells, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!p.female[i]) continue;
      cell_female_mean[cells.cell_of_row[i]] += p.flfp_origin[i];
      ++cell_nf[cells.cell_of_row[i]];
    }
    for (int c = 0; c < cells.n_cells; ++c) cell_female_mean[c] /= std::max(1, cell_nf[c]);
    const Standardizer std_cell = fit_standardizer(cell_female_mean, nullptr);
    for (std::size_t i = 0; i < n; ++i) {
      p.ability[i] = std::clamp(p.ability[i] + spec.confound_loading * 7.0 *
                                                   std_cell.z(cell_female_mean[cells.cell_of_row[i]]),
                                66.0, 110.0);
    }
  }

  // --- mover geography --------------------------------------------------
  std::vector<int> quartile;
  if (mover_columns) {
    quartile = province_flfp_quartiles(out.provinces);
    p.work_province.resize(n);
    p.q4_flfp.resize(n);
    RandomStream mover_rng(derive_seed(seed, 2));
    for (std::size_t i = 0; i < n; ++i) {
      p.work_province[i] = mover_rng.bernoulli(spec.stay_home_prob)
                               ? p.province_id[i]
                               : static_cast<std::int32_t>(mover_rng.uniform_int(n_prov));
      const int q = quartile[static_cast<std::size_t>(p.province_id[i])];
      p.q4_flfp[i] = q == 4 ? 1 : (q == 1 ? 0 : -1);
    }
  }

  // --- outcomes (stream 3) ----------------------------------------------
  RandomStream outcome_rng(derive_seed(seed, 3));
  const auto wage_fx = draw_effects(spec.wage, n_degrees, n_cohorts, cells.n_cells, outcome_rng);
  const auto hours_fx = draw_effects(spec.hours, n_degrees, n_cohorts, cells.n_cells, outcome_rng);
  const auto ft_fx = draw_effects(spec.fulltime, n_degrees, n_cohorts, cells.n_cells, outcome_rng);

  // direct coefficients from the planted totals and the mediation path
  const double ft_to_hours = spec.hours_on_fulltime;
  const double direct_h_female = spec.female_gap_hours - ft_to_hours * spec.female_gap_fulltime;
  const double direct_w_female = spec.female_gap_earnings - spec.female_gap_hours;
  const double direct_h_fp = spec.delta_fp_hours - ft_to_hours * spec.delta_fp_fulltime;
  const double direct_h_mp = spec.delta_mp_hours - ft_to_hours * spec.delta_mp_fulltime;
  const double direct_h_own = spec.own_hours - ft_to_hours * spec.own_fulltime;
  const double direct_w_fp = spec.delta_fp_earnings - spec.delta_fp_hours;
  const double direct_w_mp = spec.delta_mp_earnings - spec.delta_mp_hours;
  const double direct_w_own = spec.own_earnings - spec.own_hours;

  const double log40 = std::log(40.0);
  for (std::size_t i = 0; i < n; ++i) {
    p.employed[i] = outcome_rng.bernoulli(spec.employment_rate) ? 1 : 0;
    // burn the per-student shocks regardless of employment so the roster's
    // outcome draws do not depend on who is employed
    const double z_ft = outcome_rng.u01();
    const double e_h = outcome_rng.normal(0.0, spec.hours.noise_sd);
    const double e_w = outcome_rng.normal(0.0, spec.wage.noise_sd);
    if (!p.employed[i]) continue;

    const double x_fp =
        out.exposures.loo_female_missing[i] ? 0.0 : std_fp.z(out.exposures.loo_female_mean[i]);
    const double x_mp =
        out.exposures.loo_male_missing[i] ? 0.0 : std_mp.z(out.exposures.loo_male_mean[i]);
    const double x_own = std_own.z(p.flfp_origin[i]);
    const double abil_z = (p.ability[i] - 98.0) / 7.0;
    const int cell = cells.cell_of_row[i];
    const int d_idx = cells.degree_index_of_cell[cell];
    const int c_idx = cells.cohort_index_of_cell[cell];

    double ft_p = spec.fulltime_base + spec.female_gap_fulltime * p.female[i] +
                  spec.delta_fp_fulltime * x_fp + spec.delta_mp_fulltime * x_mp +
                  spec.own_fulltime * x_own + spec.ability_on_fulltime * abil_z +
                  ft_fx.degree_fe[d_idx] + ft_fx.cohort_fe[c_idx] + ft_fx.cell_shock[cell];
    if (mover_columns && p.female[i] && p.q4_flfp[i] == 1) ft_p += spec.q4_fulltime_effect;
    ft_p = std::clamp(ft_p, 0.02, 0.98);
    const bool ft = z_ft < ft_p;
    p.fulltime[i] = ft ? 1 : 0;

    const double lh = log40 + ft_to_hours * (ft - 1.0) + direct_h_female * p.female[i] +
                      direct_h_fp * x_fp + direct_h_mp * x_mp + direct_h_own * x_own +
                      spec.ability_on_hours * abil_z + hours_fx.degree_fe[d_idx] +
                      hours_fx.cohort_fe[c_idx] + hours_fx.cell_shock[cell] + e_h;
    const double lw = 2.0 + direct_w_female * p.female[i] + direct_w_fp * x_fp +
                      direct_w_mp * x_mp + direct_w_own * x_own + spec.ability_on_wage * abil_z +
                      spec.parent_tertiary_on_wage * p.parent_tertiary[i] +
                      wage_fx.degree_fe[d_idx] + wage_fx.cohort_fe[c_idx] +
                      wage_fx.cell_shock[cell] + e_w;
    p.log_hours[i] = lh;
    p.log_wage[i] = lw;
    p.log_earnings[i] = lw + lh;
  }

  p.validate();
  return out;
}

}  // namespace

std::vector<int> province_flfp_quartiles(const std::vector<Province>& provinces) {
  const std::size_t n = provinces.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (provinces[a].flfp != provinces[b].flfp) return provinces[a].flfp < provinces[b].flfp;
    return provinces[a].id < provinces[b].id;  // deterministic tie rule
  });
  std::vector<int> quartile(n);
  for (std::size_t rank = 1; rank <= n; ++rank) {
    quartile[order[rank - 1]] = static_cast<int>((4 * rank + n - 1) / n);  // ceil(4r/n)
  }
  return quartile;
}

PanelGeneration generate_panel(const DgpSpec& spec, const PanelCalibration& calibration,
                               std::uint64_t seed) {
  return generate_impl(spec, calibration, seed, false);
}

PanelGeneration generate_mover_sample(const DgpSpec& spec, const PanelCalibration& calibration,
                                      std::uint64_t seed) {
  return generate_impl(spec, calibration, seed, true);
}

}  // namespace cohortlab
