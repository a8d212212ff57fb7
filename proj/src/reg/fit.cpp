#include "cohortlab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "cohortlab/demean.hpp"
#include "cohortlab/errors.hpp"
#include "cohortlab/kernels.hpp"
#include "cohortlab/synth.hpp"

namespace cohortlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Panel column registry: every numeric column a specification may name.
std::vector<double> resolve_column(const CohortPanel& p, const ExposureColumns& e,
                                   const ExtraColumns& extra, const std::string& name) {
  const std::size_t n = p.size();
  const auto as_double = [&](const auto& v) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(v[i]);
    return out;
  };
  if (const auto it = extra.find(name); it != extra.end()) {
    if (it->second->size() != n) {
      throw DataContractError("extra column '" + name + "' length mismatch");
    }
    return *it->second;
  }
  if (name == "log_earnings") return p.log_earnings;
  if (name == "log_hours") return p.log_hours;
  if (name == "log_wage") return p.log_wage;
  if (name == "fulltime") {
    std::vector<double> out(n, kNaN);
    for (std::size_t i = 0; i < n; ++i) {
      if (p.employed[i]) out[i] = p.fulltime[i];
    }
    return out;
  }
  if (name == "female") return as_double(p.female);
  if (name == "employed") return as_double(p.employed);
  if (name == "flfp_origin") return p.flfp_origin;
  if (name == "ability") return p.ability;
  if (name == "hs_grade") return p.hs_grade;
  if (name == "parent_tertiary") return as_double(p.parent_tertiary);
  if (name == "parent_high_ses") return as_double(p.parent_high_ses);
  if (name == "mother_working") return as_double(p.mother_working);
  if (name == "loo_female_mean") {
    std::vector<double> out = e.loo_female_mean;
    for (std::size_t i = 0; i < n; ++i) {
      if (e.loo_female_missing[i]) out[i] = kNaN;
    }
    return out;
  }
  if (name == "loo_male_mean") {
    std::vector<double> out = e.loo_male_mean;
    for (std::size_t i = 0; i < n; ++i) {
      if (e.loo_male_missing[i]) out[i] = kNaN;
    }
    return out;
  }
  if (name == "q4_flfp") {
    if (!p.has_mover_columns()) {
      throw DataContractError("column 'q4_flfp' requires a mover panel");
    }
    std::vector<double> out(n, kNaN);
    for (std::size_t i = 0; i < n; ++i) {
      if (p.q4_flfp[i] >= 0) out[i] = p.q4_flfp[i];
    }
    return out;
  }
  throw DataContractError("unknown column in specification: '" + name + "'");
}

std::vector<std::int32_t> resolve_fe_labels(const CohortPanel& p, const std::string& dim) {
  if (dim == "degree") return p.degree_id;
  if (dim == "cohort") return p.cohort;
  if (dim == "student") return p.student_id;  // singleton clusters
  if (dim == "province_origin") return p.province_id;
  if (dim == "region_study") return p.region_study;
  if (dim == "province_job") {
    if (!p.has_mover_columns()) {
      throw DataContractError("fixed effect 'province_job' requires a mover panel");
    }
    return p.work_province;
  }
  throw DataContractError("unknown fixed-effect dimension: '" + dim + "'");
}

}  // namespace

FitResult fit(const CohortPanel& panel, const ExposureColumns& exposures,
              const Specification& spec, const ExtraColumns& extra) {
  panel.validate();
  if (spec.treatments.empty()) throw DomainError("specification needs at least one treatment");

  const std::size_t n_all = panel.size();
  FitResult res;
  res.name = spec.name;
  res.outcome = spec.outcome;

  // ---- resolve columns --------------------------------------------------
  std::vector<double> y = resolve_column(panel, exposures, extra, spec.outcome);
  std::vector<std::vector<double>> xs;
  for (const auto& t : spec.treatments) {
    res.terms.push_back(t);
    xs.push_back(resolve_column(panel, exposures, extra, t));
  }
  for (const auto& c : spec.controls) {
    res.terms.push_back(c);
    xs.push_back(resolve_column(panel, exposures, extra, c));
  }
  const int k = static_cast<int>(xs.size());

  std::vector<std::vector<std::int32_t>> fe_labels;
  for (const auto& dim : spec.fixed_effects) fe_labels.push_back(resolve_fe_labels(panel, dim));
  std::vector<std::int32_t> cluster_labels;
  if (!spec.cluster.empty()) cluster_labels = resolve_fe_labels(panel, spec.cluster);

  // ---- sample mask -------------------------------------------------------
  std::set<std::int32_t> excluded(spec.filter.exclude_degrees.begin(),
                                  spec.filter.exclude_degrees.end());
  std::vector<std::size_t> rows;
  rows.reserve(n_all);
  std::int64_t missing_dropped = 0;
  for (std::size_t i = 0; i < n_all; ++i) {
    if (spec.filter.female.has_value() && panel.female[i] != *spec.filter.female) continue;
    if (spec.filter.employed_only && !panel.employed[i]) continue;
    if (spec.filter.q4_sample) {
      if (!panel.has_mover_columns()) {
        throw DataContractError("q4_sample filter requires a mover panel");
      }
      if (panel.q4_flfp[i] < 0 || panel.work_province[i] == panel.province_id[i]) continue;
    }
    if (!excluded.empty() && excluded.count(panel.degree_id[i]) != 0) continue;
    bool ok = std::isfinite(y[i]);
    for (int j = 0; ok && j < k; ++j) ok = std::isfinite(xs[j][i]);
    if (!ok) {
      ++missing_dropped;
      continue;
    }
    rows.push_back(i);
  }
  res.missing_rows_dropped = missing_dropped;

  // ---- iterative singleton drop (absorbed intercept dims) ----------------
  std::int64_t singletons = 0;
  if (!fe_labels.empty()) {
    bool changed = true;
    while (changed && !rows.empty()) {
      changed = false;
      for (const auto& labels : fe_labels) {
        std::map<std::int32_t, int> count;
        for (auto r : rows) ++count[labels[r]];
        std::vector<std::size_t> kept;
        kept.reserve(rows.size());
        for (auto r : rows) {
          if (count[labels[r]] > 1) {
            kept.push_back(r);
          } else {
            ++singletons;
            changed = true;
          }
        }
        rows.swap(kept);
      }
    }
  }
  res.singleton_rows_dropped = singletons;
  const std::size_t n = rows.size();
  if (n == 0) throw DataContractError("estimation sample is empty after filtering");

  // ---- materialize the estimation sample --------------------------------
  std::vector<double> yv(n);
  for (std::size_t r = 0; r < n; ++r) yv[r] = y[rows[r]];
  std::vector<std::vector<double>> xv(k, std::vector<double>(n));
  for (int j = 0; j < k; ++j) {
    for (std::size_t r = 0; r < n; ++r) xv[j][r] = xs[j][rows[r]];
  }

  // standardize the treatment block on the estimation sample
  const int n_treat = static_cast<int>(spec.treatments.size());
  for (int j = 0; j < k; ++j) {
    if (j < n_treat && spec.standardize_treatments) {
      double m = kernels::sum(xv[j].data(), n) / n;
      double ss = 0.0;
      for (double v : xv[j]) ss += (v - m) * (v - m);
      double sd = std::sqrt(ss / n);
      if (!(sd > 0.0)) {
        throw DomainError("treatment '" + spec.treatments[j] +
                          "' is constant on the estimation sample");
      }
      for (double& v : xv[j]) v = (v - m) / sd;
      res.treatment_mean.push_back(m);
      res.treatment_sd.push_back(sd);
    } else if (j < n_treat) {
      res.treatment_mean.push_back(0.0);
      res.treatment_sd.push_back(1.0);
    }
  }

  const double y_mean = kernels::sum(yv.data(), n) / n;
  double y_sst_full = 0.0;
  for (double v : yv) y_sst_full += (v - y_mean) * (v - y_mean);

  // ---- absorbed dimensions ----------------------------------------------
  std::vector<FeDimension> dims;
  std::int64_t absorbed_dof = fe_labels.empty() ? 0 : 1;
  for (std::size_t d = 0; d < fe_labels.size(); ++d) {
    std::vector<std::int32_t> sub(n);
    for (std::size_t r = 0; r < n; ++r) sub[r] = fe_labels[d][rows[r]];
    std::int32_t n_groups = 0;
    auto compact = compact_groups(sub, &n_groups);
    absorbed_dof += n_groups - 1;
    dims.push_back(FeDimension::intercepts(spec.fixed_effects[d], std::move(compact), n_groups));
  }
  if (spec.trend != Specification::Trend::none) {
    const bool by_degree = spec.trend == Specification::Trend::degree_linear;
    auto labels = resolve_fe_labels(panel, by_degree ? "degree" : "region_study");
    std::vector<std::int32_t> sub(n);
    std::vector<double> tvar(n);
    for (std::size_t r = 0; r < n; ++r) {
      sub[r] = labels[rows[r]];
      tvar[r] = static_cast<double>(panel.cohort[rows[r]]);
    }
    std::int32_t n_groups = 0;
    auto compact = compact_groups(sub, &n_groups);
    absorbed_dof += n_groups;
    dims.push_back(FeDimension::slopes(by_degree ? "degree_trend" : "region_trend",
                                       std::move(compact), n_groups, std::move(tvar)));
  }

  std::vector<double*> cols;
  cols.push_back(yv.data());
  for (auto& x : xv) cols.push_back(x.data());
  const DemeanResult dm =
      demean_columns(cols, n, dims, nullptr, spec.demean_tol, spec.demean_max_sweeps);
  if (!dims.empty() && !dm.converged) {
    throw SolverError("fixed-effect demeaning did not converge (delta " +
                          std::to_string(dm.final_delta) + ")",
                      dm.final_delta, dm.sweeps);
  }
  res.demean_sweeps = dm.sweeps;
  res.demean_converged = dims.empty() ? true : dm.converged;

  // ---- normal equations ---------------------------------------------------
  Eigen::MatrixXd gram(k, k);
  Eigen::VectorXd xty(k);
  for (int a = 0; a < k; ++a) {
    for (int c = a; c < k; ++c) {
      gram(a, c) = gram(c, a) = kernels::dot(xv[a].data(), xv[c].data(), n);
    }
    xty(a) = kernels::dot(xv[a].data(), yv.data(), n);
  }

  // rank check with the offending column by pivoted Cholesky-style QR
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
      const auto perm = qr.colsPermutation().indices();
      const int offending = perm(k - 1);  // last pivot holds the most dependent column
      throw DomainError("collinear regressor: '" + res.terms[offending] + "'");
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const Eigen::VectorXd beta = ldlt.solve(xty);
  res.coef = beta;

  // residuals on the demeaned data
  std::vector<double> resid = yv;
  for (int j = 0; j < k; ++j) kernels::axpy(-beta(j), xv[j].data(), resid.data(), n);
  const double ssr = kernels::sumsq(resid.data(), n);
  double y_sst_within = 0.0;
  {
    const double m = kernels::sum(yv.data(), n) / n;  // ~0 after demeaning
    for (double v : yv) y_sst_within += (v - m) * (v - m);
  }
  res.r2_within = y_sst_within > 0.0 ? 1.0 - ssr / y_sst_within : 0.0;
  res.r2_full = y_sst_full > 0.0 ? 1.0 - ssr / y_sst_full : 0.0;
  res.n_obs = static_cast<std::int64_t>(n);
  res.absorbed_dof = absorbed_dof;

  // ---- sandwich covariance ------------------------------------------------
  const Eigen::MatrixXd gram_inv = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
  const double dof_k = static_cast<double>(k + absorbed_dof);
  if (static_cast<double>(n) <= dof_k) {
    throw DomainError("not enough observations for the absorbed effects and regressors");
  }
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  double cr_factor;
  if (!spec.cluster.empty()) {
    std::vector<std::int32_t> csub(n);
    for (std::size_t r = 0; r < n; ++r) csub[r] = cluster_labels[rows[r]];
    std::int32_t n_clusters = 0;
    auto cg = compact_groups(csub, &n_clusters);
    res.n_clusters = n_clusters;
    if (n_clusters < 2) throw DomainError("clustering requires at least 2 clusters");
    if (n_clusters < 30) {
      res.warnings.push_back("only " + std::to_string(n_clusters) +
                             " clusters; CR1 inference may be unreliable");
    }
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n_clusters, k);
    for (std::size_t r = 0; r < n; ++r) {
      for (int j = 0; j < k; ++j) scores(cg[r], j) += xv[j][r] * resid[r];
    }
    meat = scores.transpose() * scores;
    const double g = n_clusters;
    cr_factor = (g / (g - 1.0)) * ((n - 1.0) / (n - dof_k));
  } else {
    res.n_clusters = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const double w = resid[r] * resid[r];
      for (int a = 0; a < k; ++a) {
        for (int c = a; c < k; ++c) meat(a, c) += w * xv[a][r] * xv[c][r];
      }
    }
    for (int a = 0; a < k; ++a) {
      for (int c = a + 1; c < k; ++c) meat(c, a) = meat(a, c);
    }
    cr_factor = static_cast<double>(n) / (n - dof_k);  // HC1
  }
  res.cr1_factor = cr_factor;
  res.vcov = cr_factor * gram_inv * meat * gram_inv;
  res.vcov = 0.5 * (res.vcov + res.vcov.transpose().eval());
  res.se.resize(k);
  for (int j = 0; j < k; ++j) res.se(j) = std::sqrt(std::max(0.0, res.vcov(j, j)));
  return res;
}

std::map<std::string, FitResult> gender_gap(const CohortPanel& panel,
                                            const ExposureColumns& exposures, bool control_gpa) {
  std::map<std::string, FitResult> out;
  for (const std::string outcome : {"log_earnings", "log_hours", "fulltime", "log_wage"}) {
    Specification spec;
    spec.name = "gender_gap_" + outcome;
    spec.outcome = outcome;
    spec.treatments = {"female"};
    if (control_gpa) spec.controls = {"ability"};
    spec.standardize_treatments = false;  // the gap is reported per the raw dummy
    spec.fixed_effects = {"degree", "cohort"};
    spec.cluster = "degree";
    spec.filter.employed_only = true;
    out.emplace(outcome, fit(panel, exposures, spec));
  }
  return out;
}

FitResult simple_ols(const std::vector<double>& y, const std::vector<std::string>& x_names,
                     const std::vector<const std::vector<double>*>& x,
                     const std::vector<std::int32_t>* group_fe) {
  if (x.empty() || x_names.size() != x.size()) throw DomainError("simple_ols: bad regressors");
  const std::size_t n = y.size();
  for (const auto* xj : x) {
    if (xj->size() != n) throw DomainError("simple_ols: column length mismatch");
  }
  const int kx = static_cast<int>(x.size());

  int n_groups = 0;
  std::vector<std::int32_t> fe;
  if (group_fe != nullptr) {
    if (group_fe->size() != n) throw DomainError("simple_ols: group length mismatch");
    std::int32_t ng = 0;
    fe = compact_groups(*group_fe, &ng);
    n_groups = ng;
  }
  // design: [x | intercept | group dummies 2..G]
  const int k = kx + 1 + std::max(0, n_groups - 1);
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, k);
  Eigen::VectorXd yv(n);
  for (std::size_t i = 0; i < n; ++i) {
    yv(i) = y[i];
    for (int j = 0; j < kx; ++j) design(i, j) = (*x[j])[i];
    design(i, kx) = 1.0;
    if (n_groups > 1 && fe[i] > 0) design(i, kx + fe[i]) = 1.0;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) throw DomainError("simple_ols: rank-deficient design");
  const Eigen::VectorXd beta = qr.solve(yv);
  const Eigen::VectorXd resid = yv - design * beta;

  FitResult res;
  res.name = "simple_ols";
  res.terms = x_names;
  res.terms.push_back("(intercept)");
  res.n_obs = static_cast<std::int64_t>(n);
  res.coef.resize(kx + 1);
  for (int j = 0; j <= kx; ++j) res.coef(j) = beta(j);

  const Eigen::MatrixXd gram_inv =
      (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < n; ++i) {
    meat.noalias() += resid(i) * resid(i) * design.row(i).transpose() * design.row(i);
  }
  const double hc1 = static_cast<double>(n) / (static_cast<double>(n) - k);
  const Eigen::MatrixXd vcov = hc1 * gram_inv * meat * gram_inv;
  res.vcov = vcov.topLeftCorner(kx + 1, kx + 1);
  res.se.resize(kx + 1);
  for (int j = 0; j <= kx; ++j) res.se(j) = std::sqrt(std::max(0.0, vcov(j, j)));
  const double ym = yv.mean();
  const double sst = (yv.array() - ym).square().sum();
  res.r2_full = sst > 0.0 ? 1.0 - resid.squaredNorm() / sst : 0.0;
  res.r2_within = res.r2_full;
  res.demean_converged = true;
  res.cr1_factor = hc1;
  return res;
}

}  // namespace cohortlab
