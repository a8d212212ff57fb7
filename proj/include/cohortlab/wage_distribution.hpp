#pragma once

#include <string>

#include "cohortlab/rng.hpp"

namespace cohortlab {

enum class WageFamily { uniform, trunc_lognormal };

// Wage-offer distribution F with support and strictly positive density on
// [support_min, support_max]. The uniform family carries closed-form
// surplus integrals; the truncated-lognormal family evaluates them with
// 64-node Gauss-Legendre quadrature.
class WageDistribution {
 public:
  static WageDistribution uniform(double lo, double hi);
  // Lognormal(mu_log, sigma_log) conditioned on [lo, hi].
  static WageDistribution truncated_lognormal(double lo, double hi, double mu_log,
                                              double sigma_log);

  WageFamily family() const { return family_; }
  double support_min() const { return lo_; }
  double support_max() const { return hi_; }
  double mu_log() const { return mu_log_; }
  double sigma_log() const { return sigma_log_; }

  double cdf(double w) const;
  double pdf(double w) const;
  double mean() const;
  // Inverse CDF; u in [0, 1].
  double quantile(double u) const;
  double sample(RandomStream& rng) const { return quantile(rng.u01()); }

  // surplus_fulltime(R)       = integral over [R, w_max] of (w - R) dF(w)
  // surplus_parttime(R,theta) = integral over [R/theta, w_max] of (theta*w - R) dF(w)
  // Both are non-negative, non-increasing in R, and zero once the lower
  // limit clears the support.
  double surplus_fulltime(double reservation) const;
  double surplus_parttime(double reservation, double theta) const;

  std::string family_name() const;

 private:
  WageDistribution() = default;

  WageFamily family_ = WageFamily::uniform;
  double lo_ = 0.0;
  double hi_ = 1.0;
  double mu_log_ = 0.0;
  double sigma_log_ = 1.0;
  // cached lognormal truncation constants
  double cdf_lo_ = 0.0;
  double cdf_hi_ = 1.0;
};

}  // namespace cohortlab
