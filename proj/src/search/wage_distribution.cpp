#include "cohortlab/wage_distribution.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "cohortlab/errors.hpp"

namespace cohortlab {

namespace {

const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);

using Gauss64 = boost::math::quadrature::gauss<double, 64>;

}  // namespace

WageDistribution WageDistribution::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("uniform wage distribution requires finite support_min < support_max");
  }
  WageDistribution d;
  d.family_ = WageFamily::uniform;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

WageDistribution WageDistribution::truncated_lognormal(double lo, double hi, double mu_log,
                                                       double sigma_log) {
  if (!(lo < hi) || !(lo > 0.0)) {
    throw DomainError("truncated lognormal requires 0 < support_min < support_max");
  }
  if (!(sigma_log > 0.0)) throw DomainError("truncated lognormal requires sigma_log > 0");
  WageDistribution d;
  d.family_ = WageFamily::trunc_lognormal;
  d.lo_ = lo;
  d.hi_ = hi;
  d.mu_log_ = mu_log;
  d.sigma_log_ = sigma_log;
  d.cdf_lo_ = boost::math::cdf(kStdNormal, (std::log(lo) - mu_log) / sigma_log);
  d.cdf_hi_ = boost::math::cdf(kStdNormal, (std::log(hi) - mu_log) / sigma_log);
  if (!(d.cdf_hi_ - d.cdf_lo_ > 0.0)) {
    throw DomainError("truncated lognormal support carries no probability mass");
  }
  return d;
}

double WageDistribution::cdf(double w) const {
  if (w <= lo_) return 0.0;
  if (w >= hi_) return 1.0;
  if (family_ == WageFamily::uniform) return (w - lo_) / (hi_ - lo_);
  const double z = (std::log(w) - mu_log_) / sigma_log_;
  return (boost::math::cdf(kStdNormal, z) - cdf_lo_) / (cdf_hi_ - cdf_lo_);
}

double WageDistribution::pdf(double w) const {
  if (w < lo_ || w > hi_) return 0.0;
  if (family_ == WageFamily::uniform) return 1.0 / (hi_ - lo_);
  const double z = (std::log(w) - mu_log_) / sigma_log_;
  return boost::math::pdf(kStdNormal, z) / (w * sigma_log_ * (cdf_hi_ - cdf_lo_));
}

double WageDistribution::mean() const {
  if (family_ == WageFamily::uniform) return 0.5 * (lo_ + hi_);
  // E[w | lo <= w <= hi] for lognormal via the partial expectation formula.
  const double a = (std::log(lo_) - mu_log_) / sigma_log_;
  const double b = (std::log(hi_) - mu_log_) / sigma_log_;
  const double scale = std::exp(mu_log_ + 0.5 * sigma_log_ * sigma_log_);
  const double num = boost::math::cdf(kStdNormal, b - sigma_log_) -
                     boost::math::cdf(kStdNormal, a - sigma_log_);
  return scale * num / (cdf_hi_ - cdf_lo_);
}

double WageDistribution::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  if (family_ == WageFamily::uniform) return lo_ + u * (hi_ - lo_);
  const double p = cdf_lo_ + u * (cdf_hi_ - cdf_lo_);
  if (p <= 0.0) return lo_;
  if (p >= 1.0) return hi_;
  const double z = boost::math::quantile(kStdNormal, p);
  return std::clamp(std::exp(mu_log_ + sigma_log_ * z), lo_, hi_);
}

double WageDistribution::surplus_fulltime(double reservation) const {
  const double r = reservation;
  if (r >= hi_) return 0.0;
  if (family_ == WageFamily::uniform) {
    // integral over [max(r, lo), hi] of (w - r) / (hi - lo) dw
    if (r <= lo_) return 0.5 * (lo_ + hi_) - r;
    const double width = hi_ - r;
    return 0.5 * width * width / (hi_ - lo_);
  }
  const double a = std::max(r, lo_);
  return Gauss64::integrate([&](double w) { return (w - r) * pdf(w); }, a, hi_);
}

double WageDistribution::surplus_parttime(double reservation, double theta) const {
  if (!(theta > 0.0) || !(theta < 1.0)) {
    throw DomainError("surplus_parttime requires theta in (0,1)");
  }
  const double r = reservation;
  const double cut = r / theta;  // lowest wage whose part-time income covers r
  if (cut >= hi_) return 0.0;
  if (family_ == WageFamily::uniform) {
    // theta * integral over [max(cut, lo), hi] of (w - cut) / (hi - lo) dw
    if (cut <= lo_) return theta * (0.5 * (lo_ + hi_) - cut);
    const double width = hi_ - cut;
    return theta * 0.5 * width * width / (hi_ - lo_);
  }
  const double a = std::max(cut, lo_);
  return Gauss64::integrate([&](double w) { return (theta * w - r) * pdf(w); }, a, hi_);
}

std::string WageDistribution::family_name() const {
  return family_ == WageFamily::uniform ? "uniform" : "trunc_lognormal";
}

}  // namespace cohortlab
