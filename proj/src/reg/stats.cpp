#include "cohortlab/stats.hpp"

#include <cmath>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "cohortlab/kernels.hpp"

namespace cohortlab {

double mean_of(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  return kernels::sum(x, n) / static_cast<double>(n);
}

double sd_pop(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  const double m = mean_of(x, n);
  const double ss = kernels::sumsq(x, n);
  const double var = ss / n - m * m;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

double sd_sample(const double* x, std::size_t n) {
  if (n < 2) return 0.0;
  const double m = mean_of(x, n);
  const double ss = kernels::sumsq(x, n);
  const double var = (ss - n * m * m) / (n - 1);
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

double t_pvalue(double t_stat, double dof) {
  if (!std::isfinite(t_stat)) return 0.0;
  const boost::math::students_t_distribution<double> dist(dof);
  return 2.0 * boost::math::cdf(dist, -std::fabs(t_stat));
}

double f_pvalue(double f_stat, double dof1, double dof2) {
  if (!std::isfinite(f_stat)) return 0.0;
  if (f_stat <= 0.0) return 1.0;
  const boost::math::fisher_f_distribution<double> dist(dof1, dof2);
  return boost::math::cdf(boost::math::complement(dist, f_stat));
}

double normal_cdf(double z) {
  static const boost::math::normal_distribution<double> dist(0.0, 1.0);
  return boost::math::cdf(dist, z);
}

}  // namespace cohortlab
