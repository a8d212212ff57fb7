#pragma once

#include <cstddef>
#include <vector>

namespace cohortlab {

double mean_of(const double* x, std::size_t n);
// population (1/n) standard deviation
double sd_pop(const double* x, std::size_t n);
// sample (1/(n-1)) standard deviation
double sd_sample(const double* x, std::size_t n);

inline double mean_of(const std::vector<double>& x) { return mean_of(x.data(), x.size()); }
inline double sd_pop(const std::vector<double>& x) { return sd_pop(x.data(), x.size()); }
inline double sd_sample(const std::vector<double>& x) { return sd_sample(x.data(), x.size()); }

// two-sided p-value of a t statistic with the given degrees of freedom
double t_pvalue(double t_stat, double dof);
// upper-tail p-value of an F statistic
double f_pvalue(double f_stat, double dof1, double dof2);
// standard normal cdf
double normal_cdf(double z);

}  // namespace cohortlab
