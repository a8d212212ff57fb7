#include <cmath>

#include "cohortlab/kernels.hpp"

namespace cohortlab::kernels::scalar {

double sum(const double* x, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i];
    s1 += x[i + 1];
    s2 += x[i + 2];
    s3 += x[i + 3];
  }
  for (; i < n; ++i) s0 += x[i];
  return (s0 + s1) + (s2 + s3);
}

double dot(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

double sumsq(const double* x, std::size_t n) { return dot(x, x, n); }

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double gather_subtract(double* x, const std::int32_t* gid, const double* g, std::size_t n) {
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = g[gid[i]];
    x[i] -= v;
    max_abs = std::max(max_abs, std::fabs(v));
  }
  return max_abs;
}

void gather_subtract_mul(double* x, const std::int32_t* gid, const double* g,
                         const double* t, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] -= g[gid[i]] * t[i];
}

}  // namespace cohortlab::kernels::scalar
