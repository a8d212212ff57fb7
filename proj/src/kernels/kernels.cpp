#include "cohortlab/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "cohortlab/errors.hpp"

namespace cohortlab::kernels {

namespace {

struct Dispatch {
  Isa isa;
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*gather_subtract)(double*, const std::int32_t*, const double*, std::size_t);
  void (*gather_subtract_mul)(double*, const std::int32_t*, const double*, const double*,
                              std::size_t);
};

constexpr Dispatch kScalar{Isa::scalar,       scalar::sum,
                           scalar::dot,       scalar::sumsq,
                           scalar::axpy,      scalar::gather_subtract,
                           scalar::gather_subtract_mul};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Dispatch kAvx2{Isa::avx2,         avx2::sum,
                         avx2::dot,         avx2::sumsq,
                         avx2::axpy,        avx2::gather_subtract,
                         avx2::gather_subtract_mul};
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Dispatch select_initial() {
  const char* env = std::getenv("COHORTLAB_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return kScalar;
#if defined(__x86_64__) || defined(_M_X64)
  if (env != nullptr && std::strcmp(env, "avx2") == 0) {
    if (!cpu_has_avx2()) throw DomainError("COHORTLAB_SIMD=avx2 but the CPU lacks AVX2/FMA");
    return kAvx2;
  }
  if (cpu_has_avx2()) return kAvx2;
#endif
  return kScalar;
}

Dispatch& active() {
  static Dispatch d = select_initial();
  return d;
}

}  // namespace

Isa active_isa() { return active().isa; }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_available() { return cpu_has_avx2(); }

void force_isa(Isa isa) {
  if (isa == Isa::scalar) {
    active() = kScalar;
    return;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (!cpu_has_avx2()) throw DomainError("AVX2 kernels unavailable on this CPU");
  active() = kAvx2;
#else
  throw DomainError("AVX2 kernels unavailable on this architecture");
#endif
}

double sum(const double* x, std::size_t n) { return active().sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
double sumsq(const double* x, std::size_t n) { return active().sumsq(x, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }

void scatter_add(const double* x, const std::int32_t* gid, double* group_sum, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) group_sum[gid[i]] += x[i];
}

void scatter_add_mul(const double* x, const double* w, const std::int32_t* gid,
                     double* group_sum, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) group_sum[gid[i]] += x[i] * w[i];
}

double gather_subtract(double* x, const std::int32_t* gid, const double* g, std::size_t n) {
  return active().gather_subtract(x, gid, g, n);
}

void gather_subtract_mul(double* x, const std::int32_t* gid, const double* g, const double* t,
                         std::size_t n) {
  active().gather_subtract_mul(x, gid, g, t, n);
}

}  // namespace cohortlab::kernels
