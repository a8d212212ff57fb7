#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

// Data-parallel primitives for the panel-sized inner loops (reductions,
// residual updates, fixed-effect gather/scatter). Scalar reference
// implementations and an AVX2 variant are built side by side; the active
// variant is chosen once at startup from CPUID, overridable with the
// environment variable COHORTLAB_SIMD=scalar|avx2|auto. Both variants are
// exercised against each other by the kernel equivalence tests.
namespace cohortlab::kernels {

enum class Isa { scalar, avx2 };

// Currently dispatched instruction set.
Isa active_isa();
const char* isa_name(Isa isa);
// True if the CPU (and build) can run the AVX2 variant.
bool avx2_available();
// Force a variant (used by tests); throws DomainError if unavailable.
void force_isa(Isa isa);

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sumsq(const double* x, std::size_t n);
// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// group_sum[gid[i]] += x[i]   (scatter-add; scalar on every ISA because of
// index conflicts, kept here so callers never hand-roll the loop)
void scatter_add(const double* x, const std::int32_t* gid, double* group_sum, std::size_t n);
// group_sum[gid[i]] += x[i] * w[i]
void scatter_add_mul(const double* x, const double* w, const std::int32_t* gid,
                     double* group_sum, std::size_t n);
// x[i] -= g[gid[i]]; returns max |g[gid[i]]| over the rows touched
double gather_subtract(double* x, const std::int32_t* gid, const double* g, std::size_t n);
// x[i] -= g[gid[i]] * t[i]  (group-specific slope removal)
void gather_subtract_mul(double* x, const std::int32_t* gid, const double* g,
                         const double* t, std::size_t n);

// Reference implementations, exported for equivalence testing.
namespace scalar {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sumsq(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double gather_subtract(double* x, const std::int32_t* gid, const double* g, std::size_t n);
void gather_subtract_mul(double* x, const std::int32_t* gid, const double* g,
                         const double* t, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sumsq(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double gather_subtract(double* x, const std::int32_t* gid, const double* g, std::size_t n);
void gather_subtract_mul(double* x, const std::int32_t* gid, const double* g,
                         const double* t, std::size_t n);
}  // namespace avx2
#endif

}  // namespace cohortlab::kernels
