#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cohortlab/kernels.hpp"
#include "cohortlab/rng.hpp"

using namespace cohortlab;

namespace {

std::vector<double> random_vec(RandomStream& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * (rng.u01() - 0.5);
  return v;
}

bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("reduction kernels match the scalar reference on every size") {
  RandomStream rng(20260809);
  // odd lengths cover the vector tails
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 17u, 100u, 1023u, 4096u, 100001u}) {
    auto x = random_vec(rng, n);
    auto y = random_vec(rng, n);
    const double ref_sum = kernels::scalar::sum(x.data(), n);
    const double ref_dot = kernels::scalar::dot(x.data(), y.data(), n);
    const double ref_ssq = kernels::scalar::sumsq(x.data(), n);
    // dispatched variant (whatever the CPU offers)
    CHECK(close_rel(kernels::sum(x.data(), n), ref_sum, 1e-12));
    CHECK(close_rel(kernels::dot(x.data(), y.data(), n), ref_dot, 1e-12));
    CHECK(close_rel(kernels::sumsq(x.data(), n), ref_ssq, 1e-12));
#if defined(__x86_64__)
    if (kernels::avx2_available()) {
      CHECK(close_rel(kernels::avx2::sum(x.data(), n), ref_sum, 1e-12));
      CHECK(close_rel(kernels::avx2::dot(x.data(), y.data(), n), ref_dot, 1e-12));
      CHECK(close_rel(kernels::avx2::sumsq(x.data(), n), ref_ssq, 1e-12));
    }
#endif
  }
}

TEST_CASE("axpy variants agree elementwise") {
  RandomStream rng(7);
  for (std::size_t n : {1u, 5u, 64u, 1001u}) {
    auto x = random_vec(rng, n);
    auto y0 = random_vec(rng, n);
    auto y1 = y0;
    kernels::scalar::axpy(0.37, x.data(), y0.data(), n);
    kernels::axpy(0.37, x.data(), y1.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y0[i] == doctest::Approx(y1[i]).epsilon(1e-14));
#if defined(__x86_64__)
    if (kernels::avx2_available()) {
      auto y2 = random_vec(rng, n);
      auto y3 = y2;
      kernels::scalar::axpy(-1.25, x.data(), y2.data(), n);
      kernels::avx2::axpy(-1.25, x.data(), y3.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y3[i]).epsilon(1e-14));
    }
#endif
  }
}

TEST_CASE("gather/scatter kernels implement the group operations exactly") {
  RandomStream rng(99);
  const std::size_t n = 3333;
  const std::int32_t groups = 17;
  std::vector<std::int32_t> gid(n);
  for (auto& g : gid) g = static_cast<std::int32_t>(rng.uniform_int(groups));
  auto x = random_vec(rng, n);
  auto t = random_vec(rng, n);
  auto gval = random_vec(rng, groups);

  SUBCASE("scatter_add equals a naive accumulation") {
    std::vector<double> got(groups, 0.0), want(groups, 0.0);
    kernels::scatter_add(x.data(), gid.data(), got.data(), n);
    for (std::size_t i = 0; i < n; ++i) want[gid[i]] += x[i];
    for (std::int32_t g = 0; g < groups; ++g) CHECK(got[g] == want[g]);
  }

  SUBCASE("gather_subtract variants agree and report the same max") {
    auto a = x;
    auto b = x;
    const double m0 = kernels::scalar::gather_subtract(a.data(), gid.data(), gval.data(), n);
    const double m1 = kernels::gather_subtract(b.data(), gid.data(), gval.data(), n);
    CHECK(m0 == doctest::Approx(m1).epsilon(1e-15));
    for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == b[i]);
#if defined(__x86_64__)
    if (kernels::avx2_available()) {
      auto c = x;
      const double m2 = kernels::avx2::gather_subtract(c.data(), gid.data(), gval.data(), n);
      CHECK(m0 == doctest::Approx(m2).epsilon(1e-15));
      for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == c[i]);
    }
#endif
  }

  SUBCASE("gather_subtract_mul variants agree") {
    auto a = x;
    auto b = x;
    kernels::scalar::gather_subtract_mul(a.data(), gid.data(), gval.data(), t.data(), n);
    kernels::gather_subtract_mul(b.data(), gid.data(), gval.data(), t.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
  }
}

TEST_CASE("forcing the scalar path works and can be undone") {
  const auto before = kernels::active_isa();
  kernels::force_isa(kernels::Isa::scalar);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  std::vector<double> v{1.0, 2.0, 3.0};
  CHECK(kernels::sum(v.data(), 3) == 6.0);
  kernels::force_isa(before);
}
