#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cohortlab/errors.hpp"
#include "cohortlab/search_model.hpp"
#include "oracles.hpp"

using namespace cohortlab;

namespace {

SearchEnvironment make_env(double beta, double b, double theta, double alpha_true = 0.5,
                           double gamma_true = 0.5) {
  SearchEnvironment env{beta, b, theta, WageDistribution::uniform(0.0, 1.0), alpha_true,
                        gamma_true};
  return env;
}

// Root of 4.5 R^2 - 10 R + 4.5 = 0 in [0,1]: the gamma=0 reservation wage
// for beta=0.9, b=0, uniform wages on [0,1].
const double kQuadraticRoot = (10.0 - std::sqrt(19.0)) / 9.0;

}  // namespace

TEST_CASE("alpha = 0 kills the surplus term: R = b exactly") {
  const auto env = make_env(0.95, 0.3, 0.5);
  const auto policy = solve_reservation_earnings(env, Beliefs{0.0, 0.4, ""});
  CHECK(std::fabs(policy.reservation_earnings - 0.3) <= 1e-9);
  CHECK(policy.residual <= 1e-12);
}

TEST_CASE("vanishing discount factor annihilates the continuation value") {
  const auto env = make_env(1e-12, 0.3, 0.5);
  const auto policy = solve_reservation_earnings(env, Beliefs{0.5, 0.5, ""});
  CHECK(std::fabs(policy.reservation_earnings - 0.3) <= 1e-9);
}

TEST_CASE("gamma = 0 reduces to the single-type quadratic") {
  const auto env = make_env(0.9, 0.0, 0.5);
  const auto policy = solve_reservation_earnings(env, Beliefs{1.0, 0.0, ""});
  CHECK(policy.reservation_earnings == doctest::Approx(kQuadraticRoot).epsilon(1e-8));
  // value-iteration oracle confirms
  const double vi = oracles::value_iteration_reservation(env, Beliefs{1.0, 0.0, ""});
  CHECK(std::fabs(policy.reservation_earnings - vi) <= 1e-4);
}

TEST_CASE("fixed point matches the value-iteration oracle on the spec point") {
  const auto env = make_env(0.95, 0.2, 0.5);
  const Beliefs bel{0.5, 0.5, ""};
  const auto policy = solve_reservation_earnings(env, bel);
  const double vi = oracles::value_iteration_reservation(env, bel);
  CHECK(std::fabs(policy.reservation_earnings - vi) <= 1e-4);
}

TEST_CASE("oracle equivalence on randomized environments") {
  RandomStream rng(123456);
  for (int k = 0; k < 20; ++k) {
    const double lo = 0.3 * rng.u01();
    const double hi = 0.8 + 0.7 * rng.u01();
    SearchEnvironment env{0.5 + 0.49 * rng.u01(),
                          0.5 * rng.u01(),
                          0.2 + 0.7 * rng.u01(),
                          WageDistribution::uniform(lo, hi),
                          1.0,
                          0.5};
    const Beliefs bel{0.05 + 0.95 * rng.u01(), rng.u01(), ""};
    const auto policy = solve_reservation_earnings(env, bel);
    const double vi = oracles::value_iteration_reservation(env, bel);
    CAPTURE(k);
    CHECK(std::fabs(policy.reservation_earnings - vi) <= 1e-4);
  }
}

TEST_CASE("returned R reproduces itself through the reservation map") {
  // invariant: residual below tolerance at the returned iterate
  const auto env = make_env(0.99, 0.25, 0.4);
  const Beliefs bel{0.8, 0.6, ""};
  const auto policy = solve_reservation_earnings(env, bel);
  const double sf = env.wage_dist.surplus_fulltime(policy.reservation_earnings);
  const double sp = env.wage_dist.surplus_parttime(policy.reservation_earnings, env.theta);
  const double mapped = env.b + env.beta * bel.alpha / (1.0 - env.beta) *
                                    (sf - bel.gamma * (sf - sp));
  CHECK(std::fabs(mapped - policy.reservation_earnings) <= 1e-12);
}

TEST_CASE("reservation wages follow (R, R/theta)") {
  ReservationPolicy p{};
  p.reservation_earnings = 0.6;
  auto [ft, pt] = reservation_wages(p, 0.5);
  CHECK(ft == 0.6);
  CHECK(pt == 1.2);
  p.reservation_earnings = 0.0;
  std::tie(ft, pt) = reservation_wages(p, 0.9);
  CHECK(ft == 0.0);
  CHECK(pt == 0.0);
  CHECK_THROWS_AS(reservation_wages(p, 1.0), DomainError);
}

TEST_CASE("part-time acceptance probability endpoints") {
  SUBCASE("R/theta beyond the support: zero acceptance") {
    const auto env = make_env(0.9, 0.0, 0.5);
    CHECK(acceptance_probability_parttime(env, Beliefs{1.0, 0.0, ""}) == 0.0);
  }
  SUBCASE("R below theta * w_min: every part-time offer clears the bar") {
    SearchEnvironment env{0.1, 0.0, 0.5, WageDistribution::uniform(1.0, 2.0), 0.5, 0.5};
    CHECK(acceptance_probability_parttime(env, Beliefs{0.5, 0.5, ""}) == 1.0);
    // and the job-finding rate equals alpha* in the same environment
    CHECK(job_finding_rate(env, Beliefs{0.5, 0.5, ""}) == doctest::Approx(0.5));
  }
}

TEST_CASE("job-finding rate on the quadratic environment") {
  auto env = make_env(0.9, 0.0, 0.5, 0.6, 0.5);
  const double lambda = job_finding_rate(env, Beliefs{1.0, 0.0, ""});
  const double want = 0.6 * (0.5 * 0.0 + 0.5 * (1.0 - kQuadraticRoot));
  CHECK(lambda == doctest::Approx(want).epsilon(1e-7));
}

TEST_CASE("b above the wage ceiling yields lambda = 0") {
  SearchEnvironment env{0.9, 2.5, 0.5, WageDistribution::uniform(1.0, 2.0), 0.7, 0.5};
  CHECK(job_finding_rate(env, Beliefs{0.6, 0.5, ""}) == 0.0);
}

TEST_CASE("comparative statics: finite differences meet the analytic formulas") {
  const auto env = make_env(0.95, 0.2, 0.5);
  const auto cs = comparative_statics(env, Beliefs{0.5, 0.5, ""});
  CHECK(cs.analytic_dalpha > 0.0);
  CHECK(cs.analytic_dgamma < 0.0);
  CHECK(std::fabs(cs.fd_dalpha - cs.analytic_dalpha) <=
        1e-4 * std::max(1e-8, std::fabs(cs.analytic_dalpha)));
  CHECK(std::fabs(cs.fd_dgamma - cs.analytic_dgamma) <=
        1e-4 * std::max(1e-8, std::fabs(cs.analytic_dgamma)));
}

TEST_CASE("comparative statics: alpha near zero flattens the gamma response") {
  const auto env = make_env(0.95, 0.2, 0.5);
  const auto cs = comparative_statics(env, Beliefs{1e-4, 0.5, ""});
  CHECK(std::fabs(cs.analytic_dgamma) < 1e-3);
  CHECK(std::fabs(cs.fd_dgamma) < 1e-3);
}

TEST_CASE("comparative statics require interior beliefs") {
  const auto env = make_env(0.9, 0.2, 0.5);
  CHECK_THROWS_AS(comparative_statics(env, Beliefs{0.0, 0.5, ""}), DomainError);
  CHECK_THROWS_AS(comparative_statics(env, Beliefs{0.5, 1.0, ""}), DomainError);
}

TEST_CASE("signs hold across a reduced sweep grid") {
  // the full 729-point grid runs in the acceptance suite
  for (double beta : {0.5, 0.9}) {
    for (double theta : {0.3, 0.8}) {
      const auto env = make_env(beta, 0.2, theta);
      for (double a = 0.1; a <= 0.91; a += 0.2) {
        for (double g = 0.1; g <= 0.91; g += 0.2) {
          const auto cs = comparative_statics(env, Beliefs{a, g, ""});
          CAPTURE(beta);
          CAPTURE(theta);
          CAPTURE(a);
          CAPTURE(g);
          CHECK(cs.fd_dalpha > 0.0);
          CHECK(cs.fd_dgamma < 0.0);
          CHECK(std::fabs(cs.fd_dalpha - cs.analytic_dalpha) <=
                1e-4 * std::max(1e-8, std::fabs(cs.analytic_dalpha)));
          CHECK(std::fabs(cs.fd_dgamma - cs.analytic_dgamma) <=
                1e-4 * std::max(1e-8, std::fabs(cs.analytic_dgamma)));
        }
      }
    }
  }
}

TEST_CASE("raising b weakly raises R") {
  const Beliefs bel{0.6, 0.4, ""};
  double prev = -1e300;
  for (double b = 0.0; b <= 0.8; b += 0.05) {
    const auto env = make_env(0.9, b, 0.5);
    const double r = solve_reservation_earnings(env, bel).reservation_earnings;
    CHECK(r >= prev - 1e-10);
    CHECK(r >= b - 1e-12);  // R >= b always
    prev = r;
  }
}

TEST_CASE("spell simulation: all offers accepted gives geometric durations") {
  SearchEnvironment env{0.1, 0.0, 0.5, WageDistribution::uniform(1.0, 2.0), 0.3, 0.5};
  const auto spells = simulate_spells(env, Beliefs{0.5, 0.5, ""}, 100000, 77);
  double total = 0.0;
  for (const auto& s : spells) {
    CHECK(s.duration >= 1);
    CHECK(s.income >= 0.5);  // R is tiny; every accepted income clears it
    total += s.duration;
  }
  const double mean = total / spells.size();
  const double want = 1.0 / 0.3;
  const double se = std::sqrt((1.0 - 0.3) / (0.3 * 0.3) / spells.size());
  CHECK(std::fabs(mean - want) <= 3.0 * se);
}

TEST_CASE("spell simulation matches the analytic exit hazard") {
  SearchEnvironment env{0.9, 0.0, 0.5, WageDistribution::uniform(0.0, 1.0), 0.6, 0.5};
  const Beliefs bel{1.0, 0.0, ""};
  const double lambda = job_finding_rate(env, bel);
  const auto spells = simulate_spells(env, bel, 100000, 2024);
  const double r = solve_reservation_earnings(env, bel).reservation_earnings;
  double person_periods = 0.0;
  for (const auto& s : spells) {
    person_periods += s.duration;
    CHECK(s.income >= r);  // accepted income weakly clears R
    CHECK_FALSE(s.parttime);  // gamma=0 beliefs push R/theta past the support
  }
  const double hazard = spells.size() / person_periods;
  const double se = std::sqrt(lambda * (1.0 - lambda) / person_periods);
  CHECK(std::fabs(hazard - lambda) <= 3.0 * se);
}

TEST_CASE("spell simulation is deterministic given the seed") {
  const auto env = make_env(0.9, 0.1, 0.5, 0.4, 0.6);
  const Beliefs bel{0.5, 0.5, ""};
  const auto a = simulate_spells(env, bel, 5000, 99);
  const auto b = simulate_spells(env, bel, 5000, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].duration == b[i].duration);
    CHECK(a[i].wage == b[i].wage);
  }
  // block independence: the first block is unchanged by asking for fewer spells
  const auto c = simulate_spells(env, bel, 1000, 99);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(a[i].duration == c[i].duration);
}

TEST_CASE("lambda = 0 environments refuse with a truncation error") {
  SearchEnvironment env{0.9, 2.5, 0.5, WageDistribution::uniform(1.0, 2.0), 0.7, 0.5};
  SpellOptions opts;
  opts.max_duration = 2000;
  CHECK_THROWS_AS(simulate_spells(env, Beliefs{0.6, 0.5, ""}, 3, 1, opts), TruncationError);
}

TEST_CASE("belief-gap experiment under the elicited-beliefs calibration") {
  SearchEnvironment env{0.95, 0.2, 0.7, WageDistribution::uniform(0.0, 1.0), 0.3365, 0.5442};
  const auto low = beliefs_from_elicited(3.206, 57.64, "L");
  const auto high = beliefs_from_elicited(3.524, 51.19, "H");
  CHECK(low.alpha == doctest::Approx(0.3206));
  CHECK(low.gamma == doctest::Approx(0.5764));
  CHECK(high.alpha == doctest::Approx(0.3524));
  CHECK(high.gamma == doctest::Approx(0.5119));

  const auto report = belief_gap_experiment(env, low, high);
  CHECK(report.reservation_low_below_high);  // R_L < R_H
  CHECK(report.lambda_low_above_high);       // lambda_L > lambda_H
  CHECK(report.acceptance_low_above_high);   // sign of the 67.43 vs 60.39 gap
  CHECK(report.low.reservation_earnings < report.high.reservation_earnings);
  CHECK(report.low.acceptance_parttime > 0.0);
}

TEST_CASE("acceptance ordering holds across a sweep of ordered belief pairs") {
  // corollary of the comparative statics: whenever alpha_L < alpha_H and
  // gamma_L > gamma_H, the pessimistic group accepts part-time work at
  // least as often, strictly when any part-time offer is acceptable
  int strict = 0;
  for (double beta : {0.9, 0.95}) {
    const auto env =
        SearchEnvironment{beta, 0.2, 0.7, WageDistribution::uniform(0.0, 1.0), 0.4, 0.5};
    for (double a_low = 0.15; a_low <= 0.65; a_low += 0.1) {
      for (double gap = 0.05; gap <= 0.25; gap += 0.1) {
        const Beliefs low{a_low, 0.6, "L"};
        const Beliefs high{a_low + gap, 0.6 - gap, "H"};
        const double acc_low = acceptance_probability_parttime(env, low);
        const double acc_high = acceptance_probability_parttime(env, high);
        CAPTURE(beta);
        CAPTURE(a_low);
        CAPTURE(gap);
        CHECK(acc_low >= acc_high);
        if (acc_low > acc_high) ++strict;
        // lambda stays within [0, alpha*]
        const double lambda = job_finding_rate(env, low);
        CHECK(lambda >= 0.0);
        CHECK(lambda <= env.alpha_true + 1e-12);
      }
    }
  }
  CHECK(strict > 0);
}

TEST_CASE("belief-gap experiment rejects non-ordered beliefs") {
  const auto env = make_env(0.95, 0.2, 0.7);
  const Beliefs same{0.4, 0.5, ""};
  CHECK_THROWS_AS(belief_gap_experiment(env, same, same), DomainError);
  CHECK_THROWS_AS(belief_gap_experiment(env, Beliefs{0.5, 0.6, ""}, Beliefs{0.6, 0.7, ""}),
                  DomainError);
}

TEST_CASE("solver failure carries the last iterate") {
  const auto env = make_env(0.99, 0.2, 0.5);
  SolverOptions opts;
  opts.max_iterations = 3;  // nowhere near enough at beta = 0.99
  try {
    solve_reservation_earnings(env, Beliefs{0.8, 0.5, ""}, opts);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.iterations() == 3);
    CHECK(e.last_iterate() > 0.2);  // moved off R0 = b toward the fixed point
    CHECK(std::isfinite(e.last_iterate()));
  }
}

TEST_CASE("invalid environments and beliefs are rejected") {
  auto env = make_env(0.9, 0.2, 0.5);
  env.beta = 1.0;
  CHECK_THROWS_AS(solve_reservation_earnings(env, Beliefs{0.5, 0.5, ""}), DomainError);
  env = make_env(0.9, 0.2, 0.5);
  CHECK_THROWS_AS(solve_reservation_earnings(env, Beliefs{1.5, 0.5, ""}), DomainError);
}
