#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cohortlab/wage_distribution.hpp"

namespace cohortlab {

// True market primitives. Full-time hours are normalized to one, so a job
// paying wage w yields per-period income w full-time and theta*w part-time.
struct SearchEnvironment {
  double beta = 0.95;   // discount factor, in (0,1)
  double b = 0.0;       // flow value of unemployment, wage units
  double theta = 0.5;   // part-time hours ratio, in (0,1)
  WageDistribution wage_dist = WageDistribution::uniform(0.0, 1.0);
  double alpha_true = 0.5;  // per-period offer probability, in [0,1]
  double gamma_true = 0.5;  // part-time share of offers, in [0,1]

  void validate() const;
};

// A worker's subjective offer process. Constant over a search spell.
struct Beliefs {
  double alpha;  // subjective per-period offer probability, in [0,1]
  double gamma;  // subjective part-time share, in [0,1]
  std::string group_label;  // optional tag, e.g. "L" / "H"

  void validate() const;
};

struct SolverOptions {
  // Stop when the fixed-point residual |T(R) - R| falls below tol.
  double tol = 1e-12;
  int max_iterations = 10000;
  // Damping weight on the mapped value; 0 selects the default 1 - beta,
  // under which the iteration is the scalar Bellman update and contracts
  // with modulus at most beta.
  double damping = 0.0;
};

struct ReservationPolicy {
  double reservation_earnings;   // R, income units
  double w_res_fulltime;         // = R
  double w_res_parttime;         // = R / theta
  int solver_iterations;
  double residual;               // final |T(R) - R|
};

// Solves the reservation-earnings fixed point
//   R = b + beta*alpha/(1-beta) * [ S_F(R) - gamma*(S_F(R) - S_P(R)) ]
// with S_F(R) the expected full-time surplus and S_P(R) the expected
// part-time surplus at reservation income R. Throws SolverError on
// non-convergence (carrying the last iterate) and DomainError on invalid
// inputs.
ReservationPolicy solve_reservation_earnings(const SearchEnvironment& env,
                                             const Beliefs& beliefs,
                                             const SolverOptions& opts = {});

// (full-time reservation wage, part-time reservation wage) = (R, R/theta).
std::pair<double, double> reservation_wages(const ReservationPolicy& policy, double theta);

// P(theta*w >= R) = 1 - F(R/theta), evaluated at the solved R.
double acceptance_probability_parttime(const SearchEnvironment& env, const Beliefs& beliefs);

// Per-period exit rate using the TRUE arrival rates and the belief-based R:
//   lambda = alpha* [ gamma*(1 - F(R/theta)) + (1-gamma*)(1 - F(R)) ]
double job_finding_rate(const SearchEnvironment& env, const Beliefs& beliefs);

struct ComparativeStatics {
  double fd_dalpha;        // central finite difference of R in alpha
  double fd_dgamma;
  double analytic_dalpha;  // closed-form derivative assembled at the solution
  double analytic_dgamma;
  double step_alpha;       // steps actually used after clipping
  double step_gamma;
};

// Derivatives of R with respect to beliefs, both by central finite
// differences (step clipped so the evaluation points stay in [0,1]) and
// from the implicit-function formulas
//   dR/dalpha =  beta/(1-beta) * [(1-g) S_F + g S_P] / D
//   dR/dgamma = -beta*alpha/(1-beta) * (S_F - S_P) / D
//   D = 1 + beta*alpha/(1-beta) * [(1-g)(1-F(R)) + g(1-F(R/theta))]
// Requires interior beliefs; throws DomainError otherwise.
ComparativeStatics comparative_statics(const SearchEnvironment& env, const Beliefs& beliefs,
                                       double step = 1e-6);

struct SpellOutcome {
  std::int32_t duration;   // periods until acceptance, >= 1
  bool parttime;           // accepted job type
  double wage;             // accepted wage draw
  double income;           // per-period income at acceptance
};

struct SpellOptions {
  int max_duration = 100000;  // exceeding this raises TruncationError
  int block_size = 4096;      // spells per independent random stream
};

// Monte Carlo realizations of the search process: offers arrive at the
// true rate alpha*, are part-time with probability gamma*, wages are drawn
// from F, and an offer is accepted iff its income weakly clears R.
// Employment is absorbing. Deterministic given (seed, block_size) for any
// threading of the caller.
std::vector<SpellOutcome> simulate_spells(const SearchEnvironment& env, const Beliefs& beliefs,
                                          int n_spells, std::uint64_t seed,
                                          const SpellOptions& opts = {});

struct GroupSolution {
  Beliefs beliefs;
  double reservation_earnings;
  double w_res_parttime;
  double acceptance_parttime;
  double job_finding_rate;
};

struct BeliefGapReport {
  GroupSolution low;    // pessimistic group (alpha_L < alpha_H, gamma_L > gamma_H)
  GroupSolution high;
  bool reservation_low_below_high;   // R_L < R_H
  bool lambda_low_above_high;        // lambda_L > lambda_H
  bool acceptance_low_above_high;    // P_accept_PT(L) > P_accept_PT(H)
};

// Solves both belief groups on a common environment and reports the
// orderings implied by the comparative statics. Requires alpha_L < alpha_H
// and gamma_L > gamma_H strictly.
BeliefGapReport belief_gap_experiment(const SearchEnvironment& env, const Beliefs& beliefs_low,
                                      const Beliefs& beliefs_high);

// Elicited "expected offers out of 10 applications" and "% of offers
// part-time" mapped to per-period beliefs by dividing by 10 resp. 100.
// This /10 convention is a documented calibration choice and is flagged in
// emitted reports.
Beliefs beliefs_from_elicited(double offers_out_of_10, double parttime_pct,
                              const std::string& label);

}  // namespace cohortlab
