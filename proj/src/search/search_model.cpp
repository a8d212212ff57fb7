#include "cohortlab/search_model.hpp"

#include <algorithm>
#include <cmath>

#include "cohortlab/errors.hpp"

namespace cohortlab {

namespace {

// Right-hand side of the reservation-earnings equation.
double reservation_map(const SearchEnvironment& env, const Beliefs& bel, double r) {
  const double sf = env.wage_dist.surplus_fulltime(r);
  const double sp = env.wage_dist.surplus_parttime(r, env.theta);
  const double scale = env.beta * bel.alpha / (1.0 - env.beta);
  return env.b + scale * (sf - bel.gamma * (sf - sp));
}

}  // namespace

void SearchEnvironment::validate() const {
  if (!(beta > 0.0) || !(beta < 1.0)) throw DomainError("beta must lie in (0,1)");
  if (!(theta > 0.0) || !(theta < 1.0)) throw DomainError("theta must lie in (0,1)");
  if (!(alpha_true >= 0.0) || !(alpha_true <= 1.0)) {
    throw DomainError("alpha_true must lie in [0,1]");
  }
  if (!(gamma_true >= 0.0) || !(gamma_true <= 1.0)) {
    throw DomainError("gamma_true must lie in [0,1]");
  }
  if (!std::isfinite(b)) throw DomainError("b must be finite");
}

void Beliefs::validate() const {
  if (!(alpha >= 0.0) || !(alpha <= 1.0)) throw DomainError("belief alpha must lie in [0,1]");
  if (!(gamma >= 0.0) || !(gamma <= 1.0)) throw DomainError("belief gamma must lie in [0,1]");
}

ReservationPolicy solve_reservation_earnings(const SearchEnvironment& env, const Beliefs& beliefs,
                                             const SolverOptions& opts) {
  env.validate();
  beliefs.validate();

  // Damping 1-beta makes the update
  //   R <- beta*R + (1-beta)*T(R),
  // the scalar Bellman iteration for the unemployment value. Its slope is
  //   beta - beta*alpha*[(1-g)(1-F(R)) + g(1-F(R/theta))],
  // bounded in [beta*(1-alpha), beta], so it contracts for any beta < 1.
  // The undamped map T has slope below -1 when beta*alpha/(1-beta) is
  // large enough, so damping 1.0 is not safe in general.
  const double damping = opts.damping > 0.0 ? opts.damping : 1.0 - env.beta;

  double r = env.b;
  double residual = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const double mapped = reservation_map(env, beliefs, r);
    residual = std::fabs(mapped - r);
    if (residual <= opts.tol) {
      ReservationPolicy policy;
      policy.reservation_earnings = r;
      policy.w_res_fulltime = r;
      policy.w_res_parttime = r / env.theta;
      policy.solver_iterations = it;
      policy.residual = residual;
      return policy;
    }
    r += damping * (mapped - r);
  }
  throw SolverError("reservation-earnings fixed point did not converge: residual " +
                        std::to_string(residual) + " after " +
                        std::to_string(opts.max_iterations) + " iterations",
                    r, opts.max_iterations);
}

std::pair<double, double> reservation_wages(const ReservationPolicy& policy, double theta) {
  if (!(theta > 0.0) || !(theta < 1.0)) throw DomainError("theta must lie in (0,1)");
  return {policy.reservation_earnings, policy.reservation_earnings / theta};
}

double acceptance_probability_parttime(const SearchEnvironment& env, const Beliefs& beliefs) {
  const ReservationPolicy policy = solve_reservation_earnings(env, beliefs);
  return 1.0 - env.wage_dist.cdf(policy.w_res_parttime);
}

double job_finding_rate(const SearchEnvironment& env, const Beliefs& beliefs) {
  const ReservationPolicy policy = solve_reservation_earnings(env, beliefs);
  const double keep_pt = 1.0 - env.wage_dist.cdf(policy.w_res_parttime);
  const double keep_ft = 1.0 - env.wage_dist.cdf(policy.w_res_fulltime);
  return env.alpha_true * (env.gamma_true * keep_pt + (1.0 - env.gamma_true) * keep_ft);
}

ComparativeStatics comparative_statics(const SearchEnvironment& env, const Beliefs& beliefs,
                                       double step) {
  env.validate();
  beliefs.validate();
  if (!(step > 0.0)) throw DomainError("comparative_statics step must be positive");
  if (beliefs.alpha <= 0.0 || beliefs.alpha >= 1.0 || beliefs.gamma <= 0.0 ||
      beliefs.gamma >= 1.0) {
    throw DomainError("comparative_statics requires interior beliefs");
  }

  // Tight solves: the finite difference divides solver error by the step.
  SolverOptions tight;
  tight.tol = 1e-13;
  tight.max_iterations = 100000;

  const double h_alpha = std::min({step, beliefs.alpha, 1.0 - beliefs.alpha});
  const double h_gamma = std::min({step, beliefs.gamma, 1.0 - beliefs.gamma});

  const auto solve_at = [&](double a, double g) {
    Beliefs bel = beliefs;
    bel.alpha = a;
    bel.gamma = g;
    return solve_reservation_earnings(env, bel, tight).reservation_earnings;
  };

  ComparativeStatics cs;
  cs.step_alpha = h_alpha;
  cs.step_gamma = h_gamma;
  cs.fd_dalpha = (solve_at(beliefs.alpha + h_alpha, beliefs.gamma) -
                  solve_at(beliefs.alpha - h_alpha, beliefs.gamma)) /
                 (2.0 * h_alpha);
  cs.fd_dgamma = (solve_at(beliefs.alpha, beliefs.gamma + h_gamma) -
                  solve_at(beliefs.alpha, beliefs.gamma - h_gamma)) /
                 (2.0 * h_gamma);

  const double r = solve_reservation_earnings(env, beliefs, tight).reservation_earnings;
  const double sf = env.wage_dist.surplus_fulltime(r);
  const double sp = env.wage_dist.surplus_parttime(r, env.theta);
  const double keep_ft = 1.0 - env.wage_dist.cdf(r);
  const double keep_pt = 1.0 - env.wage_dist.cdf(r / env.theta);
  const double scale = env.beta * beliefs.alpha / (1.0 - env.beta);
  const double denom =
      1.0 + scale * ((1.0 - beliefs.gamma) * keep_ft + beliefs.gamma * keep_pt);
  cs.analytic_dalpha =
      (env.beta / (1.0 - env.beta)) * ((1.0 - beliefs.gamma) * sf + beliefs.gamma * sp) / denom;
  cs.analytic_dgamma = -scale * (sf - sp) / denom;
  return cs;
}

std::vector<SpellOutcome> simulate_spells(const SearchEnvironment& env, const Beliefs& beliefs,
                                          int n_spells, std::uint64_t seed,
                                          const SpellOptions& opts) {
  if (n_spells < 1) throw DomainError("simulate_spells requires n_spells >= 1");
  if (opts.max_duration < 1 || opts.block_size < 1) {
    throw DomainError("simulate_spells requires positive max_duration and block_size");
  }
  const ReservationPolicy policy = solve_reservation_earnings(env, beliefs);
  const double r = policy.reservation_earnings;

  std::vector<SpellOutcome> out(static_cast<std::size_t>(n_spells));
  const int n_blocks = (n_spells + opts.block_size - 1) / opts.block_size;
  for (int block = 0; block < n_blocks; ++block) {
    RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(block)));
    const int begin = block * opts.block_size;
    const int end = std::min(n_spells, begin + opts.block_size);
    for (int s = begin; s < end; ++s) {
      SpellOutcome spell{};
      for (int t = 1;; ++t) {
        if (t > opts.max_duration) {
          throw TruncationError(
              "spell exceeded max duration " + std::to_string(opts.max_duration) +
                  "; the environment's job-finding rate is zero or vanishingly small",
              opts.max_duration);
        }
        const bool offer = rng.bernoulli(env.alpha_true);
        if (!offer) continue;
        const bool parttime = rng.bernoulli(env.gamma_true);
        const double wage = env.wage_dist.sample(rng);
        const double income = parttime ? env.theta * wage : wage;
        if (income >= r) {  // ties accepted
          spell.duration = t;
          spell.parttime = parttime;
          spell.wage = wage;
          spell.income = income;
          break;
        }
      }
      out[static_cast<std::size_t>(s)] = spell;
    }
  }
  return out;
}

BeliefGapReport belief_gap_experiment(const SearchEnvironment& env, const Beliefs& beliefs_low,
                                      const Beliefs& beliefs_high) {
  beliefs_low.validate();
  beliefs_high.validate();
  if (!(beliefs_low.alpha < beliefs_high.alpha)) {
    throw DomainError("belief_gap_experiment requires alpha_L < alpha_H");
  }
  if (!(beliefs_low.gamma > beliefs_high.gamma)) {
    throw DomainError("belief_gap_experiment requires gamma_L > gamma_H");
  }

  const auto solve_group = [&](const Beliefs& bel) {
    GroupSolution g;
    g.beliefs = bel;
    const ReservationPolicy policy = solve_reservation_earnings(env, bel);
    g.reservation_earnings = policy.reservation_earnings;
    g.w_res_parttime = policy.w_res_parttime;
    g.acceptance_parttime = 1.0 - env.wage_dist.cdf(policy.w_res_parttime);
    const double keep_ft = 1.0 - env.wage_dist.cdf(policy.reservation_earnings);
    g.job_finding_rate = env.alpha_true * (env.gamma_true * g.acceptance_parttime +
                                           (1.0 - env.gamma_true) * keep_ft);
    return g;
  };

  BeliefGapReport report;
  report.low = solve_group(beliefs_low);
  report.high = solve_group(beliefs_high);
  report.reservation_low_below_high =
      report.low.reservation_earnings < report.high.reservation_earnings;
  report.lambda_low_above_high = report.low.job_finding_rate > report.high.job_finding_rate;
  report.acceptance_low_above_high =
      report.low.acceptance_parttime > report.high.acceptance_parttime;
  return report;
}

Beliefs beliefs_from_elicited(double offers_out_of_10, double parttime_pct,
                              const std::string& label) {
  Beliefs bel;
  bel.alpha = offers_out_of_10 / 10.0;
  bel.gamma = parttime_pct / 100.0;
  bel.group_label = label;
  bel.validate();
  return bel;
}

}  // namespace cohortlab
