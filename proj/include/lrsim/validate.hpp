#pragma once

// Invariant suites shared by `lrsim validate` and the acceptance binary.
// Each suite returns its measured values next to the pass/fail flag.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lrsim {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::vector<std::pair<std::string, double>> measured;
  std::string detail;

  double value(const std::string& key) const;
};

struct SmallBallParams {
  int d = 2;
  int rank = 1;
  double epsilon = 0.25;
  double eta = 0.25;
  long draws = 10'000'000;
  double z = 3.0;  // one-sided Wilson lower bound at z standard deviations
  std::uint64_t seed = 11;
};

/// Prior mass of {|sqrt(gamma_i) - Lambda_i| <= eps for all i,
/// ||u_j - U_j|| <= eta for j <= r} against the bound eta^{r(d-1)} / 2^{4rd}.
/// The target (U, Lambda) is drawn once from the prior, conditioned on
/// effective rank r at threshold eps, with Lambda sorted decreasingly.
SuiteResult small_ball_suite(const SmallBallParams& p);

struct PythagorasParams {
  int pairs = 20;
  int n_mc = 1'000'000;
  int d = 3;
  double sigma = 0.5;
  double tolerance = 6.0;  // in standard errors
  std::uint64_t seed = 12;
};

/// Random (B, f) prior draws against a rank-1 Sobolev truth.
SuiteResult pythagoras_suite(const PythagorasParams& p);

struct DetailedBalanceParams {
  long steps = 10'000'000;
  double tolerance = 1e-2;
  /// Ratio between the most and least likely toy states; fixes lambda.
  double target_spread = 5.0;
  bool inject_bug = false;
  std::uint64_t seed = 13;
};

/// Nine-state toy: d = 2, eigenvector angle in {0, pi/3, 2pi/3}, second
/// coefficient in {-0.5, 0.25, 0.75}, gamma = (1, 0), beta_1 = 0. Proposals
/// are uniform over the other states and accepted with metropolis_accept.
/// Flow asymmetry of a pair is |pi_i P_ij - pi_j P_ji| with the exact target pi
/// and the empirical kernel P.
SuiteResult detailed_balance_suite(const DetailedBalanceParams& p);

struct OracleParams {
  long iterations = 100'000;  // per chain
  int chains = 4;
  double tolerance = 3.0;     // in combined standard errors
  std::uint64_t seed = 14;
};

/// d = 1, M = 1 (posterior mean of beta_1) and a d = 2, M <= 2 toy
/// (posterior mean of r_n), chain against the quadrature oracle.
SuiteResult oracle_suite(const OracleParams& p);

struct PriorRecoveryParams {
  long draws = 100'000;  // thinned chain draws, all chains together
  int chains = 4;
  long thin = 50;
  int d = 3;
  int prior_n = 10;
  double level = 0.05;
  std::uint64_t seed = 15;
};

/// lambda = 0: chain marginals of M, max gamma_i and ||beta||_2 against
/// direct prior draws (chi-square and two-sample KS tests).
SuiteResult prior_recovery_suite(const PriorRecoveryParams& p);

std::string suites_to_json(const std::vector<SuiteResult>& suites);
std::string format_suite_line(const SuiteResult& s);

}  // namespace lrsim
