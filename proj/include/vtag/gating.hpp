#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace vtag {

// Two-state correct/incorrect chain of the stochastic gate: p is the
// probability of a correct tag given a correct input, q given an incorrect
// input, beta the ground-truth injection probability.
struct ChainSpec {
  double p = 0.0;
  double q = 0.0;
  double beta = 0.0;
  double gamma0 = 0.5;
};

// One recursion step of the correct-tag probability:
//   gamma' = p * (beta + (1-beta) * gamma) + q * (1-beta) * (1-gamma).
double gamma_step(double gamma_prev, const ChainSpec& spec);

// Closed-form equilibrium (p*beta + q*(1-beta)) / (1 - (1-beta)*(p-q)).
// Throws DegeneracyError when the denominator vanishes (every value is then
// a fixed point) and DomainError when |(1-beta)(p-q)| >= 1.
double gamma_fixed_point(const ChainSpec& spec);

struct ChainEstimate {
  double gamma = 0.0;
  double stderr_ = 0.0;
  std::size_t trials = 0;
};

// Samples `trials` independent chains for `steps` steps and averages the
// terminal correctness. The population of chains is advanced jointly with
// exact binomial transition counts, which is distributionally identical to
// per-trial simulation and independent of trial count in cost.
ChainEstimate simulate_chain(const ChainSpec& spec, std::size_t steps,
                             std::size_t trials, std::uint64_t seed);

struct OrderingCell {
  double p = 0.0, q = 0.0, beta = 0.0;
  double gamma_closed = 0.0;
  double gamma_mc = 0.0;
  double stderr_ = 0.0;
  std::string verdict;  // increasing | decreasing | constant | degenerate
};

// Evaluates the closed form and the Monte-Carlo estimate over the grid and
// attaches, per (p, q), the monotonicity verdict of gamma(beta).
std::vector<OrderingCell> ordering_report(const std::vector<double>& ps,
                                          const std::vector<double>& qs,
                                          const std::vector<double>& betas,
                                          std::size_t trials,
                                          std::uint64_t seed,
                                          std::size_t steps = 200);

// CSV with header p,q,beta,gamma_closed,gamma_mc,stderr,verdict.
void write_ordering_csv(std::ostream& out, const std::vector<OrderingCell>& cells);

}  // namespace vtag
