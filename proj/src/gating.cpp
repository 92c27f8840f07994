#include "vtag/gating.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "vtag/errors.hpp"
#include "vtag/rng.hpp"

namespace vtag {

namespace {

void validate(const ChainSpec& spec) {
  if (spec.p < 0.0 || spec.p > 1.0 || spec.q < 0.0 || spec.q > 1.0)
    throw DomainError("chain spec: p and q must lie in [0, 1]");
  if (spec.beta < 0.0 || spec.beta > 1.0)
    throw DomainError("chain spec: beta must lie in [0, 1]");
  if (spec.gamma0 < 0.0 || spec.gamma0 > 1.0)
    throw DomainError("chain spec: gamma0 must lie in [0, 1]");
}

}  // namespace

double gamma_step(double gamma_prev, const ChainSpec& spec) {
  validate(spec);
  if (gamma_prev < 0.0 || gamma_prev > 1.0)
    throw DomainError("gamma_step: gamma_prev must lie in [0, 1]");
  const double correct_in = spec.beta + (1.0 - spec.beta) * gamma_prev;
  const double incorrect_in = (1.0 - spec.beta) * (1.0 - gamma_prev);
  return spec.p * correct_in + spec.q * incorrect_in;
}

double gamma_fixed_point(const ChainSpec& spec) {
  validate(spec);
  const double contraction = (1.0 - spec.beta) * (spec.p - spec.q);
  const double denom = 1.0 - contraction;
  if (denom == 0.0)
    throw DegeneracyError(
        "gamma_fixed_point: denominator vanishes; every value is a fixed point");
  if (std::abs(contraction) >= 1.0)
    throw DomainError("gamma_fixed_point: |(1-beta)(p-q)| must be < 1");
  return (spec.p * spec.beta + spec.q * (1.0 - spec.beta)) / denom;
}

ChainEstimate simulate_chain(const ChainSpec& spec, std::size_t steps,
                             std::size_t trials, std::uint64_t seed) {
  validate(spec);
  if (trials == 0) throw DomainError("simulate_chain: trials must be >= 1");

  Rng rng(seed);
  auto binomial = [&rng](std::uint64_t n, double prob) -> std::uint64_t {
    if (n == 0 || prob <= 0.0) return 0;
    if (prob >= 1.0) return n;
    std::binomial_distribution<std::uint64_t> dist(n, prob);
    return dist(rng);
  };

  // Initial correctness per trial: Bernoulli(gamma0) across the population.
  std::uint64_t correct = binomial(trials, spec.gamma0);
  for (std::size_t t = 0; t < steps; ++t) {
    // Inputs: previously-correct trials feed a correct tag surely; the rest
    // only when the gate injects the ground truth.
    const std::uint64_t injected = binomial(trials - correct, spec.beta);
    const std::uint64_t correct_inputs = correct + injected;
    correct = binomial(correct_inputs, spec.p) +
              binomial(trials - correct_inputs, spec.q);
  }

  ChainEstimate est;
  est.trials = trials;
  est.gamma = static_cast<double>(correct) / static_cast<double>(trials);
  est.stderr_ =
      std::sqrt(est.gamma * (1.0 - est.gamma) / static_cast<double>(trials));
  return est;
}

std::vector<OrderingCell> ordering_report(const std::vector<double>& ps,
                                          const std::vector<double>& qs,
                                          const std::vector<double>& betas,
                                          std::size_t trials,
                                          std::uint64_t seed,
                                          std::size_t steps) {
  std::vector<OrderingCell> cells;
  std::uint64_t cell_index = 0;
  for (double p : ps) {
    for (double q : qs) {
      // Monotonicity of gamma(beta) over this (p, q) from the closed form.
      std::string verdict;
      std::vector<double> closed(betas.size());
      bool degenerate = false;
      for (std::size_t i = 0; i < betas.size(); ++i) {
        ChainSpec spec{p, q, betas[i], 0.5};
        try {
          closed[i] = gamma_fixed_point(spec);
        } catch (const DegeneracyError&) {
          degenerate = true;
        } catch (const DomainError&) {
          degenerate = true;
        }
      }
      if (degenerate) {
        verdict = "degenerate";
      } else if (p > q) {
        verdict = "increasing";
      } else if (p < q) {
        verdict = "decreasing";
      } else {
        verdict = "constant";
      }

      for (std::size_t i = 0; i < betas.size(); ++i) {
        OrderingCell cell;
        cell.p = p;
        cell.q = q;
        cell.beta = betas[i];
        cell.verdict = verdict;
        if (!degenerate) {
          cell.gamma_closed = closed[i];
          ChainSpec spec{p, q, betas[i], 0.5};
          ChainEstimate est =
              simulate_chain(spec, steps, trials, derive_seed(seed, cell_index));
          cell.gamma_mc = est.gamma;
          cell.stderr_ = est.stderr_;
        }
        ++cell_index;
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

void write_ordering_csv(std::ostream& out, const std::vector<OrderingCell>& cells) {
  out << "p,q,beta,gamma_closed,gamma_mc,stderr,verdict\n";
  char buf[256];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof(buf), "%.4g,%.4g,%.4g,%.12g,%.12g,%.6g,%s\n",
                  c.p, c.q, c.beta, c.gamma_closed, c.gamma_mc, c.stderr_,
                  c.verdict.c_str());
    out << buf;
  }
}

}  // namespace vtag
