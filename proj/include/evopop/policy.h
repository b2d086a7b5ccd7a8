// Copyright 2026 The evopop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EVOPOP_POLICY_H_
#define EVOPOP_POLICY_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace evopop {

// Softmax over preferences, max-shifted. Probabilities are never clamped.
// Throws NumericInputError on non-finite input.
Eigen::VectorXd Softmax(const Eigen::Ref<const Eigen::VectorXd>& theta);

// Unchecked variants for the hot path; theta and out must have equal length.
template <typename Real>
inline void SoftmaxRow(const Real* theta, Real* out, int n);
inline void SoftmaxInto(std::span<const double> theta, std::span<double> out);

// diag(p) - p p^T. Symmetric, rows sum to zero.
Eigen::MatrixXd SoftmaxJacobian(const Eigen::Ref<const Eigen::VectorXd>& p);

// Learner identity of one agent. lookahead_eta is set iff the agent is LOLA.
struct RuleTag {
  enum class Kind { kPg, kLola };

  Kind kind = Kind::kPg;
  std::optional<double> lookahead_eta;

  static RuleTag Pg() { return RuleTag{}; }
  // Throws ParameterDomainError for negative or non-finite eta.
  static RuleTag Lola(double eta);
  // "pg" or "lola" (the CSV label).
  static RuleTag Parse(std::string_view label, double eta);

  bool is_lola() const { return kind == Kind::kLola; }
  double eta() const { return lookahead_eta.value_or(0.0); }
  std::string Label() const { return is_lola() ? "lola" : "pg"; }

  friend bool operator==(const RuleTag&, const RuleTag&) = default;
};

struct RuleShare {
  RuleTag rule;
  double fraction = 0.0;
};
// Ordered: the first entry absorbs the rounding remainder.
using RuleMix = std::vector<RuleShare>;

// N agents, each a row of n preferences, plus the stream that drives all
// stochastic choices (initialisation, then one pairing per step).
class Population {
 public:
  Population(int n_agents, int n_actions, std::uint64_t seed);

  int n_agents() const { return n_agents_; }
  int n_actions() const { return n_actions_; }
  std::uint64_t rng_seed() const { return rng_seed_; }
  std::int64_t step_counter() const { return step_counter_; }
  void advance_step() { ++step_counter_; }

  std::span<double> row(int agent) {
    return {theta_.data() + static_cast<std::size_t>(agent) * n_actions_,
            static_cast<std::size_t>(n_actions_)};
  }
  std::span<const double> row(int agent) const {
    return {theta_.data() + static_cast<std::size_t>(agent) * n_actions_,
            static_cast<std::size_t>(n_actions_)};
  }

  // Row-major N x n.
  std::vector<double>& theta() { return theta_; }
  const std::vector<double>& theta() const { return theta_; }
  std::vector<RuleTag>& rules() { return rules_; }
  const std::vector<RuleTag>& rules() const { return rules_; }
  std::mt19937_64& rng() { return rng_; }
  const std::mt19937_64& rng() const { return rng_; }

  Eigen::VectorXd policy(int agent) const;

  friend bool operator==(const Population&, const Population&) = default;

 private:
  int n_agents_;
  int n_actions_;
  std::uint64_t rng_seed_;
  std::int64_t step_counter_ = 0;
  std::vector<double> theta_;
  std::vector<RuleTag> rules_;
  std::mt19937_64 rng_;
};

// Gaussian preferences around the neutral policy, rule tags by mix.
// Rule counts are round(fraction * N); the first-listed rule takes the
// remainder. Tags are then shuffled with the population stream.
Population InitPopulation(int n_agents, int n_actions, double sigma,
                          const RuleMix& mix, std::uint64_t seed);

// All N x n probabilities, row-major.
std::vector<double> AllPolicies(const Population& pop);

// Compensated sum in agent order.
Eigen::VectorXd MeanPolicy(const Population& pop);
Eigen::VectorXd MeanPolicy(std::span<const double> probs, int n_actions);

// Mean over the agents whose rule matches; empty vector when none do.
Eigen::VectorXd MeanPolicyForRule(std::span<const double> probs, int n_actions,
                                  const std::vector<RuleTag>& rules,
                                  RuleTag::Kind kind);

// Fraction of agents whose total-variation distance to vertex k is at most
// radius, for every k.
Eigen::VectorXd VertexConcentration(std::span<const double> probs, int n_actions,
                                    double radius);

struct SimplexHistogram {
  int n_actions = 0;
  int bins = 0;
  // n = 2: bins entries over P(action 0).
  // n = 3: bins^2 triangular cells, indexed by TriangleCell().
  std::vector<std::int64_t> counts;
};

// Index of the small triangle containing (p0, p1, 1 - p0 - p1) when each
// simplex edge is cut into `bins` segments. Upward cells first, then
// downward ones.
int TriangleCell(double p0, double p1, int bins);

// Throws UnsupportedError for n > 3, ParameterDomainError for bins < 2.
SimplexHistogram ComputeSimplexHistogram(const Population& pop, int bins);
SimplexHistogram ComputeSimplexHistogram(std::span<const double> probs,
                                         int n_actions, int bins);

// ---------------------------------------------------------------------------

template <typename Real>
inline void SoftmaxRow(const Real* theta, Real* out, int n) {
  Real mx = theta[0];
  for (int i = 1; i < n; ++i) mx = theta[i] > mx ? theta[i] : mx;
  Real total = 0;
  for (int i = 0; i < n; ++i) {
    // exp(0) is exactly 1; skipping the call keeps results bitwise equal.
    out[i] = theta[i] == mx ? Real(1) : std::exp(theta[i] - mx);
    total += out[i];
  }
  for (int i = 0; i < n; ++i) out[i] /= total;
}

inline void SoftmaxInto(std::span<const double> theta, std::span<double> out) {
  SoftmaxRow(theta.data(), out.data(), static_cast<int>(theta.size()));
}

}  // namespace evopop

#endif  // EVOPOP_POLICY_H_
