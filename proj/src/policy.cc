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

#include "evopop/policy.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "evopop/errors.h"

namespace evopop {
namespace {

constexpr double kMixTolerance = 1e-9;

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void Add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double Value() const { return sum + carry; }
};

}  // namespace

Eigen::VectorXd Softmax(const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() == 0) throw ShapeError("softmax of an empty vector");
  if (!theta.allFinite()) throw NumericInputError("softmax input is not finite");
  Eigen::VectorXd out(theta.size());
  SoftmaxInto({theta.data(), static_cast<std::size_t>(theta.size())},
              {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

Eigen::MatrixXd SoftmaxJacobian(const Eigen::Ref<const Eigen::VectorXd>& p) {
  Eigen::MatrixXd j = -p * p.transpose();
  j.diagonal() += p;
  return j;
}

RuleTag RuleTag::Lola(double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ParameterDomainError("LOLA look-ahead rate must be finite and >= 0, got " +
                               std::to_string(eta));
  }
  RuleTag tag;
  tag.kind = Kind::kLola;
  tag.lookahead_eta = eta;
  return tag;
}

RuleTag RuleTag::Parse(std::string_view label, double eta) {
  if (label == "pg") return Pg();
  if (label == "lola") return Lola(eta);
  throw ParameterDomainError("unknown learning rule '" + std::string(label) +
                             "' (expected pg or lola)");
}

Population::Population(int n_agents, int n_actions, std::uint64_t seed)
    : n_agents_(n_agents),
      n_actions_(n_actions),
      rng_seed_(seed),
      rng_(seed) {
  if (n_agents < 2 || n_agents % 2 != 0) {
    throw PopulationSizeError("population size must be even and >= 2, got " +
                              std::to_string(n_agents));
  }
  if (n_actions < 2) throw ShapeError("need at least 2 actions");
  theta_.assign(static_cast<std::size_t>(n_agents) * n_actions, 0.0);
  rules_.assign(static_cast<std::size_t>(n_agents), RuleTag::Pg());
}

Eigen::VectorXd Population::policy(int agent) const {
  Eigen::VectorXd p(n_actions_);
  SoftmaxInto(row(agent), {p.data(), static_cast<std::size_t>(n_actions_)});
  return p;
}

Population InitPopulation(int n_agents, int n_actions, double sigma,
                          const RuleMix& mix, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterDomainError("init sigma must be finite and >= 0");
  }
  if (mix.empty()) throw MixError("rule mix is empty");
  double total = 0.0;
  for (const auto& share : mix) {
    if (!(share.fraction >= 0.0)) {
      throw MixError("rule fraction for '" + share.rule.Label() + "' is negative");
    }
    total += share.fraction;
  }
  if (std::abs(total - 1.0) > kMixTolerance) {
    throw MixError("rule fractions sum to " + std::to_string(total) +
                   ", expected 1");
  }

  Population pop(n_agents, n_actions, seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& t : pop.theta()) t = sigma * normal(pop.rng());

  std::vector<std::int64_t> counts;
  std::int64_t assigned = 0;
  for (const auto& share : mix) {
    counts.push_back(std::llround(share.fraction * n_agents));
    assigned += counts.back();
  }
  counts.front() += n_agents - assigned;
  if (counts.front() < 0) throw MixError("rule counts exceed population size");

  auto& rules = pop.rules();
  std::size_t pos = 0;
  for (std::size_t k = 0; k < mix.size(); ++k) {
    for (std::int64_t c = 0; c < counts[k]; ++c) rules[pos++] = mix[k].rule;
  }
  // Fisher-Yates with the population stream.
  for (std::size_t i = rules.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(rules[i], rules[pick(pop.rng())]);
  }
  return pop;
}

std::vector<double> AllPolicies(const Population& pop) {
  const int n = pop.n_actions();
  std::vector<double> probs(pop.theta().size());
  for (int a = 0; a < pop.n_agents(); ++a) {
    SoftmaxInto(pop.row(a), {probs.data() + static_cast<std::size_t>(a) * n,
                             static_cast<std::size_t>(n)});
  }
  return probs;
}

Eigen::VectorXd MeanPolicy(std::span<const double> probs, int n_actions) {
  const std::size_t agents = probs.size() / n_actions;
  std::vector<CompensatedSum> acc(n_actions);
  for (std::size_t a = 0; a < agents; ++a) {
    for (int k = 0; k < n_actions; ++k) acc[k].Add(probs[a * n_actions + k]);
  }
  Eigen::VectorXd mean(n_actions);
  for (int k = 0; k < n_actions; ++k) mean[k] = acc[k].Value() / agents;
  return mean;
}

Eigen::VectorXd MeanPolicy(const Population& pop) {
  return MeanPolicy(AllPolicies(pop), pop.n_actions());
}

Eigen::VectorXd MeanPolicyForRule(std::span<const double> probs, int n_actions,
                                  const std::vector<RuleTag>& rules,
                                  RuleTag::Kind kind) {
  std::vector<CompensatedSum> acc(n_actions);
  std::size_t matched = 0;
  for (std::size_t a = 0; a < rules.size(); ++a) {
    if (rules[a].kind != kind) continue;
    ++matched;
    for (int k = 0; k < n_actions; ++k) acc[k].Add(probs[a * n_actions + k]);
  }
  if (matched == 0) return {};
  Eigen::VectorXd mean(n_actions);
  for (int k = 0; k < n_actions; ++k) mean[k] = acc[k].Value() / matched;
  return mean;
}

Eigen::VectorXd VertexConcentration(std::span<const double> probs, int n_actions,
                                    double radius) {
  // TV distance from p to vertex k is 1 - p_k.
  const std::size_t agents = probs.size() / n_actions;
  Eigen::VectorXd frac = Eigen::VectorXd::Zero(n_actions);
  for (std::size_t a = 0; a < agents; ++a) {
    for (int k = 0; k < n_actions; ++k) {
      if (1.0 - probs[a * n_actions + k] <= radius) frac[k] += 1.0;
    }
  }
  return frac / static_cast<double>(agents);
}

int TriangleCell(double p0, double p1, int bins) {
  const double u = std::clamp(p0, 0.0, 1.0) * bins;
  const double v = std::clamp(p1, 0.0, 1.0) * bins;
  int i = std::min(static_cast<int>(u), bins - 1);
  int j = std::min(static_cast<int>(v), bins - 1);
  if (i + j > bins - 1) {
    // Rounding pushed us past the hypotenuse; pull back onto the last row.
    j = bins - 1 - i;
  }
  const bool upward = (u - i) + (v - j) < 1.0 || i + j == bins - 1;
  // Upward cells (i, j) with i + j <= bins - 1, row-major by i.
  auto up_index = [bins](int r, int c) { return r * bins - r * (r - 1) / 2 + c; };
  if (upward) return up_index(i, j);
  const int up_total = bins * (bins + 1) / 2;
  const int m = bins - 1;
  auto down_index = [m](int r, int c) { return r * m - r * (r - 1) / 2 + c; };
  return up_total + down_index(i, j);
}

SimplexHistogram ComputeSimplexHistogram(std::span<const double> probs,
                                         int n_actions, int bins) {
  if (bins < 2) throw ParameterDomainError("histogram needs bins >= 2");
  if (n_actions > 3) {
    throw UnsupportedError("simplex histogram supports n <= 3, got n = " +
                           std::to_string(n_actions));
  }
  SimplexHistogram h;
  h.n_actions = n_actions;
  h.bins = bins;
  const std::size_t agents = probs.size() / n_actions;
  if (n_actions == 2) {
    h.counts.assign(bins, 0);
    for (std::size_t a = 0; a < agents; ++a) {
      const int b = std::min(static_cast<int>(probs[a * 2] * bins), bins - 1);
      ++h.counts[std::max(b, 0)];
    }
  } else {
    h.counts.assign(static_cast<std::size_t>(bins) * bins, 0);
    for (std::size_t a = 0; a < agents; ++a) {
      ++h.counts[TriangleCell(probs[a * 3], probs[a * 3 + 1], bins)];
    }
  }
  return h;
}

SimplexHistogram ComputeSimplexHistogram(const Population& pop, int bins) {
  if (pop.n_actions() > 3) {
    throw UnsupportedError("simplex histogram supports n <= 3, got n = " +
                           std::to_string(pop.n_actions()));
  }
  return ComputeSimplexHistogram(AllPolicies(pop), pop.n_actions(), bins);
}

}  // namespace evopop
