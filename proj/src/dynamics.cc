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

#include "evopop/dynamics.h"

#include <cmath>
#include <random>
#include <string>

#include "evopop/errors.h"
#include "evopop/grad.h"

namespace evopop {
namespace {

constexpr double kSimplexSlack = 1e-9;

Eigen::VectorXd RuleGradient(const RuleTag& rule, const Eigen::VectorXd& p_self,
                             const Eigen::VectorXd& p_other,
                             const Eigen::MatrixXd& a) {
  if (rule.is_lola()) {
    return LolaGradFromContext(GradContext::Make(p_self, p_other), a, rule.eta());
  }
  return PgGradFromProbs(p_self, p_other, a);
}

SelfPlayRecord MakeRecord(std::int64_t step, const Eigen::VectorXd& theta1,
                          const Eigen::VectorXd& theta2, const Eigen::MatrixXd& a) {
  SelfPlayRecord rec;
  rec.step = step;
  rec.theta1 = theta1;
  rec.theta2 = theta2;
  rec.p1 = Softmax(theta1);
  rec.p2 = Softmax(theta2);
  rec.v1 = Value(rec.p1, rec.p2, a);
  rec.v2 = Value(rec.p2, rec.p1, a);
  return rec;
}

}  // namespace

SelfPlayTrajectory RunSelfPlay(const Eigen::VectorXd& theta1,
                               const Eigen::VectorXd& theta2,
                               const RuleTag& rule1, const RuleTag& rule2,
                               const GameSpec& game, double lr,
                               std::int64_t steps) {
  if (theta1.size() != game.n || theta2.size() != game.n) {
    throw ShapeError("self-play preferences must have " + std::to_string(game.n) +
                     " entries");
  }
  if (!(lr > 0.0)) throw ParameterDomainError("learning rate must be > 0");
  if (steps < 0) throw ParameterDomainError("steps must be >= 0");

  SelfPlayTrajectory traj;
  traj.rule1 = rule1;
  traj.rule2 = rule2;
  traj.steps = steps;
  traj.records.reserve(static_cast<std::size_t>(steps) + 1);

  Eigen::VectorXd t1 = theta1;
  Eigen::VectorXd t2 = theta2;
  traj.records.push_back(MakeRecord(0, t1, t2, game.payoff));
  for (std::int64_t s = 1; s <= steps; ++s) {
    const SelfPlayRecord& prev = traj.records.back();
    const Eigen::VectorXd g1 = RuleGradient(rule1, prev.p1, prev.p2, game.payoff);
    const Eigen::VectorXd g2 = RuleGradient(rule2, prev.p2, prev.p1, game.payoff);
    t1 += lr * g1;
    t2 += lr * g2;
    traj.records.push_back(MakeRecord(s, t1, t2, game.payoff));
  }
  return traj;
}

Eigen::VectorXd ReplicatorRhs(const Eigen::VectorXd& shares,
                              const Eigen::VectorXd& fitness) {
  if (shares.size() != fitness.size()) {
    throw ShapeError("replicator state and fitness lengths differ");
  }
  const double mean_fitness = shares.dot(fitness);
  return shares.cwiseProduct(fitness -
                             Eigen::VectorXd::Constant(fitness.size(), mean_fitness));
}

ReplicatorTrajectory RunReplicator(const Eigen::VectorXd& start,
                                   const GameSpec& game, double dt,
                                   std::int64_t steps) {
  if (!(dt > 0.0)) throw ParameterDomainError("dt must be > 0");
  if (start.size() != game.n) throw ShapeError("replicator state has wrong length");
  if ((start.array() < 0.0).any() || std::abs(start.sum() - 1.0) > kSimplexSlack) {
    throw ParameterDomainError("replicator start is not on the simplex");
  }
  ReplicatorTrajectory traj;
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.renormalization.reserve(static_cast<std::size_t>(steps));
  Eigen::VectorXd p = start;
  traj.states.push_back(p);
  for (std::int64_t s = 0; s < steps; ++s) {
    Eigen::VectorXd next = p + dt * ReplicatorRhs(p, game.payoff * p);
    if ((next.array() < -kSimplexSlack).any() ||
        (next.array() > 1.0 + kSimplexSlack).any()) {
      throw StepSizeError("replicator iterate left the simplex at step " +
                          std::to_string(s + 1) + "; use a smaller dt");
    }
    next = next.cwiseMax(0.0);
    const double total = next.sum();
    traj.renormalization.push_back(total);
    p = next / total;
    traj.states.push_back(p);
  }
  return traj;
}

double NashDistance(const Eigen::VectorXd& p, const Eigen::VectorXd& target) {
  if (p.size() != target.size()) throw ShapeError("distance between vectors of different length");
  return 0.5 * (p - target).cwiseAbs().sum();
}

double DistanceFromUniform(const Eigen::VectorXd& p) {
  return (p - Eigen::VectorXd::Constant(p.size(), 1.0 / p.size())).norm();
}

Eigen::VectorXd PreferencesFor(const Eigen::VectorXd& p) {
  if ((p.array() <= 0.0).any()) {
    throw ParameterDomainError("preferences exist only for interior policies");
  }
  return p.array().log().matrix();
}

std::vector<Eigen::VectorXd> InitialPolicyGrid(int n_actions, int count,
                                               std::uint64_t seed) {
  if (count < 1) throw ParameterDomainError("need at least one initial condition");
  std::vector<Eigen::VectorXd> starts;
  if (n_actions == 2) {
    for (int k = 1; k <= count; ++k) {
      const double p0 = static_cast<double>(k) / (count + 1);
      starts.push_back((Eigen::VectorXd(2) << p0, 1.0 - p0).finished());
    }
    return starts;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pref(-1.0, 1.0);
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd theta(n_actions);
    for (int i = 0; i < n_actions; ++i) theta[i] = pref(rng);
    starts.push_back(Softmax(theta));
  }
  return starts;
}

}  // namespace evopop
