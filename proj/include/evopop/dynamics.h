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

#ifndef EVOPOP_DYNAMICS_H_
#define EVOPOP_DYNAMICS_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "evopop/games.h"
#include "evopop/policy.h"

namespace evopop {

struct SelfPlayRecord {
  std::int64_t step = 0;
  Eigen::VectorXd theta1;
  Eigen::VectorXd theta2;
  Eigen::VectorXd p1;
  Eigen::VectorXd p2;
  double v1 = 0.0;
  double v2 = 0.0;
};

// steps + 1 records, the first one being the initial state.
struct SelfPlayTrajectory {
  RuleTag rule1;
  RuleTag rule2;
  std::int64_t steps = 0;
  std::vector<SelfPlayRecord> records;
};

// Two agents learning against each other. Both update every step from the
// other's pre-update parameters, each with its own rule.
SelfPlayTrajectory RunSelfPlay(const Eigen::VectorXd& theta1,
                               const Eigen::VectorXd& theta2,
                               const RuleTag& rule1, const RuleTag& rule2,
                               const GameSpec& game, double lr,
                               std::int64_t steps);

// P . (Q - 1 (P^T Q))
Eigen::VectorXd ReplicatorRhs(const Eigen::VectorXd& shares,
                              const Eigen::VectorXd& fitness);

struct ReplicatorTrajectory {
  std::vector<Eigen::VectorXd> states;
  // Sum of each Euler iterate before it was divided back onto the simplex.
  std::vector<double> renormalization;
};

// Explicit Euler on dP/dt = P . (A P - 1 P^T A P) with renormalisation after
// every step. Throws StepSizeError when an iterate leaves [-1e-9, 1 + 1e-9]
// before renormalisation, ParameterDomainError for dt <= 0.
ReplicatorTrajectory RunReplicator(const Eigen::VectorXd& start,
                                   const GameSpec& game, double dt,
                                   std::int64_t steps);

// Total-variation distance, (1/2) sum |p_i - t_i|.
double NashDistance(const Eigen::VectorXd& p, const Eigen::VectorXd& target);

// Euclidean distance to the uniform policy.
double DistanceFromUniform(const Eigen::VectorXd& p);

// Preferences reproducing the given interior policy (log-probabilities).
Eigen::VectorXd PreferencesFor(const Eigen::VectorXd& p);

// Initial policies for self-play sweeps. For n = 2: `count` evenly spaced
// interior values of P(action 0), k / (count + 1). For larger n: `count`
// draws with preferences uniform in [-1, 1] from a stream seeded by seed.
std::vector<Eigen::VectorXd> InitialPolicyGrid(int n_actions, int count,
                                               std::uint64_t seed);

inline constexpr int kDefaultSelfPlayStarts = 21;

}  // namespace evopop

#endif  // EVOPOP_DYNAMICS_H_
