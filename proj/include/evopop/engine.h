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

#ifndef EVOPOP_ENGINE_H_
#define EVOPOP_ENGINE_H_

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "evopop/games.h"
#include "evopop/policy.h"
#include "evopop/records.h"

namespace evopop {

// One step's interaction graph. perm is read as N/2 disjoint pairs
// (perm[2k], perm[2k+1]); mirroring gives every agent one ego row:
// ego_idx = perm, opp_idx = perm with each adjacent pair swapped.
struct PairingPlan {
  std::vector<int> perm;
  std::vector<int> ego_idx;
  std::vector<int> opp_idx;

  static PairingPlan FromPermutation(std::vector<int> perm);
  // partner[a] is the agent a meets this step.
  std::vector<int> Partners() const;
};

// Uniform Fisher-Yates shuffle of [0, N) from rng. Throws PopulationSizeError
// for odd or non-positive N.
PairingPlan DrawPairing(int n_agents, std::mt19937_64& rng);

struct EvolutionConfig {
  std::int64_t steps = 0;
  double lr = 1.0;
  std::int64_t record_every = 1;
  std::uint64_t seed = 0;
  // Per-agent snapshot subsample size; unset disables snapshots.
  std::optional<int> snapshot_agents;
  // Worker count for the batched update; 0 leaves it to the runtime.
  int threads = 0;

  void Validate() const;
};

// Applies one simultaneous update to every agent on a fixed plan: all
// gradients read pre-update policies, then theta <- theta + lr * g. Mirrored
// rows are partitioned by the ego agent's rule and each part runs through one
// batched kernel. Does not touch the RNG or the step counter.
void BatchedUpdate(Population& pop, const GameSpec& game, double lr,
                   const PairingPlan& plan, int threads = 0);

// Draws a pairing from the population stream, applies BatchedUpdate and
// increments the step counter.
void EvolutionStep(Population& pop, const GameSpec& game,
                   const EvolutionConfig& cfg);

// Same maths as BatchedUpdate, scheduled the conventional way: a sequential
// loop over pairs that builds each pair's gradient context from scratch with
// the dense matrix formulas. Kept for equivalence tests and benchmarks.
// Increments the step counter.
void IterativeReferenceStep(Population& pop, const GameSpec& game,
                            const EvolutionConfig& cfg, const PairingPlan& plan);

// Summary of the current state, computed over all agents.
SummaryRecord Summarize(const Population& pop, const GameSpec& game);

struct RunResult {
  Population population;
  std::vector<SummaryRecord> summaries;
};

// Runs cfg.steps evolution steps. A summary (and a snapshot when enabled) is
// emitted at step 0 and after every record_every steps. sink may be null.
RunResult RunEvolution(Population pop, const GameSpec& game,
                       const EvolutionConfig& cfg, RecordSink* sink = nullptr);

// Agents kept in snapshots: all of them when N <= limit, otherwise a sorted
// uniform subsample drawn from a stream derived from seed.
std::vector<int> SnapshotSubsample(int n_agents, int limit, std::uint64_t seed);

// Single-precision copy of a population, used only by the benchmark.
struct Float32Population {
  int n_agents = 0;
  int n_actions = 0;
  std::vector<float> theta;
  std::vector<RuleTag> rules;
  std::mt19937_64 rng;
};

Float32Population ToFloat32(const Population& pop);
void EvolutionStepF32(Float32Population& pop, const GameSpec& game, double lr,
                      int threads = 0);

}  // namespace evopop

#endif  // EVOPOP_ENGINE_H_
