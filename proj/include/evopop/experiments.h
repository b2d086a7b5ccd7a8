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

#ifndef EVOPOP_EXPERIMENTS_H_
#define EVOPOP_EXPERIMENTS_H_

#include <vector>

#include "evopop/dynamics.h"
#include "evopop/engine.h"
#include "evopop/io.h"

namespace evopop {

// Full simulate run: population from cfg, summary/snapshot CSVs and the
// resolved config in cfg.out. Returns the summaries.
RunResult RunSimulation(const RunConfig& cfg);

// One population per value of cfg.param_range, cell k seeded with
// cfg.seed + k. Cells run in parallel unless cfg.threads == 1; results do
// not depend on the worker count.
std::vector<SweepRow> RunSweep(const RunConfig& cfg);

// Single-agent self-play (both seats start from the same policy) from each
// point of InitialPolicyGrid(n, cfg.selfplay_starts, cfg.seed), using
// cfg.rule for both seats.
std::vector<SelfPlayTrajectory> RunSelfPlayGrid(const RunConfig& cfg);

// Wall-clock of one evolution step, batched and iterative, for every size
// in cfg.sizes: one warm-up step, then the median of cfg.bench_reps timed
// steps. With cfg.f32 the batched path runs in single precision.
std::vector<BenchRow> RunBench(const RunConfig& cfg);

// Median wall-clock seconds of `reps` batched steps (after one warm-up) on
// a population initialised from cfg with n_agents agents.
double TimeBatchedStep(const RunConfig& cfg, int n_agents, int reps);
double TimeIterativeStep(const RunConfig& cfg, int n_agents, int reps);

}  // namespace evopop

#endif  // EVOPOP_EXPERIMENTS_H_
