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

#include "evopop/experiments.h"

#include <algorithm>
#include <chrono>
#include <filesystem>

#include <omp.h>

#include "evopop/engine.h"
#include "evopop/errors.h"
#include "evopop/policy.h"

namespace evopop {
namespace {

bool IsMixed(const RuleMix& mix) {
  bool pg = false;
  bool lola = false;
  for (const auto& share : mix) {
    if (share.fraction <= 0.0) continue;
    (share.rule.is_lola() ? lola : pg) = true;
  }
  return pg && lola;
}

EvolutionConfig EngineConfig(const RunConfig& cfg) {
  EvolutionConfig ec;
  ec.steps = cfg.steps;
  ec.lr = cfg.lr;
  ec.record_every = cfg.record_every;
  ec.seed = cfg.seed;
  if (cfg.snapshot_agents > 0) ec.snapshot_agents = cfg.snapshot_agents;
  ec.threads = cfg.threads;
  return ec;
}

std::string MixLabel(const RuleMix& mix) {
  if (mix.size() == 1) return mix[0].rule.Label();
  std::string label;
  for (const auto& share : mix) {
    if (!label.empty()) label += "+";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%.2f", share.rule.Label().c_str(), share.fraction);
    label += buf;
  }
  return label;
}

double Median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

template <typename Fn>
double Seconds(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

RunResult RunSimulation(const RunConfig& cfg) {
  cfg.Validate();
  const GameSpec game = cfg.BuildGameSpec();
  const RuleMix mix = cfg.EffectiveMix();
  Population pop = InitPopulation(cfg.n, game.n, cfg.init_sigma, mix, cfg.seed);
  EnsureDirectory(cfg.out);
  WriteTextFile((std::filesystem::path(cfg.out) / "config.resolved.toml").string(),
                FormatResolvedConfig(cfg));
  CsvRunSink sink(cfg.out, game.n, IsMixed(mix), cfg.snapshot_agents > 0);
  return RunEvolution(std::move(pop), game, EngineConfig(cfg), &sink);
}

std::vector<SweepRow> RunSweep(const RunConfig& cfg) {
  RunConfig as_sweep = cfg;
  as_sweep.mode = RunMode::kSweep;
  as_sweep.Validate();
  const std::vector<double> params = ParseParamRange(cfg.param_range);
  const RuleMix mix = cfg.EffectiveMix();
  const int cells = static_cast<int>(params.size());
  std::vector<SweepRow> rows(cells);
  const int workers = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();

  // Cells are independent; the engine inside each one runs single-threaded.
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
  for (int k = 0; k < cells; ++k) {
    const GameSpec game = cfg.BuildGameSpec(params[k]);
    EvolutionConfig ec = EngineConfig(cfg);
    ec.seed = cfg.seed + static_cast<std::uint64_t>(k);
    ec.threads = 1;
    ec.snapshot_agents.reset();
    ec.record_every = std::max<std::int64_t>(1, cfg.steps);
    Population pop = InitPopulation(cfg.n, game.n, cfg.init_sigma, mix, ec.seed);
    const RunResult result = RunEvolution(std::move(pop), game, ec);
    const SummaryRecord final_record = Summarize(result.population, game);
    rows[k] = {params[k], MixLabel(mix), final_record.mean_policy,
               final_record.mean_value};
  }
  return rows;
}

std::vector<SelfPlayTrajectory> RunSelfPlayGrid(const RunConfig& cfg) {
  cfg.Validate();
  const GameSpec game = cfg.BuildGameSpec();
  const RuleTag rule = RuleTag::Parse(cfg.rule, cfg.EffectiveEta());
  std::vector<SelfPlayTrajectory> runs;
  for (const Eigen::VectorXd& p : InitialPolicyGrid(game.n, cfg.selfplay_starts, cfg.seed)) {
    const Eigen::VectorXd theta = PreferencesFor(p);
    runs.push_back(RunSelfPlay(theta, theta, rule, rule, game, cfg.lr, cfg.steps));
  }
  return runs;
}

double TimeBatchedStep(const RunConfig& cfg, int n_agents, int reps) {
  const GameSpec game = cfg.BuildGameSpec();
  Population pop =
      InitPopulation(n_agents, game.n, cfg.init_sigma, cfg.EffectiveMix(), cfg.seed);
  std::vector<double> times;
  if (cfg.f32) {
    Float32Population f32 = ToFloat32(pop);
    EvolutionStepF32(f32, game, cfg.lr, cfg.threads);
    for (int r = 0; r < reps; ++r) {
      times.push_back(Seconds([&] { EvolutionStepF32(f32, game, cfg.lr, cfg.threads); }));
    }
  } else {
    EvolutionConfig ec = EngineConfig(cfg);
    EvolutionStep(pop, game, ec);
    for (int r = 0; r < reps; ++r) {
      times.push_back(Seconds([&] { EvolutionStep(pop, game, ec); }));
    }
  }
  return Median(std::move(times));
}

double TimeIterativeStep(const RunConfig& cfg, int n_agents, int reps) {
  const GameSpec game = cfg.BuildGameSpec();
  Population pop =
      InitPopulation(n_agents, game.n, cfg.init_sigma, cfg.EffectiveMix(), cfg.seed);
  const EvolutionConfig ec = EngineConfig(cfg);
  auto step = [&] {
    // The pairing draw is part of a full step on both paths.
    const PairingPlan plan = DrawPairing(pop.n_agents(), pop.rng());
    IterativeReferenceStep(pop, game, ec, plan);
  };
  step();
  std::vector<double> times;
  for (int r = 0; r < reps; ++r) times.push_back(Seconds(step));
  return Median(std::move(times));
}

std::vector<BenchRow> RunBench(const RunConfig& cfg) {
  cfg.Validate();
  const GameSpec game = cfg.BuildGameSpec();
  const std::string rule = MixLabel(cfg.EffectiveMix());
  const int workers = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
  std::vector<BenchRow> rows;
  for (int size : cfg.sizes) {
    if (size % 2 != 0) throw ConfigError("key 'sizes': population sizes must be even");
    rows.push_back({size, game.n, rule, "batched", TimeBatchedStep(cfg, size, cfg.bench_reps),
                    workers, cfg.f32 ? 32 : 64, cfg.bench_reps});
    rows.push_back({size, game.n, rule, "iterative",
                    TimeIterativeStep(cfg, size, cfg.bench_reps), 1, 64,
                    cfg.bench_reps});
  }
  return rows;
}

}  // namespace evopop
