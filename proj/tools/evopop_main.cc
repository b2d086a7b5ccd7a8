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

// evopop: evolutionary-scale populations of policy-gradient and LOLA
// learners in symmetric matrix games.
//
//   evopop simulate --game stag_hunt --param 1.8 --rule lola --n 200000
//       --steps 1000 --seed 42 --out run1/
//   evopop selfplay --game hawk_dove --param -2 --rule lola --steps 5000
//   evopop sweep --game hawk_dove --param-range " -4:-0.25:0.25" --rule pg
//   evopop bench --game rps --rule lola --sizes 10000,100000,200000
//   evopop check
//
// Exit codes: 0 ok, 1 config/usage error, 2 runtime error, 3 check failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "evopop/errors.h"
#include "evopop/experiments.h"
#include "evopop/io.h"
#include "evopop/oracle_suite.h"
#include "evopop/policy.h"

namespace {

using evopop::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCheckFailed = 3;

// flag name -> config key
const std::vector<std::pair<std::string, std::string>>& FlagKeys() {
  static const std::vector<std::pair<std::string, std::string>> flags = {
      {"game", "game"},
      {"param", "param"},
      {"matrix-file", "matrix_file"},
      {"rule", "rule"},
      {"mix", "rule_mix"},
      {"n", "n"},
      {"steps", "steps"},
      {"lr", "lr"},
      {"lookahead-eta", "lookahead_eta"},
      {"init-sigma", "init_sigma"},
      {"seed", "seed"},
      {"record-every", "record_every"},
      {"snapshot-agents", "snapshot_agents"},
      {"out", "out"},
      {"param-range", "param_range"},
      {"sizes", "sizes"},
      {"threads", "threads"},
      {"selfplay-starts", "selfplay_starts"},
      {"bench-reps", "bench_reps"},
      {"check-trials", "check_trials"},
  };
  return flags;
}

struct Invocation {
  std::string config_path;
  std::map<std::string, std::string> values;
  bool f32 = false;
};

void AddCommonFlags(CLI::App* sub, Invocation& inv) {
  sub->add_option("--config", inv.config_path, "TOML-subset config file; flags override it");
  for (const auto& [flag, key] : FlagKeys()) {
    sub->add_option("--" + flag, inv.values[key], "config key '" + key + "'");
  }
  sub->add_flag("--f32", inv.f32, "single-precision batched path (bench only)");
}

RunConfig Resolve(CLI::App* sub, const Invocation& inv, evopop::RunMode mode) {
  RunConfig cfg = inv.config_path.empty() ? RunConfig{} : evopop::LoadConfig(inv.config_path);
  cfg.mode = mode;
  for (const auto& [flag, key] : FlagKeys()) {
    if (sub->count("--" + flag) > 0) {
      evopop::ApplyConfigOverride(cfg, key, inv.values.at(key));
    }
  }
  if (inv.f32) evopop::ApplyConfigOverride(cfg, "f32", "true");
  cfg.Validate();
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  return cfg;
}

std::string OutPath(const RunConfig& cfg, const char* file) {
  return (std::filesystem::path(cfg.out) / file).string();
}

void WriteResolved(const RunConfig& cfg) {
  evopop::EnsureDirectory(cfg.out);
  evopop::WriteTextFile(OutPath(cfg, "config.resolved.toml"),
                        evopop::FormatResolvedConfig(cfg));
}

int Simulate(const RunConfig& cfg) {
  const evopop::RunResult result = evopop::RunSimulation(cfg);
  const auto& last = result.summaries.back();
  std::printf("step %lld mean policy:", static_cast<long long>(last.step));
  for (double p : last.mean_policy) std::printf(" %.6f", p);
  std::printf("\nwrote %s\n", OutPath(cfg, "summary.csv").c_str());
  return kExitOk;
}

int SelfPlay(const RunConfig& cfg) {
  const auto runs = evopop::RunSelfPlayGrid(cfg);
  WriteResolved(cfg);
  evopop::WriteSelfPlay(runs, OutPath(cfg, "selfplay.csv"));
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& first = runs[r].records.front();
    const auto& last = runs[r].records.back();
    std::printf("run %2zu  p1_0 %.4f -> %.4f\n", r, first.p1[0], last.p1[0]);
  }
  std::printf("wrote %s\n", OutPath(cfg, "selfplay.csv").c_str());
  return kExitOk;
}

int Sweep(const RunConfig& cfg) {
  const auto rows = evopop::RunSweep(cfg);
  WriteResolved(cfg);
  evopop::WriteSweep(rows, OutPath(cfg, "sweep.csv"));
  for (const auto& row : rows) {
    std::printf("param %9.4f  mean_p_0 %.6f\n", row.param, row.mean_policy[0]);
  }
  std::printf("wrote %s\n", OutPath(cfg, "sweep.csv").c_str());
  return kExitOk;
}

int Bench(const RunConfig& cfg) {
  const auto rows = evopop::RunBench(cfg);
  WriteResolved(cfg);
  evopop::WriteBench(rows, OutPath(cfg, "bench.csv"));
  for (const auto& row : rows) {
    std::printf("N=%-8d %-9s %.6f s/step  (threads %d, f%d)\n", row.n_agents,
                row.impl.c_str(), row.median_seconds, row.threads, row.float_bits);
  }
  std::printf("wrote %s\n", OutPath(cfg, "bench.csv").c_str());
  return kExitOk;
}

int Check(const RunConfig& cfg) {
  const evopop::OracleReport report = evopop::RunOracleSuite(cfg.check_trials, cfg.seed);
  std::fputs(report.Format().c_str(), stdout);
  if (!report.all_passed()) {
    std::puts("check FAILED");
    return kExitCheckFailed;
  }
  std::puts("check passed");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evopop: populations of PG and LOLA learners in symmetric matrix games"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    evopop::RunMode mode;
    int (*run)(const RunConfig&);
  };
  const std::vector<Command> commands = {
      {"simulate", "evolve a population", evopop::RunMode::kSimulate, Simulate},
      {"selfplay", "two-agent self-play over a grid of starts",
       evopop::RunMode::kSelfPlay, SelfPlay},
      {"sweep", "final mean policy across a game-parameter range",
       evopop::RunMode::kSweep, Sweep},
      {"bench", "time batched vs iterative evolution steps", evopop::RunMode::kBench,
       Bench},
      {"check", "run the gradient oracle suite", evopop::RunMode::kCheck, Check},
  };
  std::vector<Invocation> invocations(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].name, commands[i].help);
    AddCommonFlags(sub, invocations[i]);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitConfig;
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      const RunConfig cfg = Resolve(subs[i], invocations[i], commands[i].mode);
      return commands[i].run(cfg);
    } catch (const evopop::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitRuntime;
    }
  }
  return kExitConfig;
}
