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

#ifndef EVOPOP_IO_H_
#define EVOPOP_IO_H_

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evopop/dynamics.h"
#include "evopop/games.h"
#include "evopop/policy.h"
#include "evopop/records.h"

namespace evopop {

enum class RunMode { kSimulate, kSelfPlay, kSweep, kBench, kCheck };

RunMode ParseRunMode(std::string_view name);
std::string_view RunModeName(RunMode mode);

// Every experiment setting. Each field has a config-file key (listed in
// ConfigKeys()) and a CLI flag with the same name, '_' spelled '-'.
struct RunConfig {
  RunMode mode = RunMode::kSimulate;
  GameKind game = GameKind::kStagHunt;
  std::optional<double> param;
  std::string matrix_file;
  std::string rule = "pg";
  std::optional<RuleMix> rule_mix;
  int n = 10000;
  std::int64_t steps = 1000;
  double lr = 1.0;
  // Defaults to lr when unset.
  std::optional<double> lookahead_eta;
  double init_sigma = 0.5;
  std::uint64_t seed = 0;
  std::int64_t record_every = 1;
  int snapshot_agents = 20000;
  std::string out = "run";
  // "start:stop:step", inclusive of stop.
  std::string param_range;
  std::vector<int> sizes = {10000, 20000, 50000, 100000, 200000};
  int threads = 0;
  bool f32 = false;
  int selfplay_starts = kDefaultSelfPlayStarts;
  int bench_reps = 5;
  int check_trials = 1000;

  double EffectiveEta() const { return lookahead_eta.value_or(lr); }
  // The explicit mix if given, otherwise {rule: 1}. LOLA entries carry
  // EffectiveEta().
  RuleMix EffectiveMix() const;
  // Builds the game (reading matrix_file for custom games).
  GameSpec BuildGameSpec() const;
  // Same as BuildGameSpec but with the scalar parameter replaced.
  GameSpec BuildGameSpec(double param_override) const;
  // Throws ConfigError naming the offending key.
  void Validate() const;
};

// Known keys, in the order they are written by WriteResolvedConfig.
const std::vector<std::string>& ConfigKeys();

// Parses a flat TOML subset: `key = value` lines with strings, integers,
// floats, booleans, arrays of numbers and one-level inline tables of numbers
// (rule_mix). '#' starts a comment. Unknown or duplicate keys and type
// mismatches throw ConfigError mentioning the key and line.
RunConfig ParseConfig(std::string_view text, const std::string& origin = "<config>");
RunConfig LoadConfig(const std::string& path);
// Applies one value written as on the command line (strings unquoted,
// rule_mix as "lola=0.86,pg=0.14", sizes as "1000,2000").
void ApplyConfigOverride(RunConfig& cfg, const std::string& key,
                         const std::string& value);
// Fully resolved config, readable back by ParseConfig.
std::string FormatResolvedConfig(const RunConfig& cfg);

std::vector<double> ParseParamRange(const std::string& range);

// Fixed-point with six decimals.
std::string FormatFixed(double value);

// CSV schemas. One header line, LF endings, probabilities with six decimals.
//   summary.csv    step,mean_p_0..,conc_0..,mean_value[,pg_p_0..,lola_p_0..]
//   snapshots.csv  step,agent_id,rule,p_0..
//   selfplay.csv   run,step,p1_0..,p2_0..,v1,v2
//   sweep.csv      param,rule,mean_p_0..,mean_value
//   bench.csv      n_agents,n_actions,rule,impl,median_seconds,threads,float_bits,reps
std::string SummaryHeader(int n_actions, bool mixed);
std::string SummaryLine(const SummaryRecord& rec, bool mixed);
std::string SnapshotHeader(int n_actions);
std::string SnapshotLine(const SnapshotRow& row);

void WriteSummary(const std::vector<SummaryRecord>& records, const std::string& path,
                  int n_actions, bool mixed);
void WriteSnapshots(const std::vector<SnapshotRow>& rows, const std::string& path,
                    int n_actions);
std::vector<SummaryRecord> ReadSummary(const std::string& path);
std::vector<SnapshotRow> ReadSnapshots(const std::string& path);

void WriteSelfPlay(const std::vector<SelfPlayTrajectory>& runs,
                   const std::string& path);

struct SweepRow {
  double param = 0.0;
  std::string rule;
  Eigen::VectorXd mean_policy;
  double mean_value = 0.0;
};
void WriteSweep(const std::vector<SweepRow>& rows, const std::string& path);

struct BenchRow {
  int n_agents = 0;
  int n_actions = 0;
  std::string rule;
  std::string impl;  // "batched" or "iterative"
  double median_seconds = 0.0;
  int threads = 1;
  int float_bits = 64;
  int reps = 0;
};
void WriteBench(const std::vector<BenchRow>& rows, const std::string& path);

// Streams summary.csv and (optionally) snapshots.csv into a run directory.
// Flushes every 100 records and on Finish().
class CsvRunSink : public RecordSink {
 public:
  CsvRunSink(const std::string& dir, int n_actions, bool mixed, bool snapshots);
  void OnSummary(const SummaryRecord& record) override;
  void OnSnapshot(std::span<const SnapshotRow> rows) override;
  void Finish() override;

 private:
  void Check(std::ofstream& out, const std::string& path);

  bool mixed_;
  std::string summary_path_;
  std::string snapshot_path_;
  std::ofstream summary_;
  std::ofstream snapshots_;
  int pending_ = 0;
};

// Collects records in memory.
class MemorySink : public RecordSink {
 public:
  void OnSummary(const SummaryRecord& record) override { summaries.push_back(record); }
  void OnSnapshot(std::span<const SnapshotRow> rows) override {
    snapshots.insert(snapshots.end(), rows.begin(), rows.end());
  }

  std::vector<SummaryRecord> summaries;
  std::vector<SnapshotRow> snapshots;
};

// Creates dir (and parents); throws IoError on failure.
void EnsureDirectory(const std::string& dir);
void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace evopop

#endif  // EVOPOP_IO_H_
