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

#ifndef EVOPOP_RECORDS_H_
#define EVOPOP_RECORDS_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "evopop/policy.h"

namespace evopop {

// Per-step aggregate over the whole population.
struct SummaryRecord {
  std::int64_t step = 0;
  Eigen::VectorXd mean_policy;
  // Fraction of agents within total-variation distance 0.1 of each vertex.
  Eigen::VectorXd vertex_fraction;
  // p_mean^T A p_mean: expected payoff of an average agent against a
  // uniformly drawn partner.
  double mean_value = 0.0;
  // Filled only when both rules are present.
  Eigen::VectorXd mean_policy_pg;
  Eigen::VectorXd mean_policy_lola;
};

struct SnapshotRow {
  std::int64_t step = 0;
  int agent_id = 0;
  RuleTag rule;
  std::vector<double> probs;
};

// Receives records in step order.
class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual void OnSummary(const SummaryRecord& record) = 0;
  virtual void OnSnapshot(std::span<const SnapshotRow> rows) = 0;
  virtual void Finish() {}
};

}  // namespace evopop

#endif  // EVOPOP_RECORDS_H_
