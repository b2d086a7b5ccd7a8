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

#include "evopop/engine.h"

#include <algorithm>
#include <memory>
#include <numeric>
#include <string>

#include <omp.h>

#include "evopop/errors.h"
#include "evopop/grad.h"
#include "evopop/grad_kernels.h"

namespace evopop {
namespace {

constexpr double kConcentrationRadius = 0.1;
constexpr std::uint64_t kSnapshotStreamSalt = 0x9e3779b97f4a7c15ULL;

int Workers(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

// Mirrored rows split by the ego's rule. Each row is keyed by its ego agent
// and kept in agent order, so the sweep over rows walks memory forwards.
struct RowGroups {
  std::vector<int> pg_egos;
  std::vector<int> lola_egos;
  std::vector<int> partner;
};

RowGroups PartitionRows(const PairingPlan& plan, const std::vector<RuleTag>& rules) {
  RowGroups groups;
  groups.partner = plan.Partners();
  const int n_agents = static_cast<int>(rules.size());
  std::int64_t lola = 0;
  for (const RuleTag& r : rules) lola += r.is_lola() ? 1 : 0;
  groups.lola_egos.reserve(lola);
  groups.pg_egos.reserve(n_agents - lola);
  for (int agent = 0; agent < n_agents; ++agent) {
    (rules[agent].is_lola() ? groups.lola_egos : groups.pg_egos).push_back(agent);
  }
  return groups;
}

template <typename Real>
std::vector<Real> RowMajorPayoff(const GameSpec& game) {
  std::vector<Real> a(static_cast<std::size_t>(game.n) * game.n);
  for (int i = 0; i < game.n; ++i) {
    for (int j = 0; j < game.n; ++j) a[i * game.n + j] = static_cast<Real>(game.payoff(i, j));
  }
  return a;
}

template <typename Real, int Dim>
void RunRows(const std::vector<int>& egos, bool lola, const Real* a,
             const Real* probs, const std::vector<int>& partner,
             const std::vector<RuleTag>& rules, Real lr, int n, int threads,
             Real* theta) {
  const int count = static_cast<int>(egos.size());
  const int workers = Workers(threads);
#pragma omp parallel num_threads(workers) if (workers > 1)
  {
    kernels::Scratch<Real, Dim> scratch(n);
    std::vector<Real> grad(static_cast<std::size_t>(n));
#pragma omp for schedule(static)
    for (int r = 0; r < count; ++r) {
      const int ego = egos[r];
      const int opp = partner[ego];
      const Real* p1 = probs + static_cast<std::size_t>(ego) * n;
      const Real* p2 = probs + static_cast<std::size_t>(opp) * n;
      if (lola) {
        kernels::LolaGrad<Real, Dim>(a, p1, p2, static_cast<Real>(rules[ego].eta()),
                                     n, scratch, grad.data());
      } else {
        kernels::PgGrad<Real, Dim>(a, p1, p2, n, scratch, grad.data());
      }
      Real* t = theta + static_cast<std::size_t>(ego) * n;
      for (int k = 0; k < n; ++k) t[k] += lr * grad[k];
    }
  }
}

template <typename Real, int Dim>
void BatchedUpdateImpl(Real* theta, int n_agents, int n,
                       const std::vector<RuleTag>& rules, const GameSpec& game,
                       Real lr, const PairingPlan& plan, int threads) {
  // Policies first: every gradient below reads only these, so rows can be
  // updated in place afterwards.
  // Every entry is written below, so skip value-initialisation.
  std::unique_ptr<Real[]> probs(new Real[static_cast<std::size_t>(n_agents) * n]);
  {
    const int workers = Workers(threads);
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1)
    for (int agent = 0; agent < n_agents; ++agent) {
      const std::size_t off = static_cast<std::size_t>(agent) * n;
      SoftmaxRow(theta + off, probs.get() + off, n);
    }
  }
  const std::vector<Real> a = RowMajorPayoff<Real>(game);
  const RowGroups groups = PartitionRows(plan, rules);
  RunRows<Real, Dim>(groups.pg_egos, false, a.data(), probs.get(), groups.partner,
                     rules, lr, n, threads, theta);
  RunRows<Real, Dim>(groups.lola_egos, true, a.data(), probs.get(), groups.partner,
                     rules, lr, n, threads, theta);
}

template <typename Real>
void DispatchBatchedUpdate(Real* theta, int n_agents, int n,
                           const std::vector<RuleTag>& rules,
                           const GameSpec& game, Real lr,
                           const PairingPlan& plan, int threads) {
  if (game.n != n) {
    throw ShapeError("game has " + std::to_string(game.n) +
                     " actions, population has " + std::to_string(n));
  }
  if (static_cast<int>(plan.ego_idx.size()) != n_agents) {
    throw ShapeError("pairing plan covers " + std::to_string(plan.ego_idx.size()) +
                     " agents, population has " + std::to_string(n_agents));
  }
  switch (n) {
    case 2:
      BatchedUpdateImpl<Real, 2>(theta, n_agents, n, rules, game, lr, plan, threads);
      break;
    case 3:
      BatchedUpdateImpl<Real, 3>(theta, n_agents, n, rules, game, lr, plan, threads);
      break;
    default:
      BatchedUpdateImpl<Real, 0>(theta, n_agents, n, rules, game, lr, plan, threads);
      break;
  }
}

}  // namespace

PairingPlan PairingPlan::FromPermutation(std::vector<int> perm) {
  const int n = static_cast<int>(perm.size());
  if (n < 2 || n % 2 != 0) {
    throw PopulationSizeError("pairing needs an even number of agents, got " +
                              std::to_string(n));
  }
  PairingPlan plan;
  plan.ego_idx = perm;
  plan.opp_idx.resize(n);
  for (int k = 0; k < n; k += 2) {
    plan.opp_idx[k] = perm[k + 1];
    plan.opp_idx[k + 1] = perm[k];
  }
  plan.perm = std::move(perm);
  return plan;
}

std::vector<int> PairingPlan::Partners() const {
  std::vector<int> partner(ego_idx.size());
  for (std::size_t i = 0; i < ego_idx.size(); ++i) partner[ego_idx[i]] = opp_idx[i];
  return partner;
}

PairingPlan DrawPairing(int n_agents, std::mt19937_64& rng) {
  if (n_agents < 2 || n_agents % 2 != 0) {
    throw PopulationSizeError("pairing needs an even number of agents, got " +
                              std::to_string(n_agents));
  }
  std::vector<int> perm(n_agents);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n_agents - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(perm[i], perm[pick(rng)]);
  }
  return PairingPlan::FromPermutation(std::move(perm));
}

void EvolutionConfig::Validate() const {
  if (steps < 0) throw ParameterDomainError("steps must be >= 0");
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw ParameterDomainError("learning rate must be finite and > 0");
  }
  if (record_every < 1) throw ParameterDomainError("record_every must be >= 1");
  if (snapshot_agents && *snapshot_agents < 0) {
    throw ParameterDomainError("snapshot_agents must be >= 0");
  }
  if (threads < 0) throw ParameterDomainError("threads must be >= 0");
}

void BatchedUpdate(Population& pop, const GameSpec& game, double lr,
                   const PairingPlan& plan, int threads) {
  DispatchBatchedUpdate<double>(pop.theta().data(), pop.n_agents(),
                                pop.n_actions(), pop.rules(), game, lr, plan,
                                threads);
}

void EvolutionStep(Population& pop, const GameSpec& game,
                   const EvolutionConfig& cfg) {
  const PairingPlan plan = DrawPairing(pop.n_agents(), pop.rng());
  BatchedUpdate(pop, game, cfg.lr, plan, cfg.threads);
  pop.advance_step();
}

void IterativeReferenceStep(Population& pop, const GameSpec& game,
                            const EvolutionConfig& cfg, const PairingPlan& plan) {
  if (game.n != pop.n_actions()) throw ShapeError("game/population action count mismatch");
  if (static_cast<int>(plan.perm.size()) != pop.n_agents()) {
    throw ShapeError("pairing plan does not match population size");
  }
  const Eigen::MatrixXd& a = game.payoff;
  auto gradient = [&](int agent, const GradContext& ctx) -> Eigen::VectorXd {
    const RuleTag& rule = pop.rules()[agent];
    if (rule.is_lola()) return LolaGradFromContext(ctx, a, rule.eta());
    return PgGradFromProbs(ctx.p1, ctx.p2, a);
  };
  for (std::size_t k = 0; k < plan.perm.size(); k += 2) {
    const int first = plan.perm[k];
    const int second = plan.perm[k + 1];
    const Eigen::VectorXd p_first = pop.policy(first);
    const Eigen::VectorXd p_second = pop.policy(second);
    const Eigen::VectorXd g_first =
        gradient(first, GradContext::Make(p_first, p_second));
    const Eigen::VectorXd g_second =
        gradient(second, GradContext::Make(p_second, p_first));
    auto row_first = pop.row(first);
    auto row_second = pop.row(second);
    for (int i = 0; i < pop.n_actions(); ++i) {
      row_first[i] += cfg.lr * g_first[i];
      row_second[i] += cfg.lr * g_second[i];
    }
  }
  pop.advance_step();
}

SummaryRecord Summarize(const Population& pop, const GameSpec& game) {
  const std::vector<double> probs = AllPolicies(pop);
  const int n = pop.n_actions();
  SummaryRecord rec;
  rec.step = pop.step_counter();
  rec.mean_policy = MeanPolicy(probs, n);
  rec.vertex_fraction = VertexConcentration(probs, n, kConcentrationRadius);
  rec.mean_value = rec.mean_policy.dot(game.payoff * rec.mean_policy);
  Eigen::VectorXd pg = MeanPolicyForRule(probs, n, pop.rules(), RuleTag::Kind::kPg);
  Eigen::VectorXd lola =
      MeanPolicyForRule(probs, n, pop.rules(), RuleTag::Kind::kLola);
  if (pg.size() > 0 && lola.size() > 0) {
    rec.mean_policy_pg = std::move(pg);
    rec.mean_policy_lola = std::move(lola);
  }
  return rec;
}

std::vector<int> SnapshotSubsample(int n_agents, int limit, std::uint64_t seed) {
  std::vector<int> ids;
  if (limit <= 0) return ids;
  if (n_agents <= limit) {
    ids.resize(n_agents);
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
  }
  // Selection sampling keeps the ids sorted.
  std::mt19937_64 rng(seed ^ kSnapshotStreamSalt);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int needed = limit;
  for (int i = 0; i < n_agents && needed > 0; ++i) {
    const int remaining = n_agents - i;
    if (unit(rng) * remaining < needed) {
      ids.push_back(i);
      --needed;
    }
  }
  return ids;
}

RunResult RunEvolution(Population pop, const GameSpec& game,
                       const EvolutionConfig& cfg, RecordSink* sink) {
  cfg.Validate();
  if (game.n != pop.n_actions()) throw ShapeError("game/population action count mismatch");
  const std::vector<int> snapshot_ids =
      cfg.snapshot_agents
          ? SnapshotSubsample(pop.n_agents(), *cfg.snapshot_agents, cfg.seed)
          : std::vector<int>{};

  RunResult result{pop, {}};
  Population& state = result.population;
  auto record = [&]() {
    SummaryRecord summary = Summarize(state, game);
    if (sink != nullptr) {
      sink->OnSummary(summary);
      if (!snapshot_ids.empty()) {
        std::vector<SnapshotRow> rows;
        rows.reserve(snapshot_ids.size());
        for (int id : snapshot_ids) {
          const Eigen::VectorXd p = state.policy(id);
          rows.push_back({state.step_counter(), id, state.rules()[id],
                          std::vector<double>(p.data(), p.data() + p.size())});
        }
        sink->OnSnapshot(rows);
      }
    }
    result.summaries.push_back(std::move(summary));
  };

  record();
  for (std::int64_t s = 1; s <= cfg.steps; ++s) {
    EvolutionStep(state, game, cfg);
    if (s % cfg.record_every == 0) record();
  }
  if (sink != nullptr) sink->Finish();
  return result;
}

Float32Population ToFloat32(const Population& pop) {
  Float32Population out;
  out.n_agents = pop.n_agents();
  out.n_actions = pop.n_actions();
  out.theta.assign(pop.theta().begin(), pop.theta().end());
  out.rules = pop.rules();
  out.rng = pop.rng();
  return out;
}

void EvolutionStepF32(Float32Population& pop, const GameSpec& game, double lr,
                      int threads) {
  const PairingPlan plan = DrawPairing(pop.n_agents, pop.rng);
  DispatchBatchedUpdate<float>(pop.theta.data(), pop.n_agents, pop.n_actions,
                               pop.rules, game, static_cast<float>(lr), plan,
                               threads);
}

}  // namespace evopop
