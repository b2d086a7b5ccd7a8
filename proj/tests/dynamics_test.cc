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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "evopop/errors.h"
#include "evopop/grad.h"

namespace evopop {
namespace {

Eigen::VectorXd Vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

const Eigen::VectorXd kUniform3 = Eigen::VectorXd::Constant(3, 1.0 / 3.0);

TEST_CASE("self-play records every step") {
  const auto run = RunSelfPlay(Vec({0.2, -0.1}), Vec({0.0, 0.3}), RuleTag::Pg(),
                               RuleTag::Lola(1.0), HawkDove(-2.0), 1.0, 17);
  CHECK(run.steps == 17);
  CHECK(run.records.size() == 18);
  CHECK(run.rule1 == RuleTag::Pg());
  CHECK(run.rule2 == RuleTag::Lola(1.0));
  for (std::size_t t = 0; t < run.records.size(); ++t) {
    CHECK(run.records[t].step == static_cast<std::int64_t>(t));
  }
  const auto& first = run.records.front();
  CHECK(first.theta1 == Vec({0.2, -0.1}));
  CHECK(first.v1 == doctest::Approx(Value(first.p1, first.p2, HawkDove(-2.0).payoff)));
  CHECK(first.v2 == doctest::Approx(Value(first.p2, first.p1, HawkDove(-2.0).payoff)));
}

TEST_CASE("self-play updates are simultaneous") {
  const GameSpec game = StagHunt(1.8);
  const Eigen::VectorXd t1 = Vec({0.4, -0.3});
  const Eigen::VectorXd t2 = Vec({-0.2, 0.5});
  const auto run = RunSelfPlay(t1, t2, RuleTag::Lola(1.0), RuleTag::Pg(), game, 0.5, 1);
  const Eigen::VectorXd g1 = LolaGrad(t1, t2, game.payoff, 1.0);
  const Eigen::VectorXd g2 = PgGrad(t2, Softmax(t1), game.payoff);
  CHECK((run.records[1].theta1 - (t1 + 0.5 * g1)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((run.records[1].theta2 - (t2 + 0.5 * g2)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("pg self-play stays exactly symmetric") {
  const Eigen::VectorXd theta = Vec({0.3, -0.7, 0.1});
  const auto run = RunSelfPlay(theta, theta, RuleTag::Pg(), RuleTag::Pg(),
                               RockPaperScissors(), 1.0, 300);
  for (const auto& rec : run.records) REQUIRE(rec.theta1 == rec.theta2);
}

TEST_CASE("pg self-play in hawk dove reaches the mixed equilibrium") {
  const GameSpec game = HawkDove(-2.0);
  for (const auto& start : InitialPolicyGrid(2, kDefaultSelfPlayStarts, 0)) {
    const Eigen::VectorXd theta = PreferencesFor(start);
    const auto run = RunSelfPlay(theta, theta, RuleTag::Pg(), RuleTag::Pg(), game, 1.0, 5000);
    CHECK(std::abs(run.records.back().p1[0] - 1.0 / 3.0) <= 0.02);
    CHECK(std::abs(run.records.back().p2[0] - 1.0 / 3.0) <= 0.02);
  }
}

TEST_CASE("lola self-play in hawk dove plays hawk seventy percent of the time") {
  const GameSpec game = HawkDove(-2.0);
  for (const auto& start : InitialPolicyGrid(2, kDefaultSelfPlayStarts, 0)) {
    const Eigen::VectorXd theta = PreferencesFor(start);
    const auto run = RunSelfPlay(theta, theta, RuleTag::Lola(1.0), RuleTag::Lola(1.0), game,
                                 1.0, 5000);
    CHECK(std::abs(run.records.back().p1[0] - 0.70) <= 0.05);
    CHECK(std::abs(run.records.back().p2[0] - 0.70) <= 0.05);
  }
}

TEST_CASE("pg self-play in rps spirals out of the center") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd theta = Vec({jitter(rng), jitter(rng), jitter(rng)});
    const auto run = RunSelfPlay(theta, theta, RuleTag::Pg(), RuleTag::Pg(),
                                 RockPaperScissors(), 1.0, 500);
    std::vector<double> windows;
    double acc = 0.0;
    for (std::size_t t = 1; t < run.records.size(); ++t) {
      acc += DistanceFromUniform(run.records[t].p1);
      if (t % 100 == 0) {
        windows.push_back(acc / 100);
        acc = 0.0;
      }
    }
    CHECK(std::is_sorted(windows.begin(), windows.end()));
  }
}

TEST_CASE("lola self-play in rps spirals into the center") {
  // Starts drawn like the self-play grid: preferences uniform in [-1, 1].
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> pref(-1.0, 1.0);
  int inward = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const Eigen::VectorXd t1 = Vec({pref(rng), pref(rng), pref(rng)});
    const Eigen::VectorXd t2 = Vec({pref(rng), pref(rng), pref(rng)});
    const auto run = RunSelfPlay(t1, t2, RuleTag::Lola(1.0), RuleTag::Lola(1.0),
                                 RockPaperScissors(), 1.0, 200);
    inward += DistanceFromUniform(run.records.back().p1) <
                      DistanceFromUniform(run.records.front().p1)
                  ? 1
                  : 0;
  }
  CHECK(inward >= 0.99 * trials);
}

TEST_CASE("self-play errors") {
  const GameSpec game = StagHunt(1.8);
  CHECK_THROWS_AS(RunSelfPlay(Vec({0, 0, 0}), Vec({0, 0}), RuleTag::Pg(), RuleTag::Pg(),
                              game, 1.0, 1),
                  ShapeError);
  CHECK_THROWS_AS(RunSelfPlay(Vec({0, 0}), Vec({0, 0}), RuleTag::Pg(), RuleTag::Pg(), game,
                              0.0, 1),
                  ParameterDomainError);
  CHECK_THROWS_AS(RunSelfPlay(Vec({0, 0}), Vec({0, 0}), RuleTag::Pg(), RuleTag::Pg(), game,
                              1.0, -1),
                  ParameterDomainError);
  CHECK(RunSelfPlay(Vec({0, 0}), Vec({0, 0}), RuleTag::Pg(), RuleTag::Pg(), game, 1.0, 0)
            .records.size() == 1);
}

TEST_CASE("replicator right-hand side") {
  const Eigen::MatrixXd rps = RockPaperScissors().payoff;
  CHECK(ReplicatorRhs(kUniform3, rps * kUniform3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ReplicatorRhs(Vec({0.2, 0.5, 0.3}), Vec({4, 4, 4})).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd p = Softmax(Vec({u(rng), u(rng), u(rng), u(rng)}));
    const Eigen::VectorXd q = Vec({u(rng), u(rng), u(rng), u(rng)});
    REQUIRE(std::abs(ReplicatorRhs(p, q).sum()) <= 1e-12);
  }
  CHECK_THROWS_AS(ReplicatorRhs(kUniform3, Vec({1, 2})), ShapeError);
}

TEST_CASE("replicator integration") {
  const auto hd = RunReplicator(Vec({0.8, 0.2}), HawkDove(-2.0), 0.01, 100000);
  CHECK(hd.states.size() == 100001);
  CHECK(hd.renormalization.size() == 100000);
  CHECK(std::abs(hd.states.back()[0] - 1.0 / 3.0) <= 1e-3);
  CHECK(std::all_of(hd.renormalization.begin(), hd.renormalization.end(),
                    [](double r) { return std::abs(r - 1.0) <= 1e-12; }));

  const auto rps = RunReplicator(kUniform3, RockPaperScissors(), 0.1, 1000);
  CHECK((rps.states.back() - kUniform3).cwiseAbs().maxCoeff() <= 1e-9);

  const auto sh = RunReplicator(Vec({0.5, 0.5}), StagHunt(1.8), 0.1, 2000);
  CHECK(sh.states.back()[1] > 0.999);
  CHECK(std::all_of(sh.states.begin(), sh.states.end(), [](const Eigen::VectorXd& s) {
    return s.minCoeff() >= 0.0 && std::abs(s.sum() - 1.0) <= 1e-9;
  }));
}

TEST_CASE("replicator errors") {
  CHECK_THROWS_AS(RunReplicator(Vec({0.5, 0.5}), HawkDove(-2.0), 0.0, 1),
                  ParameterDomainError);
  CHECK_THROWS_AS(RunReplicator(kUniform3, HawkDove(-2.0), 0.1, 1), ShapeError);
  CHECK_THROWS_AS(RunReplicator(Vec({0.7, 0.7}), HawkDove(-2.0), 0.1, 1),
                  ParameterDomainError);
  // A step this large overshoots the simplex.
  CHECK_THROWS_AS(RunReplicator(Vec({0.9, 0.1}), HawkDove(-40.0), 5.0, 10), StepSizeError);
}

TEST_CASE("nash distance") {
  CHECK(NashDistance(Vec({0.2, 0.8}), Vec({0.2, 0.8})) == 0.0);
  CHECK(NashDistance(Vec({1, 0}), Vec({0, 1})) == 1.0);
  CHECK(std::abs(NashDistance(Vec({0.7, 0.3}), Vec({1.0 / 3, 2.0 / 3})) - 0.3667) <= 1e-4);
  CHECK_THROWS_AS(NashDistance(Vec({1, 0}), kUniform3), ShapeError);
}

TEST_CASE("distance from uniform") {
  CHECK(DistanceFromUniform(kUniform3) == doctest::Approx(0.0));
  CHECK(DistanceFromUniform(Vec({1, 0})) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("preferences invert softmax") {
  const Eigen::VectorXd p = Vec({0.1, 0.6, 0.3});
  CHECK((Softmax(PreferencesFor(p)) - p).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(PreferencesFor(Vec({1.0, 0.0})), ParameterDomainError);
}

TEST_CASE("initial policy grid") {
  const auto two = InitialPolicyGrid(2, 21, 0);
  REQUIRE(two.size() == 21);
  for (int k = 0; k < 21; ++k) {
    CHECK(two[k][0] == doctest::Approx((k + 1) / 22.0));
    CHECK(two[k].sum() == doctest::Approx(1.0));
  }
  const auto three = InitialPolicyGrid(3, 20, 4);
  REQUIRE(three.size() == 20);
  for (const auto& p : three) {
    CHECK(p.minCoeff() > 0.0);
    CHECK(p.sum() == doctest::Approx(1.0));
  }
  CHECK(InitialPolicyGrid(3, 20, 4)[7] == three[7]);
  CHECK_THROWS_AS(InitialPolicyGrid(2, 0, 0), ParameterDomainError);
}

}  // namespace
}  // namespace evopop
