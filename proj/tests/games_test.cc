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


#include "evopop/games.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "doctest.h"
#include "evopop/errors.h"

namespace evopop {
namespace {

std::string TempFile(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("evopop_games_" + name);
  std::ofstream(path) << text;
  return path.string();
}

TEST_CASE("stag hunt matrix") {
  const GameSpec g = StagHunt(1.8);
  CHECK(g.name == "stag_hunt");
  CHECK(g.n == 2);
  CHECK(g.payoff(0, 0) == 1.8);
  CHECK(g.payoff(0, 1) == 0.0);
  CHECK(g.payoff(1, 0) == 1.0);
  CHECK(g.payoff(1, 1) == 1.0);
  CHECK(g.action_labels == std::vector<std::string>{"Stag", "Hare"});
  CHECK(g.params.at("s") == 1.8);
}

TEST_CASE("hawk dove matrix") {
  const GameSpec g = HawkDove(-2.0);
  CHECK(g.n == 2);
  CHECK(g.payoff(0, 0) == -2.0);
  CHECK(g.payoff(0, 1) == 2.0);
  CHECK(g.payoff(1, 0) == 0.0);
  CHECK(g.payoff(1, 1) == 1.0);
  CHECK(g.params.at("f") == -2.0);
}

TEST_CASE("rps matrix is antisymmetric") {
  const GameSpec g = RockPaperScissors();
  Eigen::MatrixXd expected(3, 3);
  expected << 0, -1, 1,
              1, 0, -1,
              -1, 1, 0;
  CHECK(g.payoff == expected);
  CHECK((g.payoff + g.payoff.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.action_labels.size() == 3);
}

TEST_CASE("parameter domains") {
  CHECK_THROWS_AS(StagHunt(1.0), ParameterDomainError);
  CHECK_THROWS_AS(StagHunt(0.5), ParameterDomainError);
  CHECK_THROWS_AS(StagHunt(std::numeric_limits<double>::quiet_NaN()),
                  ParameterDomainError);
  CHECK_THROWS_AS(StagHunt(std::numeric_limits<double>::infinity()),
                  ParameterDomainError);
  CHECK_THROWS_AS(HawkDove(0.0), ParameterDomainError);
  CHECK_THROWS_AS(HawkDove(1.0), ParameterDomainError);
  CHECK_NOTHROW(StagHunt(1.0000001));
  CHECK_NOTHROW(HawkDove(-1e-9));
}

TEST_CASE("matrices match the tables across the valid domain") {
  for (double s = 1.05; s < 5.0; s += 0.35) {
    const GameSpec g = StagHunt(s);
    CHECK(g.payoff(0, 0) == s);
    CHECK(g.payoff.sum() == s + 2.0);
  }
  for (double f = -4.0; f < 0.0; f += 0.25) {
    const GameSpec g = HawkDove(f);
    CHECK(g.payoff(0, 0) == f);
    CHECK(g.payoff(0, 1) == 2.0);
  }
}

TEST_CASE("build game by kind") {
  CHECK(BuildGame(GameKind::kStagHunt, {{"s", 1.8}}).payoff == StagHunt(1.8).payoff);
  CHECK(BuildGame(GameKind::kHawkDove, {{"f", -2.0}}).payoff == HawkDove(-2.0).payoff);
  CHECK(BuildGame(GameKind::kRps, {}).payoff == RockPaperScissors().payoff);
  CHECK_THROWS_AS(BuildGame(GameKind::kStagHunt, {}), ParameterDomainError);
  CHECK_THROWS_AS(BuildGame(GameKind::kHawkDove, {{"s", 1.8}}), ParameterDomainError);
  CHECK_THROWS_AS(BuildGame(GameKind::kCustom, {}), ShapeError);
}

TEST_CASE("build game is pure") {
  const GameSpec a = StagHunt(1.37);
  const GameSpec b = StagHunt(1.37);
  CHECK(std::memcmp(a.payoff.data(), b.payoff.data(), 4 * sizeof(double)) == 0);
}

TEST_CASE("game kind names round-trip") {
  for (GameKind k : {GameKind::kStagHunt, GameKind::kHawkDove, GameKind::kRps,
                     GameKind::kCustom}) {
    CHECK(ParseGameKind(GameKindName(k)) == k);
  }
  CHECK_THROWS_AS(ParseGameKind("prisoners_dilemma"), ParameterDomainError);
}

TEST_CASE("game properties") {
  const GameProperties rps = ComputeGameProperties(RockPaperScissors());
  CHECK(rps.is_zero_sum);
  CHECK(rps.row_sums.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rps.col_sums.cwiseAbs().maxCoeff() == 0.0);

  CHECK_FALSE(ComputeGameProperties(HawkDove(-2.0)).is_zero_sum);

  const GameProperties sh = ComputeGameProperties(StagHunt(1.8));
  CHECK_FALSE(sh.is_zero_sum);
  CHECK(sh.row_sums[0] == doctest::Approx(1.8).epsilon(1e-15));
  CHECK(sh.row_sums[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sh.col_sums[0] == doctest::Approx(2.8).epsilon(1e-15));
  CHECK(sh.col_sums[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("zero-sum threshold") {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, -1 + 5e-13, 0;
  CHECK(ComputeGameProperties(CustomGame(a)).is_zero_sum);
  a(1, 0) = -1 + 1e-11;
  CHECK_FALSE(ComputeGameProperties(CustomGame(a)).is_zero_sum);
}

TEST_CASE("custom games") {
  Eigen::MatrixXd a(3, 3);
  a << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const GameSpec g = CustomGame(a, "mine");
  CHECK(g.name == "mine");
  CHECK(g.n == 3);
  CHECK(g.payoff == a);
  CHECK(g.action_labels.size() == 3);

  CHECK_THROWS_AS(CustomGame(Eigen::MatrixXd::Zero(2, 3)), ShapeError);
  CHECK_THROWS_AS(CustomGame(Eigen::MatrixXd::Zero(1, 1)), ShapeError);
  a(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(CustomGame(a), NumericInputError);
}

TEST_CASE("matrix csv loading") {
  const std::string ok = TempFile("ok.csv", "# a comment\n0, -1, 1\n1,0,-1\n\n-1,1,0\n");
  CHECK(LoadMatrixCsv(ok) == RockPaperScissors().payoff);

  const std::string ragged = TempFile("ragged.csv", "1,2\n3\n");
  CHECK_THROWS_AS(LoadMatrixCsv(ragged), ShapeError);
  const std::string rect = TempFile("rect.csv", "1,2,3\n4,5,6\n");
  CHECK_THROWS_AS(LoadMatrixCsv(rect), ShapeError);
  const std::string junk = TempFile("junk.csv", "1,x\n3,4\n");
  CHECK_THROWS_AS(LoadMatrixCsv(junk), ShapeError);
  CHECK_THROWS_AS(LoadMatrixCsv("/nonexistent/evopop/matrix.csv"), IoError);
}

}  // namespace
}  // namespace evopop
