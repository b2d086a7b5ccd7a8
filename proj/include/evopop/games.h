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

#ifndef EVOPOP_GAMES_H_
#define EVOPOP_GAMES_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace evopop {

enum class GameKind { kStagHunt, kHawkDove, kRps, kCustom };

GameKind ParseGameKind(std::string_view name);
std::string_view GameKindName(GameKind kind);

// A symmetric two-player normal-form game. Only the ego-seat matrix is kept:
// payoff(i, j) is what the ego agent receives when it plays i against j. The
// opponent's payoff is read from the same matrix with the roles swapped.
struct GameSpec {
  std::string name;
  int n = 0;
  Eigen::MatrixXd payoff;
  std::vector<std::string> action_labels;
  std::map<std::string, double> params;
};

struct GameProperties {
  bool is_zero_sum = false;
  Eigen::VectorXd row_sums;
  Eigen::VectorXd col_sums;
};

// Stag Hunt: [[s, 0], [1, 1]], requires s > 1.
GameSpec StagHunt(double s);
// Hawk-Dove: [[f, 2], [0, 1]], requires f < 0.
GameSpec HawkDove(double f);
// Rock-Paper-Scissors, antisymmetric.
GameSpec RockPaperScissors();
// Any square finite matrix. The symmetric-game reading is assumed, not checked.
GameSpec CustomGame(const Eigen::MatrixXd& payoff, std::string name = "custom");

// Dispatches on kind. stag_hunt reads params["s"], hawk_dove reads
// params["f"]; custom games must go through CustomGame.
GameSpec BuildGame(GameKind kind, const std::map<std::string, double>& params);

GameProperties ComputeGameProperties(const GameSpec& game);

// Reads n rows of n comma-separated floats. Blank lines and lines starting
// with '#' are skipped.
Eigen::MatrixXd LoadMatrixCsv(const std::string& path);

// Throws ShapeError / NumericInputError when the matrix is not a valid payoff.
void ValidatePayoff(const Eigen::MatrixXd& payoff);

}  // namespace evopop

#endif  // EVOPOP_GAMES_H_
