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

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "evopop/errors.h"

namespace evopop {
namespace {

constexpr double kZeroSumTolerance = 1e-12;

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

GameKind ParseGameKind(std::string_view name) {
  if (name == "stag_hunt") return GameKind::kStagHunt;
  if (name == "hawk_dove") return GameKind::kHawkDove;
  if (name == "rps") return GameKind::kRps;
  if (name == "custom") return GameKind::kCustom;
  throw ParameterDomainError("unknown game '" + std::string(name) +
                             "' (expected stag_hunt, hawk_dove, rps, custom)");
}

std::string_view GameKindName(GameKind kind) {
  switch (kind) {
    case GameKind::kStagHunt:
      return "stag_hunt";
    case GameKind::kHawkDove:
      return "hawk_dove";
    case GameKind::kRps:
      return "rps";
    case GameKind::kCustom:
      return "custom";
  }
  return "unknown";
}

void ValidatePayoff(const Eigen::MatrixXd& payoff) {
  if (payoff.rows() != payoff.cols()) {
    throw ShapeError("payoff matrix must be square, got " +
                     std::to_string(payoff.rows()) + "x" +
                     std::to_string(payoff.cols()));
  }
  if (payoff.rows() < 2) {
    throw ShapeError("a game needs at least 2 actions");
  }
  if (!payoff.allFinite()) {
    throw NumericInputError("payoff matrix has non-finite entries");
  }
}

GameSpec StagHunt(double s) {
  if (!(s > 1.0) || !std::isfinite(s)) {
    throw ParameterDomainError("stag_hunt requires s > 1, got " +
                               std::to_string(s));
  }
  GameSpec g;
  g.name = "stag_hunt";
  g.n = 2;
  g.payoff.resize(2, 2);
  g.payoff << s, 0.0,
              1.0, 1.0;
  g.action_labels = {"Stag", "Hare"};
  g.params["s"] = s;
  return g;
}

GameSpec HawkDove(double f) {
  if (!(f < 0.0) || !std::isfinite(f)) {
    throw ParameterDomainError("hawk_dove requires f < 0, got " +
                               std::to_string(f));
  }
  GameSpec g;
  g.name = "hawk_dove";
  g.n = 2;
  g.payoff.resize(2, 2);
  g.payoff << f, 2.0,
              0.0, 1.0;
  g.action_labels = {"Hawk", "Dove"};
  g.params["f"] = f;
  return g;
}

GameSpec RockPaperScissors() {
  GameSpec g;
  g.name = "rps";
  g.n = 3;
  g.payoff.resize(3, 3);
  g.payoff << 0.0, -1.0, 1.0,
              1.0, 0.0, -1.0,
              -1.0, 1.0, 0.0;
  g.action_labels = {"Rock", "Paper", "Scissors"};
  return g;
}

GameSpec CustomGame(const Eigen::MatrixXd& payoff, std::string name) {
  ValidatePayoff(payoff);
  GameSpec g;
  g.name = std::move(name);
  g.n = static_cast<int>(payoff.rows());
  g.payoff = payoff;
  for (int i = 0; i < g.n; ++i) g.action_labels.push_back("a" + std::to_string(i));
  return g;
}

GameSpec BuildGame(GameKind kind, const std::map<std::string, double>& params) {
  auto require = [&](const char* key) {
    auto it = params.find(key);
    if (it == params.end()) {
      throw ParameterDomainError(std::string(GameKindName(kind)) +
                                 " requires parameter '" + key + "'");
    }
    return it->second;
  };
  switch (kind) {
    case GameKind::kStagHunt:
      return StagHunt(require("s"));
    case GameKind::kHawkDove:
      return HawkDove(require("f"));
    case GameKind::kRps:
      return RockPaperScissors();
    case GameKind::kCustom:
      break;
  }
  throw ShapeError("custom games need an explicit payoff matrix");
}

GameProperties ComputeGameProperties(const GameSpec& game) {
  GameProperties props;
  const Eigen::MatrixXd& a = game.payoff;
  props.row_sums = a.rowwise().sum();
  props.col_sums = a.colwise().sum().transpose();
  props.is_zero_sum = (a + a.transpose()).cwiseAbs().maxCoeff() <= kZeroSumTolerance;
  return props;
}

Eigen::MatrixXd LoadMatrixCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell = Trim(cell);
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ShapeError(path + ":" + std::to_string(line_no) +
                         ": not a number: '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) {
      throw ShapeError(path + ": row " + std::to_string(i) + " has " +
                       std::to_string(rows[i].size()) + " entries, expected " +
                       std::to_string(n));
    }
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  ValidatePayoff(m);
  return m;
}

}  // namespace evopop
