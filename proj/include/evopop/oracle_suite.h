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

#ifndef EVOPOP_ORACLE_SUITE_H_
#define EVOPOP_ORACLE_SUITE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace evopop {

struct OracleCheck {
  std::string identity;
  std::string game;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  int trials = 0;

  bool passed() const { return max_deviation <= tolerance; }
};

struct OracleReport {
  std::vector<OracleCheck> checks;

  bool all_passed() const;
  // One line per check: identity, game, max deviation, tolerance, verdict.
  std::string Format() const;
};

// Compares every analytical gradient against finite differences and the
// algebraic identities it must satisfy, over `trials` random preference
// pairs with entries uniform in [-5, 5], for Stag Hunt (s = 1.8), Hawk-Dove
// (f = -2) and Rock-Paper-Scissors. LOLA terms use eta = 1.
OracleReport RunOracleSuite(int trials, std::uint64_t seed);

}  // namespace evopop

#endif  // EVOPOP_ORACLE_SUITE_H_
