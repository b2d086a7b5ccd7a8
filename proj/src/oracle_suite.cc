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

#include "evopop/oracle_suite.h"

#include <algorithm>
#include <cstdio>
#include <random>

#include "evopop/dynamics.h"
#include "evopop/games.h"
#include "evopop/grad.h"
#include "evopop/grad_kernels.h"
#include "evopop/policy.h"

namespace evopop {
namespace {

constexpr double kFdTolerance = 1e-5;
constexpr double kExactTolerance = 1e-12;
constexpr double kTangencyTolerance = 1e-10;
constexpr double kEta = 1.0;
constexpr double kRange = 5.0;

double MaxAbs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

Eigen::VectorXd KernelLola(const Eigen::MatrixXd& a, const Eigen::VectorXd& p1,
                           const Eigen::VectorXd& p2, double eta) {
  const int n = static_cast<int>(a.rows());
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = a;
  kernels::Scratch<double, 0> scratch(n);
  Eigen::VectorXd out(n);
  kernels::LolaGrad<double, 0>(rm.data(), p1.data(), p2.data(), eta, n, scratch,
                               out.data());
  return out;
}

}  // namespace

bool OracleReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const OracleCheck& c) { return c.passed(); });
}

std::string OracleReport::Format() const {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-30s %-10s %12s %10s  %s\n", "identity", "game",
                "max_dev", "tol", "result");
  out += buf;
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof(buf), "%-30s %-10s %12.3e %10.1e  %s\n",
                  c.identity.c_str(), c.game.c_str(), c.max_deviation, c.tolerance,
                  c.passed() ? "PASS" : "FAIL");
    out += buf;
  }
  return out;
}

OracleReport RunOracleSuite(int trials, std::uint64_t seed) {
  const std::vector<GameSpec> games = {StagHunt(1.8), HawkDove(-2.0),
                                       RockPaperScissors()};
  OracleReport report;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-kRange, kRange);

  for (const GameSpec& game : games) {
    const Eigen::MatrixXd& a = game.payoff;
    const Eigen::MatrixXd at = a.transpose();
    const int n = game.n;
    auto check = [&](const std::string& identity, double tol) {
      return OracleCheck{identity, game.name, 0.0, tol, trials};
    };
    OracleCheck pg_fd = check("pg_grad vs fd", kFdTolerance);
    OracleCheck cross_fd = check("cross_grad vs fd", kFdTolerance);
    OracleCheck hess_v2_fd = check("cross_hessian(v2) vs fd", kFdTolerance);
    OracleCheck hess_v1_fd = check("cross_hessian(v1) vs fd", kFdTolerance);
    OracleCheck lola_fd = check("lola_grad vs taylor(fd)", kFdTolerance);
    OracleCheck factor = check("factorization identity", kExactTolerance);
    OracleCheck replicator = check("pg == replicator_rhs", kExactTolerance);
    OracleCheck kernel = check("batched kernel == lola_grad", kExactTolerance);
    OracleCheck tangency = check("tangency (sum of grads)", kTangencyTolerance);
    OracleCheck gauge = check("gauge invariance", kExactTolerance);

    auto update = [](OracleCheck& c, double dev) {
      c.max_deviation = std::max(c.max_deviation, dev);
    };

    for (int t = 0; t < trials; ++t) {
      Eigen::VectorXd theta1(n), theta2(n);
      for (int i = 0; i < n; ++i) theta1[i] = coord(rng);
      for (int i = 0; i < n; ++i) theta2[i] = coord(rng);
      const Eigen::VectorXd p1 = Softmax(theta1);
      const Eigen::VectorXd p2 = Softmax(theta2);

      auto v1 = [&](const Eigen::VectorXd& t1, const Eigen::VectorXd& t2) {
        return Value(Softmax(t1), Softmax(t2), a);
      };
      auto v2 = [&](const Eigen::VectorXd& t1, const Eigen::VectorXd& t2) {
        return Value(Softmax(t2), Softmax(t1), a);
      };

      const Eigen::VectorXd fd11 = FdGradOracle(
          [&](const Eigen::VectorXd& t) { return v1(t, theta2); }, theta1);
      const Eigen::VectorXd fd21 = FdGradOracle(
          [&](const Eigen::VectorXd& t) { return v1(theta1, t); }, theta2);
      const Eigen::VectorXd fd22 = FdGradOracle(
          [&](const Eigen::VectorXd& t) { return v2(theta1, t); }, theta2);
      const Eigen::MatrixXd fd_h1 = FdCrossHessianOracle(v1, theta1, theta2);
      const Eigen::MatrixXd fd_h2 = FdCrossHessianOracle(v2, theta1, theta2);

      const Eigen::VectorXd pg = PgGrad(theta1, p2, a);
      const Eigen::MatrixXd h2 = CrossHessian(p1, p2, a);
      const Eigen::MatrixXd h1 = CrossHessian(p1, p2, at);
      const Eigen::VectorXd lola = LolaGrad(theta1, theta2, a, kEta);

      update(pg_fd, MaxAbs(pg - fd11));
      update(cross_fd, MaxAbs(CrossGrad(p2, p1, a) - fd21));
      update(hess_v2_fd, MaxAbs(h2 - fd_h2));
      update(hess_v1_fd, MaxAbs(h1 - fd_h1));
      const Eigen::VectorXd taylor =
          fd11 + kEta * fd_h1.transpose() * fd22 + kEta * fd_h2.transpose() * fd21;
      update(lola_fd, MaxAbs(lola - taylor));
      update(factor, MaxAbs(h2 - CrossHessianUnfactorized(p1, p2, a)));
      update(replicator, MaxAbs(pg - ReplicatorRhs(p1, a * p2)));
      update(kernel, MaxAbs(KernelLola(a, p1, p2, kEta) - lola));
      update(tangency, std::max(std::abs(pg.sum()), std::abs(lola.sum())));

      const double shift = coord(rng);
      const Eigen::VectorXd shifted1 = theta1.array() + shift;
      const Eigen::VectorXd shifted2 = theta2.array() - shift;
      update(gauge, MaxAbs(LolaGrad(shifted1, shifted2, a, kEta) - lola));
    }
    for (OracleCheck* c : {&pg_fd, &cross_fd, &hess_v2_fd, &hess_v1_fd, &lola_fd,
                           &factor, &replicator, &kernel, &tangency, &gauge}) {
      report.checks.push_back(*c);
    }
  }
  return report;
}

}  // namespace evopop
