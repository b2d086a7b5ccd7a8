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


#include "evopop/grad.h"

#include <cmath>
#include <random>

#include "doctest.h"
#include "evopop/dynamics.h"
#include "evopop/errors.h"
#include "evopop/games.h"
#include "evopop/grad_kernels.h"
#include "evopop/oracle_suite.h"
#include "evopop/policy.h"

namespace evopop {
namespace {

Eigen::VectorXd Vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Eigen::VectorXd RandomTheta(std::mt19937_64& rng, int n, double bound = 5.0) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Eigen::VectorXd t(n);
  for (int i = 0; i < n; ++i) t[i] = u(rng);
  return t;
}

double MaxAbs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

const Eigen::VectorXd kUniform3 = Eigen::VectorXd::Constant(3, 1.0 / 3.0);

std::vector<GameSpec> Games() { return {StagHunt(1.8), HawkDove(-2.0), RockPaperScissors()}; }

TEST_CASE("value examples") {
  const Eigen::MatrixXd rps = RockPaperScissors().payoff;
  CHECK(std::abs(Value(kUniform3, kUniform3, rps)) <= 1e-16);

  const Eigen::VectorXd half = Vec({0.5, 0.5});
  CHECK(std::abs(Value(half, half, StagHunt(1.8).payoff) - 0.95) <= 1e-15);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd p1 = Softmax(RandomTheta(rng, 3));
    const Eigen::VectorXd p2 = Softmax(RandomTheta(rng, 3));
    CHECK(std::abs(Value(p1, p2, rps) + Value(p2, p1, rps)) <= 1e-15);
  }
  CHECK_THROWS_AS(Value(half, kUniform3, rps), ShapeError);
  CHECK_THROWS_AS(Value(kUniform3, kUniform3, StagHunt(1.8).payoff), ShapeError);
}

TEST_CASE("grad context") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd p1 = Softmax(RandomTheta(rng, 4));
    const Eigen::VectorXd p2 = Softmax(RandomTheta(rng, 4));
    const GradContext ctx = GradContext::Make(p1, p2);
    CHECK(MaxAbs(p1.transpose() * ctx.x1) <= 1e-12);
    CHECK(MaxAbs(p2.transpose() * ctx.x2) <= 1e-12);
    CHECK(ctx.t.minCoeff() > 0.0);
    CHECK(ctx.t.maxCoeff() < 1.0);
    CHECK(MaxAbs(ctx.t - p2 * p1.transpose()) == 0.0);
  }
}

TEST_CASE("pg grad examples") {
  const Eigen::MatrixXd rps = RockPaperScissors().payoff;
  CHECK(MaxAbs(PgGrad(Eigen::VectorXd::Zero(3), kUniform3, rps)) <= 1e-17);

  const Eigen::VectorXd g = PgGrad(Vec({0, 0}), Vec({0.5, 0.5}), StagHunt(1.8).payoff);
  CHECK(std::abs(g[0] + 0.025) <= 1e-15);
  CHECK(std::abs(g[1] - 0.025) <= 1e-15);
  CHECK_THROWS_AS(PgGrad(Vec({0, 0}), kUniform3, rps), ShapeError);
}

TEST_CASE("pg grad equals the replicator right-hand side exactly") {
  std::mt19937_64 rng(3);
  for (const GameSpec& game : Games()) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Eigen::VectorXd theta1 = RandomTheta(rng, game.n);
      const Eigen::VectorXd p2 = Softmax(RandomTheta(rng, game.n));
      const Eigen::VectorXd pg = PgGrad(theta1, p2, game.payoff);
      const Eigen::VectorXd rhs = ReplicatorRhs(Softmax(theta1), game.payoff * p2);
      REQUIRE(MaxAbs(pg - rhs) <= 1e-12);
    }
  }
}

TEST_CASE("cross grad examples") {
  const Eigen::MatrixXd rps = RockPaperScissors().payoff;
  CHECK(MaxAbs(CrossGrad(kUniform3, kUniform3, rps)) <= 1e-17);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd p1 = Softmax(RandomTheta(rng, 3));
    const Eigen::VectorXd p2 = Softmax(RandomTheta(rng, 3));
    const Eigen::VectorXd expected = -PgGradFromProbs(p2, p1, rps);
    CHECK(MaxAbs(CrossGrad(p2, p1, rps) - expected) <= 1e-12);
  }

  const Eigen::MatrixXd hd = HawkDove(-2.0).payoff;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd theta1 = RandomTheta(rng, 2);
    const Eigen::VectorXd theta2 = RandomTheta(rng, 2);
    const Eigen::VectorXd p1 = Softmax(theta1);
    const Eigen::VectorXd fd = FdGradOracle(
        [&](const Eigen::VectorXd& t2) { return Value(p1, Softmax(t2), hd); }, theta2);
    CHECK(MaxAbs(CrossGrad(Softmax(theta2), p1, hd) - fd) <= 1e-6);
  }
}

TEST_CASE("cross hessian examples") {
  const Eigen::MatrixXd rps = RockPaperScissors().payoff;
  CHECK(MaxAbs(CrossHessian(kUniform3, kUniform3, rps) - rps / 9.0) <= 1e-16);

  std::mt19937_64 rng(5);
  const Eigen::MatrixXd sh = StagHunt(1.8).payoff;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd p1 = Softmax(RandomTheta(rng, 2));
    const Eigen::VectorXd p2 = Softmax(RandomTheta(rng, 2));
    REQUIRE(MaxAbs(CrossHessian(p1, p2, sh) - CrossHessianUnfactorized(p1, p2, sh)) <=
            1e-12);
  }

  const Eigen::MatrixXd hd = HawkDove(-2.0).payoff;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd theta1 = RandomTheta(rng, 2);
    const Eigen::VectorXd theta2 = RandomTheta(rng, 2);
    const Eigen::MatrixXd fd = FdCrossHessianOracle(
        [&](const Eigen::VectorXd& t1, const Eigen::VectorXd& t2) {
          return Value(Softmax(t2), Softmax(t1), hd);
        },
        theta1, theta2);
    CHECK(MaxAbs(CrossHessian(Softmax(theta1), Softmax(theta2), hd) - fd) <= 1e-5);
  }
}

TEST_CASE("factorization identity on every game and size") {
  std::mt19937_64 rng(6);
  for (int n = 2; n <= 6; ++n) {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n) * 3.0;
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::VectorXd p1 = Softmax(RandomTheta(rng, n));
      const Eigen::VectorXd p2 = Softmax(RandomTheta(rng, n));
      REQUIRE(MaxAbs(CrossHessian(p1, p2, a) - CrossHessianUnfactorized(p1, p2, a)) <=
              1e-12);
    }
  }
}

TEST_CASE("lola grad examples") {
  std::mt19937_64 rng(7);
  for (const GameSpec& game : Games()) {
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::VectorXd theta1 = RandomTheta(rng, game.n);
      const Eigen::VectorXd theta2 = RandomTheta(rng, game.n);
      const Eigen::VectorXd lola = LolaGrad(theta1, theta2, game.payoff, 0.0);
      const Eigen::VectorXd pg = PgGrad(theta1, Softmax(theta2), game.payoff);
      REQUIRE(lola == pg);
    }
  }

  const Eigen::MatrixXd rps = RockPaperScissors().payoff;
  CHECK(MaxAbs(LolaGrad(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3), rps, 1.0)) <=
        1e-17);
  CHECK_THROWS_AS(LolaGrad(Vec({0, 0}), Vec({0, 0}), StagHunt(1.8).payoff, -1.0),
                  ParameterDomainError);
}

// Expansion of the look-ahead value to first order, with every derivative
// taken numerically.
Eigen::VectorXd TaylorAssembly(const Eigen::VectorXd& theta1, const Eigen::VectorXd& theta2,
                               const Eigen::MatrixXd& a, double eta) {
  auto v1 = [&](const Eigen::VectorXd& t1, const Eigen::VectorXd& t2) {
    return Value(Softmax(t1), Softmax(t2), a);
  };
  auto v2 = [&](const Eigen::VectorXd& t1, const Eigen::VectorXd& t2) {
    return Value(Softmax(t2), Softmax(t1), a);
  };
  const Eigen::VectorXd g11 =
      FdGradOracle([&](const Eigen::VectorXd& t) { return v1(t, theta2); }, theta1);
  const Eigen::VectorXd g21 =
      FdGradOracle([&](const Eigen::VectorXd& t) { return v1(theta1, t); }, theta2);
  const Eigen::VectorXd g22 =
      FdGradOracle([&](const Eigen::VectorXd& t) { return v2(theta1, t); }, theta2);
  const Eigen::MatrixXd h2 = FdCrossHessianOracle(v2, theta1, theta2);
  const Eigen::MatrixXd h1 = FdCrossHessianOracle(v1, theta1, theta2);
  return g11 + eta * h1.transpose() * g22 + eta * h2.transpose() * g21;
}

TEST_CASE("lola grad matches the numerical taylor assembly") {
  std::mt19937_64 rng(8);
  for (const GameSpec& game : Games()) {
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd theta1 = RandomTheta(rng, game.n);
      const Eigen::VectorXd theta2 = RandomTheta(rng, game.n);
      const Eigen::VectorXd lola = LolaGrad(theta1, theta2, game.payoff, 1.0);
      CHECK(MaxAbs(lola - TaylorAssembly(theta1, theta2, game.payoff, 1.0)) <= 1e-5);
    }
  }
}

TEST_CASE("gauge invariance and tangency") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> shift(-20.0, 20.0);
  for (const GameSpec& game : Games()) {
    for (int trial = 0; trial < 500; ++trial) {
      const Eigen::VectorXd theta1 = RandomTheta(rng, game.n);
      const Eigen::VectorXd theta2 = RandomTheta(rng, game.n);
      const Eigen::VectorXd s1 = theta1.array() + shift(rng);
      const Eigen::VectorXd s2 = theta2.array() + shift(rng);
      const Eigen::VectorXd pg = PgGrad(theta1, Softmax(theta2), game.payoff);
      const Eigen::VectorXd lola = LolaGrad(theta1, theta2, game.payoff, 1.0);
      CHECK(MaxAbs(PgGrad(s1, Softmax(s2), game.payoff) - pg) <= 1e-12);
      CHECK(MaxAbs(LolaGrad(s1, theta2, game.payoff, 1.0) - lola) <= 1e-12);
      CHECK(MaxAbs(LolaGrad(theta1, s2, game.payoff, 1.0) - lola) <= 1e-12);
      CHECK(std::abs(pg.sum()) <= 1e-10);
      CHECK(std::abs(lola.sum()) <= 1e-10);
    }
  }
}

TEST_CASE("fd gradient oracle") {
  const Eigen::MatrixXd sh = StagHunt(1.8).payoff;
  const Eigen::VectorXd half = Vec({0.5, 0.5});
  const Eigen::VectorXd g = FdGradOracle(
      [&](const Eigen::VectorXd& t) { return Value(Softmax(t), half, sh); }, Vec({0, 0}));
  CHECK(std::abs(g[0] + 0.025) <= 1e-8);
  CHECK(std::abs(g[1] - 0.025) <= 1e-8);

  const Eigen::VectorXd x = Vec({0.3, -0.2, 0.5});
  CHECK(MaxAbs(FdGradOracle([](const Eigen::VectorXd&) { return 4.2; }, x)) <= 1e-12);

  const Eigen::VectorXd w = Vec({1.5, -0.25, 3.0});
  const Eigen::VectorXd lin = FdGradOracle(
      [&](const Eigen::VectorXd& t) { return w.dot(t) + 2.0; }, x);
  CHECK(MaxAbs(lin - w) <= 1e-10);
}

TEST_CASE("fd cross hessian oracle") {
  const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(3, 3, 3.0);
  const Eigen::MatrixXd zero = FdCrossHessianOracle(
      [&](const Eigen::VectorXd& t1, const Eigen::VectorXd& t2) {
        return Value(Softmax(t1), Softmax(t2), flat);
      },
      Vec({0.1, 0.2, -0.3}), Vec({1.0, 0.0, -1.0}));
  // Only roundoff survives: about eps * |v| / step^2.
  CHECK(MaxAbs(zero) <= 1e-7);

  const Eigen::MatrixXd rps = RockPaperScissors().payoff;
  const Eigen::MatrixXd uniform = FdCrossHessianOracle(
      [&](const Eigen::VectorXd& t1, const Eigen::VectorXd& t2) {
        return Value(Softmax(t2), Softmax(t1), rps);
      },
      Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3));
  CHECK(MaxAbs(uniform - rps / 9.0) <= 1e-5);

  // Orientation: rows follow the second argument, columns the first.
  const Eigen::MatrixXd b = (Eigen::MatrixXd(2, 3) << 1, 2, 3, 4, 5, 6).finished();
  const Eigen::MatrixXd bilinear = FdCrossHessianOracle(
      [&](const Eigen::VectorXd& t1, const Eigen::VectorXd& t2) {
        return t2.dot(b * t1);
      },
      Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2));
  CHECK(MaxAbs(bilinear - b) <= 1e-8);
}

template <int Dim>
void CheckKernelsAgainstReference(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n) * 2.0;
  std::vector<double> a_row(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a_row[i * n + j] = a(i, j);
  }
  kernels::Scratch<double, Dim> scratch(n);
  std::vector<double> out(n);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::VectorXd p1 = Softmax(RandomTheta(rng, n));
    const Eigen::VectorXd p2 = Softmax(RandomTheta(rng, n));
    const double eta = std::uniform_real_distribution<double>(0.0, 2.0)(rng);

    kernels::PgGrad<double, Dim>(a_row.data(), p1.data(), p2.data(), n, scratch, out.data());
    const Eigen::VectorXd pg = PgGradFromProbs(p1, p2, a);
    for (int k = 0; k < n; ++k) REQUIRE(std::abs(out[k] - pg[k]) <= 1e-12);

    kernels::LolaGrad<double, Dim>(a_row.data(), p1.data(), p2.data(), eta, n, scratch,
                                   out.data());
    const Eigen::VectorXd lola = LolaGradFromContext(GradContext::Make(p1, p2), a, eta);
    for (int k = 0; k < n; ++k) REQUIRE(std::abs(out[k] - lola[k]) <= 1e-12);

    std::vector<double> kernel_pg(n);
    kernels::PgGrad<double, Dim>(a_row.data(), p1.data(), p2.data(), n, scratch,
                                 kernel_pg.data());
    kernels::LolaGrad<double, Dim>(a_row.data(), p1.data(), p2.data(), 0.0, n, scratch,
                                   out.data());
    for (int k = 0; k < n; ++k) REQUIRE(out[k] == kernel_pg[k]);
  }
}

TEST_CASE("allocation-free kernels agree with the matrix formulas") {
  CheckKernelsAgainstReference<2>(2, 10);
  CheckKernelsAgainstReference<3>(3, 11);
  CheckKernelsAgainstReference<0>(3, 12);
  CheckKernelsAgainstReference<0>(5, 13);
  CheckKernelsAgainstReference<0>(9, 14);
}

TEST_CASE("single precision kernels stay close") {
  const Eigen::MatrixXd a = RockPaperScissors().payoff;
  const float a_row[9] = {0, -1, 1, 1, 0, -1, -1, 1, 0};
  const Eigen::VectorXd p1 = Softmax(Vec({0.3, -0.2, 0.5}));
  const Eigen::VectorXd p2 = Softmax(Vec({-1.0, 0.4, 0.1}));
  const float f1[3] = {float(p1[0]), float(p1[1]), float(p1[2])};
  const float f2[3] = {float(p2[0]), float(p2[1]), float(p2[2])};
  kernels::Scratch<float, 3> scratch(3);
  float out[3];
  kernels::LolaGrad<float, 3>(a_row, f1, f2, 1.0f, 3, scratch, out);
  const Eigen::VectorXd ref = LolaGradFromContext(GradContext::Make(p1, p2), a, 1.0);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(out[k] - ref[k]) <= 1e-6);
}

TEST_CASE("oracle suite passes") {
  const OracleReport report = RunOracleSuite(1000, 77);
  CHECK(report.all_passed());
  CHECK(report.checks.size() >= 27);
  for (const auto& c : report.checks) {
    INFO(c.identity << " on " << c.game);
    CHECK(c.passed());
    CHECK(c.trials == 1000);
  }
  const std::string table = report.Format();
  CHECK(table.find("lola_grad") != std::string::npos);
  CHECK(table.find("FAIL") == std::string::npos);
}

}  // namespace
}  // namespace evopop
