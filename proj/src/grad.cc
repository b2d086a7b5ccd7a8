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
#include <string>

#include "evopop/errors.h"
#include "evopop/policy.h"

namespace evopop {
namespace {

void CheckShapes(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2,
                 const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || p1.size() != a.rows() || p2.size() != a.rows()) {
    throw ShapeError("dimension mismatch: A is " + std::to_string(a.rows()) +
                     "x" + std::to_string(a.cols()) + ", vectors have " +
                     std::to_string(p1.size()) + " and " +
                     std::to_string(p2.size()) + " entries");
  }
}

}  // namespace

GradContext GradContext::Make(const Eigen::VectorXd& p1,
                              const Eigen::VectorXd& p2) {
  const auto n = p1.size();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  GradContext ctx;
  ctx.p1 = p1;
  ctx.p2 = p2;
  ctx.x1 = Eigen::MatrixXd::Identity(n, n) - ones * p1.transpose();
  ctx.x2 = Eigen::MatrixXd::Identity(n, n) - ones * p2.transpose();
  ctx.t = p2 * p1.transpose();
  return ctx;
}

double Value(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2,
             const Eigen::MatrixXd& a) {
  CheckShapes(p1, p2, a);
  return p1.dot(a * p2);
}

Eigen::VectorXd PgGradFromProbs(const Eigen::VectorXd& p1,
                                const Eigen::VectorXd& p2,
                                const Eigen::MatrixXd& a) {
  CheckShapes(p1, p2, a);
  const Eigen::VectorXd q = a * p2;
  const double v = p1.dot(q);
  return p1.cwiseProduct(q - Eigen::VectorXd::Constant(q.size(), v));
}

Eigen::VectorXd PgGrad(const Eigen::VectorXd& theta1, const Eigen::VectorXd& p2,
                       const Eigen::MatrixXd& a) {
  return PgGradFromProbs(Softmax(theta1), p2, a);
}

Eigen::VectorXd CrossGrad(const Eigen::VectorXd& p2, const Eigen::VectorXd& p1,
                          const Eigen::MatrixXd& a) {
  CheckShapes(p1, p2, a);
  const auto n = p2.size();
  const Eigen::MatrixXd x2 = Eigen::MatrixXd::Identity(n, n) -
                             Eigen::VectorXd::Ones(n) * p2.transpose();
  return p2.cwiseProduct(x2 * a.transpose() * p1);
}

Eigen::MatrixXd CrossHessian(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2,
                             const Eigen::MatrixXd& a) {
  CheckShapes(p1, p2, a);
  const GradContext ctx = GradContext::Make(p1, p2);
  return ctx.t.cwiseProduct(ctx.x2 * a * ctx.x1.transpose());
}

Eigen::MatrixXd CrossHessianUnfactorized(const Eigen::VectorXd& p1,
                                         const Eigen::VectorXd& p2,
                                         const Eigen::MatrixXd& a) {
  CheckShapes(p1, p2, a);
  return SoftmaxJacobian(p2) * a * SoftmaxJacobian(p1);
}

Eigen::VectorXd LolaGradFromContext(const GradContext& ctx,
                                    const Eigen::MatrixXd& a, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ParameterDomainError("look-ahead eta must be finite and >= 0");
  }
  CheckShapes(ctx.p1, ctx.p2, a);
  const Eigen::MatrixXd at = a.transpose();
  const Eigen::MatrixXd tt = ctx.t.transpose();
  // p1 . X1 A p2, evaluated by the PG routine so eta = 0 reproduces it bit
  // for bit.
  const Eigen::VectorXd naive = PgGradFromProbs(ctx.p1, ctx.p2, a);
  // Opponent's own naive step direction and its effect on our value.
  const Eigen::VectorXd opp_self = ctx.p2.cwiseProduct(ctx.x2 * a * ctx.p1);
  const Eigen::VectorXd opp_on_us = ctx.p2.cwiseProduct(ctx.x2 * at * ctx.p1);
  const Eigen::MatrixXd h1 = tt.cwiseProduct(ctx.x1 * a * ctx.x2.transpose());
  const Eigen::MatrixXd h2 = tt.cwiseProduct(ctx.x1 * at * ctx.x2.transpose());
  return naive + eta * (h1 * opp_self) + eta * (h2 * opp_on_us);
}

Eigen::VectorXd LolaGrad(const Eigen::VectorXd& theta1,
                         const Eigen::VectorXd& theta2,
                         const Eigen::MatrixXd& a, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ParameterDomainError("look-ahead eta must be finite and >= 0, got " +
                               std::to_string(eta));
  }
  return LolaGradFromContext(
      GradContext::Make(Softmax(theta1), Softmax(theta2)), a, eta);
}

Eigen::VectorXd FdGradOracle(const ScalarFn& f, const Eigen::VectorXd& theta,
                             double step) {
  if (!(step > 0.0)) throw ParameterDomainError("finite-difference step must be > 0");
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd probe = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + step;
    const double up = f(probe);
    probe[i] = theta[i] - step;
    const double down = f(probe);
    probe[i] = theta[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

Eigen::MatrixXd FdCrossHessianOracle(const PairScalarFn& v,
                                     const Eigen::VectorXd& theta1,
                                     const Eigen::VectorXd& theta2,
                                     double step) {
  if (!(step > 0.0)) throw ParameterDomainError("finite-difference step must be > 0");
  auto inner = [&](const Eigen::VectorXd& t1) {
    return FdGradOracle([&](const Eigen::VectorXd& t2) { return v(t1, t2); },
                        theta2, step);
  };
  Eigen::MatrixXd h(theta2.size(), theta1.size());
  Eigen::VectorXd probe = theta1;
  for (Eigen::Index i = 0; i < theta1.size(); ++i) {
    probe[i] = theta1[i] + step;
    const Eigen::VectorXd up = inner(probe);
    probe[i] = theta1[i] - step;
    const Eigen::VectorXd down = inner(probe);
    probe[i] = theta1[i];
    h.col(i) = (up - down) / (2.0 * step);
  }
  return h;
}

}  // namespace evopop
