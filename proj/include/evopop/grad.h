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

#ifndef EVOPOP_GRAD_H_
#define EVOPOP_GRAD_H_

#include <functional>

#include <Eigen/Dense>

namespace evopop {

// Conventions. Agent 1 is the ego, agent 2 the opponent, A the ego-seat
// payoff matrix. v1 = p1^T A p2 and v2 = p2^T A p1. Mixed second derivatives
// are returned with rows indexed by theta2 and columns by theta1, i.e.
// H(j, i) = d^2 v / (d theta2_j d theta1_i).
//
// All updates built on these gradients are ascent steps on the agent's own
// value.

// Matrices shared by the second-order terms.
struct GradContext {
  Eigen::VectorXd p1;
  Eigen::VectorXd p2;
  Eigen::MatrixXd x1;  // I - 1 p1^T
  Eigen::MatrixXd x2;  // I - 1 p2^T
  Eigen::MatrixXd t;   // p2 p1^T

  static GradContext Make(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2);
};

// p1^T A p2. Throws ShapeError on mismatched sizes.
double Value(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2,
             const Eigen::MatrixXd& a);

// d v1 / d theta1 = p1 . (A p2 - 1 v1), with p1 = softmax(theta1).
Eigen::VectorXd PgGrad(const Eigen::VectorXd& theta1, const Eigen::VectorXd& p2,
                       const Eigen::MatrixXd& a);
Eigen::VectorXd PgGradFromProbs(const Eigen::VectorXd& p1,
                                const Eigen::VectorXd& p2,
                                const Eigen::MatrixXd& a);

// d v1 / d theta2 = p2 . X2 A^T p1.
Eigen::VectorXd CrossGrad(const Eigen::VectorXd& p2, const Eigen::VectorXd& p1,
                          const Eigen::MatrixXd& a);

// d^2 v2 / (d theta1 d theta2) = T . X2 A X1^T. Pass A^T to get the same
// derivative of v1.
Eigen::MatrixXd CrossHessian(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2,
                             const Eigen::MatrixXd& a);

// (diag(p2) - p2 p2^T) A (diag(p1) - p1 p1^T); equal to CrossHessian.
Eigen::MatrixXd CrossHessianUnfactorized(const Eigen::VectorXd& p1,
                                         const Eigen::VectorXd& p2,
                                         const Eigen::MatrixXd& a);

// First-order LOLA gradient of agent 1, who models agent 2 as a naive learner
// with step eta:
//   p1 . X1 A p2
//   + eta (T^T . X1 A X2^T) (p2 . X2 A p1)
//   + eta (T^T . X1 A^T X2^T) (p2 . X2 A^T p1)
// eta = 0 reduces to PgGrad. Throws ParameterDomainError for eta < 0.
Eigen::VectorXd LolaGrad(const Eigen::VectorXd& theta1,
                         const Eigen::VectorXd& theta2,
                         const Eigen::MatrixXd& a, double eta);
Eigen::VectorXd LolaGradFromContext(const GradContext& ctx,
                                    const Eigen::MatrixXd& a, double eta);

// Finite-difference oracles. Independent of everything above.

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
using PairScalarFn =
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

inline constexpr double kFirstOrderStep = 1e-5;
inline constexpr double kSecondOrderStep = 1e-4;

// Central differences per coordinate.
Eigen::VectorXd FdGradOracle(const ScalarFn& f, const Eigen::VectorXd& theta,
                             double step = kFirstOrderStep);

// Nested central differences: outer over theta1, inner over theta2. Same
// row/column convention as CrossHessian.
Eigen::MatrixXd FdCrossHessianOracle(const PairScalarFn& v,
                                     const Eigen::VectorXd& theta1,
                                     const Eigen::VectorXd& theta2,
                                     double step = kSecondOrderStep);

}  // namespace evopop

#endif  // EVOPOP_GRAD_H_
