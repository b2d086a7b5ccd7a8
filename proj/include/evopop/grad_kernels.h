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

#ifndef EVOPOP_GRAD_KERNELS_H_
#define EVOPOP_GRAD_KERNELS_H_

// Allocation-free gradient kernels used by the batched engine. They compute
// the same quantities as PgGradFromProbs / LolaGradFromContext, but apply the
// softmax Jacobians as J v = p . (v - (p^T v) 1) instead of materialising the
// n x n matrices, so every term is O(n^2).
//
// Dim > 0 fixes the action count at compile time; Dim == 0 reads it from n.
// A is row-major n x n.

#include <array>
#include <vector>

namespace evopop::kernels {

inline constexpr int kMaxStackDim = 8;

template <typename Real, int Dim>
class Scratch {
 public:
  explicit Scratch(int n) {
    if constexpr (Dim == 0) heap_.resize(static_cast<std::size_t>(n) * kSlots);
  }
  Real* slot(int k, int n) {
    if constexpr (Dim == 0) {
      return heap_.data() + static_cast<std::size_t>(k) * n;
    } else {
      return stack_.data() + k * Dim;
    }
  }

 private:
  static constexpr int kSlots = 6;
  std::array<Real, (Dim > 0 ? Dim : 1) * kSlots> stack_{};
  std::vector<Real> heap_;
};

template <int Dim>
constexpr int Size(int n) {
  return Dim > 0 ? Dim : n;
}

// out = J(p) v = p . (v - (p^T v) 1)
template <typename Real, int Dim>
inline void ApplyJacobian(const Real* p, const Real* v, int n, Real* out) {
  const int d = Size<Dim>(n);
  Real dot = 0;
  for (int i = 0; i < d; ++i) dot += p[i] * v[i];
  for (int i = 0; i < d; ++i) out[i] = p[i] * (v[i] - dot);
}

// out = M x
template <typename Real, int Dim>
inline void MatVec(const Real* m, const Real* x, int n, Real* out) {
  const int d = Size<Dim>(n);
  for (int i = 0; i < d; ++i) {
    Real acc = 0;
    for (int j = 0; j < d; ++j) acc += m[i * d + j] * x[j];
    out[i] = acc;
  }
}

// out = M^T x
template <typename Real, int Dim>
inline void MatTVec(const Real* m, const Real* x, int n, Real* out) {
  const int d = Size<Dim>(n);
  for (int j = 0; j < d; ++j) out[j] = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out[j] += m[i * d + j] * x[i];
  }
}

// Naive policy gradient of the ego agent.
template <typename Real, int Dim>
inline void PgGrad(const Real* a, const Real* p1, const Real* p2, int n,
                   Scratch<Real, Dim>& scratch, Real* out) {
  Real* q = scratch.slot(0, n);
  MatVec<Real, Dim>(a, p2, n, q);
  ApplyJacobian<Real, Dim>(p1, q, n, out);
}

// LOLA gradient of the ego agent. Uses
//   (d2 v1 / d1 d2)^T u = J1 A J2 u,   (d2 v2 / d1 d2)^T u = J1 A^T J2 u,
// so the whole update is J1 (A p2 + eta (A J2 g22 + A^T J2 g21)) with
// g22 = J2 A p1 (opponent's own gradient) and g21 = J2 A^T p1.
template <typename Real, int Dim>
inline void LolaGrad(const Real* a, const Real* p1, const Real* p2, Real eta,
                     int n, Scratch<Real, Dim>& scratch, Real* out) {
  const int d = Size<Dim>(n);
  Real* q = scratch.slot(0, n);
  Real* tmp = scratch.slot(1, n);
  Real* g22 = scratch.slot(2, n);
  Real* g21 = scratch.slot(3, n);
  Real* w = scratch.slot(4, n);
  Real* z = scratch.slot(5, n);

  MatVec<Real, Dim>(a, p1, n, tmp);
  ApplyJacobian<Real, Dim>(p2, tmp, n, g22);
  MatTVec<Real, Dim>(a, p1, n, tmp);
  ApplyJacobian<Real, Dim>(p2, tmp, n, g21);

  MatVec<Real, Dim>(a, p2, n, q);
  ApplyJacobian<Real, Dim>(p2, g22, n, w);
  MatVec<Real, Dim>(a, w, n, z);
  for (int i = 0; i < d; ++i) q[i] += eta * z[i];
  ApplyJacobian<Real, Dim>(p2, g21, n, w);
  MatTVec<Real, Dim>(a, w, n, z);
  for (int i = 0; i < d; ++i) q[i] += eta * z[i];
  ApplyJacobian<Real, Dim>(p1, q, n, out);
}

}  // namespace evopop::kernels

#endif  // EVOPOP_GRAD_KERNELS_H_
