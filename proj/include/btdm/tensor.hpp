/*
 * Copyright 2026 The BTDM Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BTDM_TENSOR_HPP
#define BTDM_TENSOR_HPP

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace btdm {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct Dims {
  Index t1 = 0;
  Index t2 = 0;
  Index n = 0;

  Index size() const { return t1 * t2 * n; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Dense third-order complex tensor of shape (t1, t2, n).
///
/// Storage is mode-1 fastest: element (i, j, k) lives at i + t1 * (j + t2 * k).
/// Frontal slice k is therefore a contiguous column-major t1 x t2 matrix.
class ComplexTensor3 {
 public:
  ComplexTensor3() = default;
  explicit ComplexTensor3(Dims dims);
  ComplexTensor3(Dims dims, std::vector<cplx> data);

  const Dims& dims() const { return dims_; }
  std::span<const cplx> data() const { return data_; }
  std::span<cplx> data() { return data_; }

  cplx& operator()(Index i, Index j, Index k) { return data_[offset(i, j, k)]; }
  const cplx& operator()(Index i, Index j, Index k) const { return data_[offset(i, j, k)]; }

  Eigen::Map<CMatrix> slice(Index k);
  Eigen::Map<const CMatrix> slice(Index k) const;

  /// All entries as one column vector, in storage order.
  Eigen::Map<const CVector> vec() const;
  Eigen::Map<CVector> vec();

  double norm() const;
  double squared_norm() const;
  bool all_finite() const;

  ComplexTensor3& operator+=(const ComplexTensor3& other);
  ComplexTensor3& operator-=(const ComplexTensor3& other);
  ComplexTensor3& operator*=(cplx s);

 private:
  Index offset(Index i, Index j, Index k) const { return i + dims_.t1 * (j + dims_.t2 * k); }
  void require_same_dims(const ComplexTensor3& other) const;

  Dims dims_;
  std::vector<cplx, Eigen::aligned_allocator<cplx>> data_;
};

ComplexTensor3 operator+(ComplexTensor3 a, const ComplexTensor3& b);
ComplexTensor3 operator-(ComplexTensor3 a, const ComplexTensor3& b);

/// One user's factors. The signal matrix is A * core * B^T, faded by h.
/// An empty core stands for the identity. Canonicalized terms carry an
/// explicit L x L core next to orthonormal A and B.
struct BlockTerm {
  CMatrix a;
  CMatrix b;
  CVector h;
  CMatrix core;

  Index rank() const { return a.cols(); }
  /// A * core * B^T, the T1 x T2 signal matrix.
  CMatrix signal() const;
};

/// Ordered sum of block terms sharing (T1, T2, N, L).
struct BTDModel {
  std::vector<BlockTerm> terms;
};

/// True when sigma_min >= 1e-10 * sigma_max.
bool has_full_column_rank(const CMatrix& m);

/// Checks shapes and full column rank; throws std::invalid_argument.
void validate_block_term(const BlockTerm& term);

ComplexTensor3 synthesize_block_term(const BlockTerm& term);

/// Sum of all terms plus optional noise. Throws on an empty model or on
/// any dimension mismatch.
ComplexTensor3 synthesize_received(const BTDModel& model, const ComplexTensor3* noise = nullptr);

/// Mode-n unfolding (mode in {1,2,3}), Kolda ordering:
///   mode 1: rows i, column j + T2*k
///   mode 2: rows j, column i + T1*k
///   mode 3: rows k, column i + T1*j
CMatrix unfold(const ComplexTensor3& x, int mode);
ComplexTensor3 refold(const CMatrix& m, int mode, Dims dims);

/// ||Y - sum_k (A_k core_k B_k^T) o h_k||_F. An empty model yields ||Y||_F.
double residual(const BTDModel& model, const ComplexTensor3& y);

}  // namespace btdm

#endif  // BTDM_TENSOR_HPP
