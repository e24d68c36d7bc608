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

#include "btdm/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace btdm {

ComplexTensor3::ComplexTensor3(Dims dims) : dims_(dims) {
  if (dims.t1 <= 0 || dims.t2 <= 0 || dims.n <= 0)
    throw std::invalid_argument("ComplexTensor3: dimensions must be positive");
  data_.assign(static_cast<std::size_t>(dims.size()), cplx{});
}

ComplexTensor3::ComplexTensor3(Dims dims, std::vector<cplx> data) : dims_(dims), data_(data.begin(), data.end()) {
  if (dims.t1 <= 0 || dims.t2 <= 0 || dims.n <= 0)
    throw std::invalid_argument("ComplexTensor3: dimensions must be positive");
  if (static_cast<Index>(data_.size()) != dims.size())
    throw std::invalid_argument("ComplexTensor3: data length does not match dimensions");
}

Eigen::Map<CMatrix> ComplexTensor3::slice(Index k) {
  return {data_.data() + dims_.t1 * dims_.t2 * k, dims_.t1, dims_.t2};
}

Eigen::Map<const CMatrix> ComplexTensor3::slice(Index k) const {
  return {data_.data() + dims_.t1 * dims_.t2 * k, dims_.t1, dims_.t2};
}

Eigen::Map<const CVector> ComplexTensor3::vec() const {
  return {data_.data(), static_cast<Index>(data_.size())};
}

Eigen::Map<CVector> ComplexTensor3::vec() { return {data_.data(), static_cast<Index>(data_.size())}; }

double ComplexTensor3::squared_norm() const { return vec().squaredNorm(); }

double ComplexTensor3::norm() const { return std::sqrt(squared_norm()); }

bool ComplexTensor3::all_finite() const { return vec().allFinite(); }

void ComplexTensor3::require_same_dims(const ComplexTensor3& other) const {
  if (!(dims_ == other.dims_)) throw std::invalid_argument("ComplexTensor3: dimension mismatch");
}

ComplexTensor3& ComplexTensor3::operator+=(const ComplexTensor3& other) {
  require_same_dims(other);
  vec() += other.vec();
  return *this;
}

ComplexTensor3& ComplexTensor3::operator-=(const ComplexTensor3& other) {
  require_same_dims(other);
  vec() -= other.vec();
  return *this;
}

ComplexTensor3& ComplexTensor3::operator*=(cplx s) {
  vec() *= s;
  return *this;
}

ComplexTensor3 operator+(ComplexTensor3 a, const ComplexTensor3& b) { return a += b; }
ComplexTensor3 operator-(ComplexTensor3 a, const ComplexTensor3& b) { return a -= b; }

CMatrix BlockTerm::signal() const {
  if (core.size() == 0) return a * b.transpose();
  return a * core * b.transpose();
}

bool has_full_column_rank(const CMatrix& m) {
  if (m.cols() == 0 || m.rows() < m.cols()) return false;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return s(0) > 0.0 && s(s.size() - 1) >= 1e-10 * s(0);
}

void validate_block_term(const BlockTerm& term) {
  const Index l = term.a.cols();
  if (l < 1 || term.b.cols() != l) throw std::invalid_argument("BlockTerm: A and B need the same positive column count");
  if (term.h.size() < 1) throw std::invalid_argument("BlockTerm: empty channel vector");
  if (l >= 2 && (l >= term.a.rows() || l >= term.b.rows()))
    throw std::invalid_argument("BlockTerm: L must be below min(T1, T2) when L >= 2");
  if (term.core.size() != 0 && (term.core.rows() != l || term.core.cols() != l))
    throw std::invalid_argument("BlockTerm: core must be L x L");
  if (!has_full_column_rank(term.a) || !has_full_column_rank(term.b))
    throw std::invalid_argument("BlockTerm: factors must have full column rank");
}

namespace {

Dims term_dims(const BlockTerm& t) { return {t.a.rows(), t.b.rows(), t.h.size()}; }

void accumulate(const BlockTerm& term, ComplexTensor3& out) {
  const CMatrix s = term.signal();
  for (Index k = 0; k < term.h.size(); ++k) out.slice(k) += term.h(k) * s;
}

}  // namespace

ComplexTensor3 synthesize_block_term(const BlockTerm& term) {
  validate_block_term(term);
  ComplexTensor3 out(term_dims(term));
  accumulate(term, out);
  return out;
}

ComplexTensor3 synthesize_received(const BTDModel& model, const ComplexTensor3* noise) {
  if (model.terms.empty()) throw std::invalid_argument("synthesize_received: empty model");
  const Dims dims = term_dims(model.terms.front());
  const Index l = model.terms.front().rank();
  ComplexTensor3 out(dims);
  for (const auto& term : model.terms) {
    validate_block_term(term);
    if (!(term_dims(term) == dims) || term.rank() != l)
      throw std::invalid_argument("synthesize_received: terms disagree on (T1, T2, N, L)");
    accumulate(term, out);
  }
  if (noise != nullptr) out += *noise;
  return out;
}

CMatrix unfold(const ComplexTensor3& x, int mode) {
  const auto [t1, t2, n] = x.dims();
  switch (mode) {
    case 1: {
      // Storage order already matches mode-1 columns j + t2*k.
      return Eigen::Map<const CMatrix>(x.data().data(), t1, t2 * n);
    }
    case 2: {
      CMatrix m(t2, t1 * n);
      for (Index k = 0; k < n; ++k) m.middleCols(t1 * k, t1) = x.slice(k).transpose();
      return m;
    }
    case 3: {
      return Eigen::Map<const CMatrix>(x.data().data(), t1 * t2, n).transpose();
    }
    default:
      throw std::invalid_argument("unfold: mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

ComplexTensor3 refold(const CMatrix& m, int mode, Dims dims) {
  ComplexTensor3 out(dims);
  const auto [t1, t2, n] = dims;
  switch (mode) {
    case 1:
      if (m.rows() != t1 || m.cols() != t2 * n) break;
      Eigen::Map<CMatrix>(out.data().data(), t1, t2 * n) = m;
      return out;
    case 2:
      if (m.rows() != t2 || m.cols() != t1 * n) break;
      for (Index k = 0; k < n; ++k) out.slice(k) = m.middleCols(t1 * k, t1).transpose();
      return out;
    case 3:
      if (m.rows() != n || m.cols() != t1 * t2) break;
      Eigen::Map<CMatrix>(out.data().data(), t1 * t2, n) = m.transpose();
      return out;
    default:
      throw std::invalid_argument("refold: mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
  throw std::invalid_argument("refold: matrix shape does not match dimensions");
}

double residual(const BTDModel& model, const ComplexTensor3& y) {
  if (model.terms.empty()) return y.norm();
  ComplexTensor3 r = y;
  for (const auto& term : model.terms) {
    validate_block_term(term);
    if (!(term_dims(term) == y.dims())) throw std::invalid_argument("residual: dimension mismatch");
    const CMatrix s = term.signal();
    for (Index k = 0; k < y.dims().n; ++k) r.slice(k) -= term.h(k) * s;
  }
  return r.norm();
}

}  // namespace btdm
