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

#include "btdm/grassmann.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "btdm/error.hpp"

namespace btdm {

namespace {

constexpr int kMaxPartLength = 30;

int floor_log2(std::uint64_t v) { return static_cast<int>(std::bit_width(v)) - 1; }

std::uint64_t pair_count(int t) { return static_cast<std::uint64_t>(t) * (t - 1) / 2; }

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Quantile of the centre of cell x among 2^len equiprobable cells.
double cell_centre(std::uint64_t x, int len) {
  if (len == 0) return 0.0;
  const double cells = std::ldexp(1.0, len);
  return normal_quantile((2.0 * static_cast<double>(x) + 1.0) / (2.0 * cells));
}

std::uint64_t cell_of(double w, int len) {
  if (len == 0) return 0;
  const double cells = std::ldexp(1.0, len);
  const double scaled = std::floor(normal_cdf(w) * cells);
  return static_cast<std::uint64_t>(std::clamp(scaled, 0.0, cells - 1.0));
}

void require_bits(std::span<const std::uint8_t> bits, const CodecParams& params) {
  if (static_cast<int>(bits.size()) != params.ell)
    throw std::invalid_argument("symbol payload must have " + std::to_string(params.ell) + " bits, got " +
                                std::to_string(bits.size()));
}

}  // namespace

int part_count(int t, int l) {
  if (l == 2) return 4 * t - 8;
  if (l == 1) return 2 * t - 2;
  throw std::invalid_argument("only L = 1 and L = 2 are supported");
}

namespace {

int dominant_bits(int t, int l) {
  if (l == 2) {
    if (t < 3) throw std::invalid_argument("L = 2 requires T >= 3");
    return floor_log2(pair_count(t));
  }
  if (l == 1) {
    if (t < 2) throw std::invalid_argument("L = 1 requires T >= 2");
    return floor_log2(static_cast<std::uint64_t>(t));
  }
  throw std::invalid_argument("only L = 1 and L = 2 are supported");
}

}  // namespace

BitBudget bit_budget(int t, int l, int ell) {
  BitBudget out;
  out.ell1 = dominant_bits(t, l);
  if (ell < out.ell1)
    throw PayloadTooSmall("payload of " + std::to_string(ell) + " bits is below the " + std::to_string(out.ell1) +
                          " dominant-row bits");
  out.ell2 = ell - out.ell1;
  const int parts = part_count(t, l);
  const int base = out.ell2 / parts;
  const int extra = out.ell2 % parts;
  if (base + (extra > 0 ? 1 : 0) > kMaxPartLength)
    throw std::invalid_argument("payload too large: part length exceeds " + std::to_string(kMaxPartLength));
  out.part_lengths.assign(static_cast<std::size_t>(parts), base);
  for (int i = 0; i < extra; ++i) ++out.part_lengths[static_cast<std::size_t>(i)];
  return out;
}

CodecParams CodecParams::make(int t, int l, int ell, double f) {
  if (!(f > std::sqrt(2.0))) throw std::invalid_argument("pilot constant f must exceed sqrt(2)");
  if (ell < 0) ell = dominant_bits(t, l) + part_count(t, l);
  BitBudget budget = bit_budget(t, l, ell);
  CodecParams p;
  p.t = t;
  p.l = l;
  p.ell = ell;
  p.ell1 = budget.ell1;
  p.ell2 = budget.ell2;
  p.part_lengths = std::move(budget.part_lengths);
  p.f = f;
  return p;
}

RowPair pair_from_index(std::uint64_t index, int t) {
  if (index >= pair_count(t)) throw std::invalid_argument("pair index out of range");
  int p = 0;
  std::uint64_t rem = index;
  while (rem >= static_cast<std::uint64_t>(t - 1 - p)) {
    rem -= static_cast<std::uint64_t>(t - 1 - p);
    ++p;
  }
  return {p, p + 1 + static_cast<int>(rem)};
}

std::uint64_t index_from_pair(RowPair pair, int t) {
  if (pair.p < 0 || pair.p >= pair.q || pair.q >= t) throw std::invalid_argument("invalid row pair");
  std::uint64_t index = 0;
  for (int r = 0; r < pair.p; ++r) index += static_cast<std::uint64_t>(t - 1 - r);
  return index + static_cast<std::uint64_t>(pair.q - pair.p - 1);
}

RowPair pair_from_bits(std::span<const std::uint8_t> b1, int t) { return pair_from_index(bits_to_uint(b1), t); }

std::optional<Bits> bits_from_pair(RowPair pair, int t, int ell1) {
  const std::uint64_t index = index_from_pair(pair, t);
  if (index >= (std::uint64_t{1} << ell1)) return std::nullopt;
  Bits out;
  append_uint(out, index, ell1);
  return out;
}

cplx cube_split_scalar(std::uint64_t x_odd, std::uint64_t x_even, int len_odd, int len_even) {
  if (len_odd < 0 || len_even < 0 || len_odd > kMaxPartLength || len_even > kMaxPartLength)
    throw std::invalid_argument("cube_split_scalar: bad part length");
  if (x_odd >> len_odd || x_even >> len_even) throw std::invalid_argument("cube_split_scalar: value out of range");
  const cplx omega(cell_centre(x_odd, len_odd), cell_centre(x_even, len_even));
  const double r = std::abs(omega);
  if (r == 0.0) return {0.0, 0.0};
  const double half = 0.5 * r * r;
  // (1 - e^{-x}) / (1 + e^{-x}) == tanh(x / 2)
  const double radius = std::sqrt(std::tanh(0.5 * half));
  return radius * omega / r;
}

std::pair<std::uint64_t, std::uint64_t> inverse_cube_split(cplx alpha, int len_odd, int len_even) {
  double mag = std::abs(alpha);
  if (!std::isfinite(mag)) return {0, 0};
  if (mag >= 1.0) {
    alpha *= (1.0 - 1e-9) / mag;
    mag = 1.0 - 1e-9;
  }
  cplx omega{0.0, 0.0};
  if (mag > 0.0) {
    const double u = mag * mag;
    const double r2 = 2.0 * (std::log1p(u) - std::log1p(-u));
    omega = std::sqrt(r2) * alpha / mag;
  }
  return {cell_of(omega.real(), len_odd), cell_of(omega.imag(), len_even)};
}

CVector coordinates_from_bits(std::span<const std::uint8_t> b2, const CodecParams& params) {
  const auto& lens = params.part_lengths;
  std::vector<std::uint64_t> x(lens.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < lens.size(); ++i) {
    const auto len = static_cast<std::size_t>(lens[i]);
    if (pos + len > b2.size()) throw std::invalid_argument("coordinate bits shorter than part lengths");
    x[i] = bits_to_uint(b2.subspan(pos, len));
    pos += len;
  }
  if (pos != b2.size()) throw std::invalid_argument("coordinate bits longer than part lengths");
  CVector alpha(static_cast<Index>(lens.size() / 2));
  for (Index t = 0; t < alpha.size(); ++t) {
    const auto i = static_cast<std::size_t>(2 * t);
    alpha(t) = cube_split_scalar(x[i], x[i + 1], lens[i], lens[i + 1]);
  }
  return alpha;
}

Bits bits_from_coordinates(const CVector& alpha, const CodecParams& params) {
  const auto& lens = params.part_lengths;
  if (static_cast<std::size_t>(alpha.size()) * 2 != lens.size())
    throw std::invalid_argument("coordinate count does not match part lengths");
  Bits out;
  out.reserve(static_cast<std::size_t>(params.ell2));
  for (Index t = 0; t < alpha.size(); ++t) {
    const auto i = static_cast<std::size_t>(2 * t);
    const auto [xo, xe] = inverse_cube_split(alpha(t), lens[i], lens[i + 1]);
    append_uint(out, xo, lens[i]);
    append_uint(out, xe, lens[i + 1]);
  }
  return out;
}

namespace {

CMatrix build_unscaled_rank2(std::span<const std::uint8_t> bits, const CodecParams& params) {
  const int t = params.t;
  const auto ell1 = static_cast<std::size_t>(params.ell1);
  const RowPair pq = pair_from_bits(bits.first(ell1), t);
  const CVector a = coordinates_from_bits(bits.subspan(ell1), params);
  const Index m = t - 2;
  const cplx ip = a.head(m).dot(a.tail(m));  // a1^H a2
  const double f = params.f;

  CMatrix u(t, 2);
  u(pq.p, 0) = f;
  u(pq.p, 1) = -ip / f;
  u(pq.q, 0) = 0.0;
  u(pq.q, 1) = f;
  Index r = 0;
  for (int row = 0; row < t; ++row) {
    if (row == pq.p || row == pq.q) continue;
    u(row, 0) = a(r);
    u(row, 1) = a(m + r);
    ++r;
  }
  return u;
}

CMatrix build_unscaled_rank1(std::span<const std::uint8_t> bits, const CodecParams& params) {
  const int t = params.t;
  const auto ell1 = static_cast<std::size_t>(params.ell1);
  const auto p = static_cast<Index>(bits_to_uint(bits.first(ell1)));
  const CVector a = coordinates_from_bits(bits.subspan(ell1), params);
  CMatrix u(t, 1);
  Index r = 0;
  for (Index row = 0; row < t; ++row) u(row, 0) = row == p ? cplx(params.f) : a(r++);
  return u;
}

}  // namespace

CMatrix build_symbol_unscaled(std::span<const std::uint8_t> bits, const CodecParams& params) {
  require_bits(bits, params);
  return params.l == 2 ? build_unscaled_rank2(bits, params) : build_unscaled_rank1(bits, params);
}

GrassmannSymbol build_symbol(std::span<const std::uint8_t> bits, const CodecParams& params) {
  CMatrix u = build_symbol_unscaled(bits, params);
  u.colwise().normalize();
  return {std::move(u)};
}

GrassmannSymbol build_symbol_rank1(std::span<const std::uint8_t> bits, const CodecParams& params) {
  if (params.l != 1) throw std::invalid_argument("build_symbol_rank1 requires L = 1");
  return build_symbol(bits, params);
}

namespace {

void require_orthonormal(const CMatrix& m, const char* what) {
  const CMatrix gram = m.adjoint() * m;
  if ((gram - CMatrix::Identity(m.cols(), m.cols())).norm() > 1e-8)
    throw std::invalid_argument(std::string(what) + ": input is not column-orthonormal");
}

}  // namespace

double chordal_distance(const CMatrix& m, const CMatrix& n) {
  if (m.rows() != n.rows() || m.cols() != n.cols()) throw std::invalid_argument("chordal_distance: shape mismatch");
  require_orthonormal(m, "chordal_distance");
  require_orthonormal(n, "chordal_distance");
  // tr(M^H N N^H M) = ||M^H N||_F^2
  const double overlap = (m.adjoint() * n).squaredNorm();
  return std::sqrt(std::max(0.0, static_cast<double>(m.cols()) - overlap));
}

GrassmannSymbol cell_point(RowPair pair, int t) {
  if (pair.p < 0 || pair.p >= pair.q || pair.q >= t) throw std::invalid_argument("cell_point: need 0 <= p < q < T");
  CMatrix g = CMatrix::Zero(t, 2);
  g(pair.p, 0) = 1.0;
  g(pair.q, 1) = 1.0;
  return {std::move(g)};
}

namespace {

// Smallest index whose norm is within tol of the largest among candidates.
Index top_index(const Eigen::VectorXd& norms, Index skip) {
  double best = -1.0;
  for (Index i = 0; i < norms.size(); ++i)
    if (i != skip) best = std::max(best, norms(i));
  const double tol = 1e-12 * norms.maxCoeff();
  for (Index i = 0; i < norms.size(); ++i)
    if (i != skip && norms(i) >= best - tol) return i;
  return -1;
}

}  // namespace

RowPair detect_dominant_pair(const CMatrix& m) {
  if (m.rows() < 2) throw std::invalid_argument("detect_dominant_pair: need at least two rows");
  const Eigen::VectorXd norms = m.rowwise().squaredNorm();
  const Index first = top_index(norms, -1);
  const Index second = top_index(norms, first);
  return {static_cast<int>(std::min(first, second)), static_cast<int>(std::max(first, second))};
}

cplx solve_pilot_inner_product(const CMatrix& w, double f) {
  const CMatrix c = w.adjoint() * w;
  return f * f * c(0, 1) / (1.0 + c(0, 0).real());
}

namespace {

double subspace_mismatch(const CMatrix& estimate, const Bits& bits, const CodecParams& params) {
  Eigen::HouseholderQR<CMatrix> qr(estimate);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(estimate.rows(), estimate.cols());
  return chordal_distance(q, build_symbol(bits, params).matrix);
}

std::optional<DemapResult> demap_rank2(const CMatrix& estimate, const CodecParams& params) {
  const int t = params.t;
  const RowPair pq = detect_dominant_pair(estimate);
  auto head = bits_from_pair(pq, t, params.ell1);
  if (!head) return std::nullopt;

  Eigen::Matrix2cd a1;
  a1.row(0) = estimate.row(pq.p);
  a1.row(1) = estimate.row(pq.q);
  CMatrix a2(t - 2, 2);
  Index r = 0;
  for (int row = 0; row < t; ++row)
    if (row != pq.p && row != pq.q) a2.row(r++) = estimate.row(row);

  if (std::abs(a1.determinant()) < 1e-12 * a1.squaredNorm()) return std::nullopt;
  const CMatrix w = a2 * a1.inverse();
  const double f = params.f;
  const cplx ip = solve_pilot_inner_product(w, f);
  Eigen::Matrix2cd pilot;
  pilot << f, -ip / f, 0.0, f;
  const CMatrix rebuilt = w * pilot;

  CVector alpha(2 * (t - 2));
  alpha << rebuilt.col(0), rebuilt.col(1);
  if (!alpha.allFinite()) return std::nullopt;
  Bits bits = std::move(*head);
  const Bits tail = bits_from_coordinates(alpha, params);
  bits.insert(bits.end(), tail.begin(), tail.end());
  const double mismatch = subspace_mismatch(estimate, bits, params);
  return DemapResult{std::move(bits), -mismatch};
}

std::optional<DemapResult> demap_rank1(const CMatrix& estimate, const CodecParams& params) {
  const int t = params.t;
  const Eigen::VectorXd mags = estimate.col(0).cwiseAbs2();
  const Index p = top_index(mags, -1);
  if (p < 0 || mags(p) == 0.0) return std::nullopt;
  if (static_cast<std::uint64_t>(p) >= (std::uint64_t{1} << params.ell1)) return std::nullopt;
  const CVector scaled = estimate.col(0) * (params.f / estimate(p, 0));
  CVector alpha(t - 1);
  Index r = 0;
  for (Index row = 0; row < t; ++row)
    if (row != p) alpha(r++) = scaled(row);
  if (!alpha.allFinite()) return std::nullopt;
  Bits bits;
  append_uint(bits, static_cast<std::uint64_t>(p), params.ell1);
  const Bits tail = bits_from_coordinates(alpha, params);
  bits.insert(bits.end(), tail.begin(), tail.end());
  const double mismatch = subspace_mismatch(estimate, bits, params);
  return DemapResult{std::move(bits), -mismatch};
}

}  // namespace

std::optional<DemapResult> demap_symbol(const CMatrix& estimate, const CodecParams& params) {
  if (estimate.rows() != params.t || estimate.cols() != params.l)
    throw std::invalid_argument("demap_symbol: estimate shape does not match codec parameters");
  if (!estimate.allFinite()) return std::nullopt;
  return params.l == 2 ? demap_rank2(estimate, params) : demap_rank1(estimate, params);
}

std::optional<DemapResult> demap_symbol_rank1(const CMatrix& estimate, const CodecParams& params) {
  if (params.l != 1) throw std::invalid_argument("demap_symbol_rank1 requires L = 1");
  return demap_symbol(estimate, params);
}

double dominance_margin(const GrassmannSymbol& symbol, RowPair pair) {
  const Eigen::VectorXd norms = symbol.matrix.rowwise().squaredNorm();
  double dominant = norms(pair.p);
  if (symbol.matrix.cols() > 1) dominant = std::min(dominant, norms(pair.q));
  double other = 0.0;
  for (Index i = 0; i < norms.size(); ++i)
    if (i != pair.p && (symbol.matrix.cols() == 1 || i != pair.q)) other = std::max(other, norms(i));
  return dominant - other;
}

}  // namespace btdm
