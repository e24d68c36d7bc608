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

#ifndef BTDM_GRASSMANN_HPP
#define BTDM_GRASSMANN_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "btdm/bits.hpp"
#include "btdm/tensor.hpp"

namespace btdm {

/// Bit split for one symbol: ell1 dominant-row bits, then coordinate parts.
struct BitBudget {
  int ell1 = 0;
  int ell2 = 0;
  std::vector<int> part_lengths;
};

/// Number of cube-split parts for a symbol of height t: 4T-8 for L=2 and
/// 2T-2 for L=1 (two parts per free complex entry).
int part_count(int t, int l);

/// Splits `ell` bits for a T x L symbol. Longer parts come first; when
/// ell2 is smaller than the part count the trailing parts have length 0.
/// Throws PayloadTooSmall if ell < ell1, std::invalid_argument on bad (T, L).
BitBudget bit_budget(int t, int l, int ell);

/// Constellation constants for one sub-constellation.
struct CodecParams {
  int t = 0;
  int l = 2;
  int ell = 0;
  int ell1 = 0;
  int ell2 = 0;
  std::vector<int> part_lengths;
  double f = 2.0;

  /// Validated construction. The default ell (negative) uses one bit per part.
  static CodecParams make(int t, int l, int ell = -1, double f = 2.0);
};

/// Zero-based dominant row pair, p < q.
struct RowPair {
  int p = 0;
  int q = 1;
  friend bool operator==(const RowPair&, const RowPair&) = default;
};

/// Lexicographic injection index -> (p, q). Throws std::invalid_argument if
/// index >= T(T-1)/2.
RowPair pair_from_index(std::uint64_t index, int t);
/// Inverse of pair_from_index.
std::uint64_t index_from_pair(RowPair pair, int t);

RowPair pair_from_bits(std::span<const std::uint8_t> b1, int t);
/// Empty when the pair is outside the image of the ell1-bit injection.
std::optional<Bits> bits_from_pair(RowPair pair, int t, int ell1);

/// Cube-split map of a pair of part values onto the open unit disc.
cplx cube_split_scalar(std::uint64_t x_odd, std::uint64_t x_even, int len_odd, int len_even);

/// Hard-decision inverse of cube_split_scalar. Inputs on or outside the unit
/// circle are pulled radially to 1 - 1e-9 first.
std::pair<std::uint64_t, std::uint64_t> inverse_cube_split(cplx alpha, int len_odd, int len_even);

/// Column-orthonormal T x L matrix standing for a point of G(T, L).
struct GrassmannSymbol {
  CMatrix matrix;
};

/// Coordinates alpha_1..alpha_m produced from the coordinate bits.
CVector coordinates_from_bits(std::span<const std::uint8_t> b2, const CodecParams& params);
Bits bits_from_coordinates(const CVector& alpha, const CodecParams& params);

/// Unnormalized symbol before column scaling (rows p, q hold the pilots).
CMatrix build_symbol_unscaled(std::span<const std::uint8_t> bits, const CodecParams& params);

/// Encodes `params.ell` bits into a unitary symbol. Dispatches on params.l.
GrassmannSymbol build_symbol(std::span<const std::uint8_t> bits, const CodecParams& params);
GrassmannSymbol build_symbol_rank1(std::span<const std::uint8_t> bits, const CodecParams& params);

/// sqrt(L - |tr(M^H N N^H M)|). Throws if either input is not
/// column-orthonormal within 1e-8 or shapes differ.
double chordal_distance(const CMatrix& m, const CMatrix& n);

/// Indicator representative with ones at (p, 0) and (q, 1).
GrassmannSymbol cell_point(RowPair pair, int t);

/// Rows with the two largest norms, returned with p < q. Norms within
/// 1e-12 (relative to the largest) tie toward the smaller index.
RowPair detect_dominant_pair(const CMatrix& m);

/// Closed-form root of the one-variable pilot equation given W = A2 * A1^{-1}.
cplx solve_pilot_inner_product(const CMatrix& w, double f);

struct DemapResult {
  Bits bits;
  /// Minus the chordal distance between the estimate and the rebuilt symbol.
  double confidence = 0.0;
};

/// Recovers the payload from any basis of the symbol's column space.
/// Returns nullopt (an erasure) when the pilot block is singular or the
/// detected pair is outside the injection image.
std::optional<DemapResult> demap_symbol(const CMatrix& estimate, const CodecParams& params);
std::optional<DemapResult> demap_symbol_rank1(const CMatrix& estimate, const CodecParams& params);

/// min dominant row norm^2 - max other row norm^2 (positive for valid symbols).
double dominance_margin(const GrassmannSymbol& symbol, RowPair pair);

}  // namespace btdm

#endif  // BTDM_GRASSMANN_HPP
