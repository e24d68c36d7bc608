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

#ifndef BTDM_BCH_HPP
#define BTDM_BCH_HPP

#include <span>
#include <vector>

#include "btdm/bits.hpp"

namespace btdm {

/// Narrow-sense binary primitive BCH code, optionally shortened.
struct OuterCodeParams {
  int m = 0;        // field exponent, GF(2^m)
  int n = 0;        // 2^m - 1
  int k = 0;        // native dimension
  int t = 0;        // designed correction capability
  int shorten = 0;  // leading information positions removed

  int n_eff() const { return n - shorten; }
  int k_eff() const { return k - shorten; }
};

enum class DecodeStatus { ok, corrected, detected_uncorrectable };

struct DecodeResult {
  Bits payload;
  DecodeStatus status = DecodeStatus::ok;
  int corrected_errors = 0;

  /// True for ok and corrected.
  bool valid() const { return status != DecodeStatus::detected_uncorrectable; }
};

/// Systematic encoder and syndrome / Berlekamp-Massey / Chien decoder.
///
/// Bit strings are MSB first: string position i holds the coefficient of
/// x^(n_eff - 1 - i). The payload occupies positions [0, k_eff) verbatim and
/// the n - k parity bits follow.
class BchCode {
 public:
  /// Code with designed distance 2t + 1 over GF(2^m), shortened by `shorten`.
  static BchCode make(int m, int t, int shorten = 0);
  /// Smallest field with 2^m - 1 >= n_eff whose t gives exactly n_eff - k_eff
  /// parity bits. Throws std::invalid_argument when no such code exists.
  static BchCode for_lengths(int n_eff, int k_eff);

  const OuterCodeParams& params() const { return params_; }
  /// Generator polynomial coefficients over GF(2), index = degree.
  const std::vector<std::uint8_t>& generator() const { return generator_; }

  Bits encode(std::span<const std::uint8_t> payload) const;
  DecodeResult decode(std::span<const std::uint8_t> word) const;

 private:
  BchCode() = default;

  int mul(int a, int b) const;
  int alpha_pow(long e) const;

  OuterCodeParams params_;
  std::vector<std::uint8_t> generator_;
  std::vector<int> exp_;  // exp_[i] = alpha^i, i in [0, n)
  std::vector<int> log_;  // log_[x], x in [1, n]
};

}  // namespace btdm

#endif  // BTDM_BCH_HPP
