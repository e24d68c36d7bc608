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

#include "btdm/bch.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace btdm {

namespace {

// Primitive polynomials, bit i = coefficient of x^i.
constexpr int kPrimitive[] = {0,     0,     0x7,    0xB,    0x13,   0x25,   0x43,   0x89,  0x11D,
                              0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003, 0x1100B};
constexpr int kMaxM = 16;

}  // namespace

int BchCode::mul(int a, int b) const {
  if (a == 0 || b == 0) return 0;
  return exp_[static_cast<std::size_t>((log_[static_cast<std::size_t>(a)] + log_[static_cast<std::size_t>(b)]) %
                                       params_.n)];
}

int BchCode::alpha_pow(long e) const {
  const long n = params_.n;
  return exp_[static_cast<std::size_t>(((e % n) + n) % n)];
}

BchCode BchCode::make(int m, int t, int shorten) {
  if (m < 3 || m > kMaxM) throw std::invalid_argument("BCH: field exponent must be in [3, 16]");
  if (t < 1) throw std::invalid_argument("BCH: t must be >= 1");
  BchCode code;
  const int n = (1 << m) - 1;
  code.exp_.resize(static_cast<std::size_t>(n));
  code.log_.assign(static_cast<std::size_t>(n + 1), -1);
  int x = 1;
  for (int i = 0; i < n; ++i) {
    code.exp_[static_cast<std::size_t>(i)] = x;
    code.log_[static_cast<std::size_t>(x)] = i;
    x <<= 1;
    if (x & (1 << m)) x ^= kPrimitive[m];
  }
  code.params_.m = m;
  code.params_.n = n;

  // g(x) = lcm of the minimal polynomials of alpha^1 .. alpha^2t.
  std::vector<int> g{1};  // GF(2^m) coefficients, all end up in {0, 1}
  std::set<int> used;
  for (int i = 1; i <= 2 * t; ++i) {
    if (used.count(i % n)) continue;
    int e = i % n;
    do {
      used.insert(e);
      std::vector<int> next(g.size() + 1, 0);
      const int root = code.exp_[static_cast<std::size_t>(e)];
      for (std::size_t d = 0; d < g.size(); ++d) {
        next[d + 1] ^= g[d];
        next[d] ^= code.mul(g[d], root);
      }
      g = std::move(next);
      e = (2 * e) % n;
    } while (!used.count(e));
  }
  code.generator_.resize(g.size());
  for (std::size_t d = 0; d < g.size(); ++d) {
    if (g[d] > 1) throw std::logic_error("BCH: generator coefficient outside GF(2)");
    code.generator_[d] = static_cast<std::uint8_t>(g[d]);
  }
  const int parity = static_cast<int>(g.size()) - 1;
  code.params_.k = n - parity;
  code.params_.t = t;
  if (code.params_.k < 1) throw std::invalid_argument("BCH: no information positions left");
  if (shorten < 0 || shorten >= code.params_.k) throw std::invalid_argument("BCH: bad shortening");
  code.params_.shorten = shorten;
  return code;
}

BchCode BchCode::for_lengths(int n_eff, int k_eff) {
  if (k_eff < 1 || n_eff <= k_eff) throw std::invalid_argument("BCH: need 0 < k < n");
  int m = 3;
  while (m <= kMaxM && (1 << m) - 1 < n_eff) ++m;
  if (m > kMaxM) throw std::invalid_argument("BCH: length too large");
  const int parity = n_eff - k_eff;
  for (int t = 1; t * 2 < (1 << m); ++t) {
    BchCode probe = make(m, t, 0);
    const int p = probe.params_.n - probe.params_.k;
    if (p == parity) return make(m, t, probe.params_.k - k_eff);
    if (p > parity) break;
  }
  throw std::invalid_argument("BCH: no binary BCH code over GF(2^" + std::to_string(m) + ") has " +
                              std::to_string(parity) + " parity bits");
}

Bits BchCode::encode(std::span<const std::uint8_t> payload) const {
  const int k_eff = params_.k_eff();
  if (static_cast<int>(payload.size()) != k_eff)
    throw std::invalid_argument("BCH encode: payload must have " + std::to_string(k_eff) + " bits");
  const auto r = generator_.size() - 1;
  std::vector<std::uint8_t> reg(r, 0);
  for (auto bit : payload) {
    const std::uint8_t fb = (bit & 1u) ^ reg[r - 1];
    for (std::size_t j = r - 1; j > 0; --j) reg[j] = reg[j - 1] ^ (fb & generator_[j]);
    reg[0] = fb & generator_[0];
  }
  Bits word(payload.begin(), payload.end());
  for (std::size_t j = r; j-- > 0;) word.push_back(reg[j]);
  return word;
}

DecodeResult BchCode::decode(std::span<const std::uint8_t> word) const {
  const int n_eff = params_.n_eff();
  if (static_cast<int>(word.size()) != n_eff)
    throw std::invalid_argument("BCH decode: word must have " + std::to_string(n_eff) + " bits");
  const int t = params_.t;
  DecodeResult out;
  Bits fixed(word.begin(), word.end());

  std::vector<int> syn(static_cast<std::size_t>(2 * t), 0);
  bool any = false;
  for (int i = 1; i <= 2 * t; ++i) {
    int s = 0;
    for (int idx = 0; idx < n_eff; ++idx)
      if (fixed[static_cast<std::size_t>(idx)] & 1u) s ^= alpha_pow(static_cast<long>(i) * (n_eff - 1 - idx));
    syn[static_cast<std::size_t>(i - 1)] = s;
    any = any || s != 0;
  }
  const auto k_eff = static_cast<std::size_t>(params_.k_eff());
  if (!any) {
    out.payload.assign(fixed.begin(), fixed.begin() + static_cast<std::ptrdiff_t>(k_eff));
    return out;
  }

  // Berlekamp-Massey for the error locator.
  std::vector<int> c{1}, b{1};
  int len = 0, shift = 1, last = 1;
  for (int step = 0; step < 2 * t; ++step) {
    int d = syn[static_cast<std::size_t>(step)];
    for (int i = 1; i <= len && i < static_cast<int>(c.size()); ++i)
      d ^= mul(c[static_cast<std::size_t>(i)], syn[static_cast<std::size_t>(step - i)]);
    if (d == 0) {
      ++shift;
      continue;
    }
    const int coef = mul(d, exp_[static_cast<std::size_t>((params_.n - log_[static_cast<std::size_t>(last)]) % params_.n)]);
    std::vector<int> prev = c;
    if (c.size() < b.size() + static_cast<std::size_t>(shift)) c.resize(b.size() + static_cast<std::size_t>(shift), 0);
    for (std::size_t i = 0; i < b.size(); ++i) c[i + static_cast<std::size_t>(shift)] ^= mul(coef, b[i]);
    if (2 * len <= step) {
      len = step + 1 - len;
      b = std::move(prev);
      last = d;
      shift = 1;
    } else {
      ++shift;
    }
  }
  while (c.size() > 1 && c.back() == 0) c.pop_back();
  const int degree = static_cast<int>(c.size()) - 1;

  out.status = DecodeStatus::detected_uncorrectable;
  if (len > t || degree != len) {
    out.payload.assign(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(k_eff));
    return out;
  }
  // Chien search restricted to the positions that exist after shortening.
  std::vector<int> roots;
  for (int pos = 0; pos < n_eff; ++pos) {
    int v = 0;
    for (int i = 0; i <= degree; ++i) v ^= mul(c[static_cast<std::size_t>(i)], alpha_pow(-static_cast<long>(pos) * i));
    if (v == 0) roots.push_back(pos);
  }
  if (static_cast<int>(roots.size()) != degree) {
    out.payload.assign(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(k_eff));
    return out;
  }
  for (int pos : roots) fixed[static_cast<std::size_t>(n_eff - 1 - pos)] ^= 1u;
  out.status = DecodeStatus::corrected;
  out.corrected_errors = degree;
  out.payload.assign(fixed.begin(), fixed.begin() + static_cast<std::ptrdiff_t>(k_eff));
  return out;
}

}  // namespace btdm
