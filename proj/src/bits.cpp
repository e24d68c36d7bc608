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

#include "btdm/bits.hpp"

#include <cctype>
#include <stdexcept>

namespace btdm {

std::uint64_t bits_to_uint(std::span<const std::uint8_t> bits) {
  if (bits.size() > 64) throw std::invalid_argument("bits_to_uint: more than 64 bits");
  std::uint64_t v = 0;
  for (auto b : bits) v = (v << 1) | (b & 1u);
  return v;
}

void append_uint(Bits& out, std::uint64_t value, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((value >> i) & 1u));
}

std::string bits_to_hex(std::span<const std::uint8_t> bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t pad = (4 - bits.size() % 4) % 4;
  std::string out;
  out.reserve((bits.size() + pad) / 4);
  unsigned nibble = 0;
  std::size_t filled = pad;
  for (auto b : bits) {
    nibble = (nibble << 1) | (b & 1u);
    if (++filled == 4) {
      out.push_back(kDigits[nibble]);
      nibble = 0;
      filled = 0;
    }
  }
  return out;
}

Bits hex_to_bits(std::string_view hex, std::size_t nbits) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  Bits all;
  all.reserve(hex.size() * 4);
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw std::invalid_argument(std::string("hex_to_bits: bad digit '") + c + "'");
    append_uint(all, static_cast<std::uint64_t>(v), 4);
  }
  if (all.size() < nbits) all.insert(all.begin(), nbits - all.size(), 0);
  const std::size_t excess = all.size() - nbits;
  for (std::size_t i = 0; i < excess; ++i)
    if (all[i]) throw std::invalid_argument("hex_to_bits: value wider than requested bit count");
  return Bits(all.begin() + static_cast<std::ptrdiff_t>(excess), all.end());
}

}  // namespace btdm
