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

#ifndef BTDM_BITS_HPP
#define BTDM_BITS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace btdm {

/// One bit per element, values 0 or 1. Multi-bit fields are MSB first.
using Bits = std::vector<std::uint8_t>;

/// Reads `bits` as an unsigned integer, most significant bit first.
std::uint64_t bits_to_uint(std::span<const std::uint8_t> bits);

/// Appends the `width` low-order bits of `value`, most significant first.
void append_uint(Bits& out, std::uint64_t value, int width);

/// Hex encoding of `bits`, left-padded with zero bits to a whole nibble.
std::string bits_to_hex(std::span<const std::uint8_t> bits);

/// Parses hex into exactly `nbits` bits (the low-order bits of the number).
/// Throws std::invalid_argument on bad digits or nonzero excess high bits.
Bits hex_to_bits(std::string_view hex, std::size_t nbits);

}  // namespace btdm

#endif  // BTDM_BITS_HPP
