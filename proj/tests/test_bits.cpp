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

#include <doctest.h>

#include <stdexcept>

#include "btdm/bits.hpp"

using btdm::Bits;

TEST_SUITE("bits") {

TEST_CASE("uint roundtrip, MSB first") {
  Bits b;
  btdm::append_uint(b, 0b1011, 4);
  CHECK(b == Bits{1, 0, 1, 1});
  CHECK(btdm::bits_to_uint(b) == 11);
  btdm::append_uint(b, 1, 3);
  CHECK(b == Bits{1, 0, 1, 1, 0, 0, 1});
  CHECK(btdm::bits_to_uint(Bits{}) == 0);
}

TEST_CASE("hex encoding pads on the left") {
  CHECK(btdm::bits_to_hex(Bits{1, 0, 1, 1}) == "b");
  CHECK(btdm::bits_to_hex(Bits{1, 1, 0, 1, 1, 0, 0, 1, 0, 1}) == "365");
  CHECK(btdm::bits_to_hex(Bits{}) == "");
}

TEST_CASE("hex parsing") {
  CHECK(btdm::hex_to_bits("365", 10) == Bits{1, 1, 0, 1, 1, 0, 0, 1, 0, 1});
  CHECK(btdm::hex_to_bits("0x0365", 10) == Bits{1, 1, 0, 1, 1, 0, 0, 1, 0, 1});
  CHECK(btdm::hex_to_bits("F", 4) == Bits{1, 1, 1, 1});
  CHECK_THROWS_AS(btdm::hex_to_bits("7ff", 10), std::invalid_argument);
  CHECK_THROWS_AS(btdm::hex_to_bits("zz", 8), std::invalid_argument);
}

TEST_CASE("hex roundtrip at odd lengths") {
  for (std::size_t n = 1; n < 70; n += 3) {
    Bits b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>((i * 7 + n) % 3 == 0);
    CHECK(btdm::hex_to_bits(btdm::bits_to_hex(b), n) == b);
  }
}

}
