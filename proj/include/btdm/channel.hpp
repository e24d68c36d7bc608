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

#ifndef BTDM_CHANNEL_HPP
#define BTDM_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "btdm/bits.hpp"
#include "btdm/grassmann.hpp"
#include "btdm/rng.hpp"
#include "btdm/tensor.hpp"

namespace btdm {

/// The pair of sub-constellations used by every user: the first B1 coded
/// bits select A (height T1), the remaining B2 select B (height T2).
struct SymbolCodecs {
  CodecParams first;
  CodecParams second;

  int coded_bits() const { return first.ell + second.ell; }
  Dims dims(Index antennas) const { return {first.t, second.t, antennas}; }
};

struct ChannelConfig {
  int antennas = 1;          // N
  int users = 1;             // K
  std::optional<double> ebn0_db;  // empty: noiseless
  double symbol_energy = 0;  // E_s = ||s_k||_F^2; <= 0 selects T1 * T2
  int info_bits = 1;         // B0, for the per-bit energy

  void validate() const;
};

/// K channel vectors with i.i.d. unit-variance complex Gaussian entries.
std::vector<CVector> sample_channels(int k, int n, Rng& rng);

/// Standard deviation of one complex noise entry (sigma^2 = N0).
double noise_sigma(double ebn0_db, double symbol_energy, int info_bits);

/// Unit-energy signal A B^T for one coded payload, with the symbols used.
struct EncodedUser {
  GrassmannSymbol a;
  GrassmannSymbol b;
};
EncodedUser encode_user(std::span<const std::uint8_t> coded, const SymbolCodecs& codecs);

struct Transmission {
  ComplexTensor3 y;
  BTDModel truth;  // core = sqrt(E_s / L) I, h = channel
};

/// Builds Y = sum_k (A_k B_k^T) o h_k + noise. Channels come from
/// `channel_rng` and noise from `noise_rng`.
Transmission transmit(std::span<const Bits> coded_payloads, const SymbolCodecs& codecs, const ChannelConfig& config,
                      Rng& channel_rng, Rng& noise_rng);

}  // namespace btdm

#endif  // BTDM_CHANNEL_HPP
