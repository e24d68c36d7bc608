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

#include "btdm/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace btdm {

void ChannelConfig::validate() const {
  if (antennas < 1) throw std::invalid_argument("ChannelConfig: N must be >= 1");
  if (users < 1) throw std::invalid_argument("ChannelConfig: K must be >= 1");
  if (info_bits < 1) throw std::invalid_argument("ChannelConfig: B0 must be >= 1");
  if (ebn0_db && !std::isfinite(*ebn0_db)) throw std::invalid_argument("ChannelConfig: Eb/N0 must be finite");
}

std::vector<CVector> sample_channels(int k, int n, Rng& rng) {
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int u = 0; u < k; ++u) {
    CVector h(n);
    for (int i = 0; i < n; ++i) h(i) = complex_normal(rng);
    out.push_back(std::move(h));
  }
  return out;
}

double noise_sigma(double ebn0_db, double symbol_energy, int info_bits) {
  if (!(symbol_energy > 0) || info_bits < 1) throw std::invalid_argument("noise_sigma: inputs must be positive");
  const double eb = symbol_energy / info_bits;
  const double n0 = eb / std::pow(10.0, ebn0_db / 10.0);
  return std::sqrt(n0);
}

EncodedUser encode_user(std::span<const std::uint8_t> coded, const SymbolCodecs& codecs) {
  const auto b1 = static_cast<std::size_t>(codecs.first.ell);
  if (static_cast<int>(coded.size()) != codecs.coded_bits())
    throw std::invalid_argument("encode_user: payload must have " + std::to_string(codecs.coded_bits()) + " bits");
  return {build_symbol(coded.first(b1), codecs.first), build_symbol(coded.subspan(b1), codecs.second)};
}

Transmission transmit(std::span<const Bits> coded_payloads, const SymbolCodecs& codecs, const ChannelConfig& config,
                      Rng& channel_rng, Rng& noise_rng) {
  config.validate();
  if (coded_payloads.empty()) throw std::invalid_argument("transmit: no payloads");
  if (static_cast<int>(coded_payloads.size()) != config.users)
    throw std::invalid_argument("transmit: payload count differs from the configured K");
  if (codecs.first.l != codecs.second.l) throw std::invalid_argument("transmit: sub-constellations disagree on L");
  const Dims dims = codecs.dims(config.antennas);
  const int l = codecs.first.l;
  const double es = config.symbol_energy > 0 ? config.symbol_energy : static_cast<double>(dims.t1 * dims.t2);
  const double amplitude = std::sqrt(es / l);

  auto channels = sample_channels(static_cast<int>(coded_payloads.size()), config.antennas, channel_rng);
  Transmission out;
  for (std::size_t u = 0; u < coded_payloads.size(); ++u) {
    EncodedUser sym = encode_user(coded_payloads[u], codecs);
    BlockTerm term;
    term.a = std::move(sym.a.matrix);
    term.b = std::move(sym.b.matrix);
    term.core = amplitude * CMatrix::Identity(l, l);
    term.h = std::move(channels[u]);
    out.truth.terms.push_back(std::move(term));
  }
  if (config.ebn0_db) {
    ComplexTensor3 noise(dims);
    const double sigma = noise_sigma(*config.ebn0_db, es, config.info_bits);
    for (auto& v : noise.data()) v = sigma * complex_normal(noise_rng);
    out.y = synthesize_received(out.truth, &noise);
  } else {
    out.y = synthesize_received(out.truth);
  }
  return out;
}

}  // namespace btdm
