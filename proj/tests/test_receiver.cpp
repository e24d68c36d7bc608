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

#include <algorithm>
#include <stdexcept>

#include "btdm/receiver.hpp"
#include "oracles.hpp"

using namespace btdm;

namespace {

LinkCodes desk_link() {
  return {{CodecParams::make(10, 2, 37), CodecParams::make(8, 2, 28)}, BchCode::for_lengths(65, 37)};
}

std::vector<Bits> random_messages(Rng& rng, int k, int n) {
  std::bernoulli_distribution coin(0.5);
  std::vector<Bits> out(static_cast<std::size_t>(k), Bits(static_cast<std::size_t>(n)));
  for (auto& p : out)
    for (auto& b : p) b = coin(rng) ? 1 : 0;
  return out;
}

ComplexTensor3 received(const LinkCodes& link, const std::vector<Bits>& msgs, int n, std::optional<double> ebn0,
                        std::uint64_t seed) {
  std::vector<Bits> coded;
  for (const auto& m : msgs) coded.push_back(link.outer.encode(m));
  ChannelConfig cfg;
  cfg.antennas = n;
  cfg.users = static_cast<int>(msgs.size());
  cfg.ebn0_db = ebn0;
  cfg.info_bits = link.info_bits();
  Rng ch(seed), nz(seed + 1);
  return transmit(coded, link.codecs, cfg, ch, nz).y;
}

// Direct reading of the two sufficient conditions, scanned far past any
// plausible bound.
int scan_bound(int t1, int t2, int l, int n) {
  int best = 0;
  for (int k = 1; k <= 500; ++k) {
    const bool c1 = n >= k && std::min(t1 / l, k) + std::min(t2 / l, k) >= k + 2;
    const bool c2 = (t1 * t2) / (l * l) >= k && std::min(t1 / l, k) + std::min(t2 / l, k) + std::min(n, k) >= 2 * k + 2;
    if (c1 || c2) best = k;
  }
  return best;
}

}  // namespace

TEST_SUITE("receiver") {

TEST_CASE("uniqueness bound examples") {
  for (int n : {25, 26, 40, 1000}) CHECK(uniqueness_bound(30, 24, 2, n).bound == 25);
  CHECK(dof_total(25, 30, 24, 2) == 2500);
  CHECK(uniqueness_bound(4, 4, 2, 100).bound == 2);
  CHECK(uniqueness_bound(8, 6, 1, 100).condition1 == 12);
  CHECK(uniqueness_bound(10, 8, 2, 8).bound == 7);
  CHECK(uniqueness_bound(2, 2, 2, 1).bound == 0);
}

TEST_CASE("uniqueness bound matches an exhaustive scan and is monotone") {
  for (int l = 1; l <= 3; ++l)
    for (int t1 = l; t1 <= 14; ++t1)
      for (int t2 = l; t2 <= 14; t2 += 3)
        for (int n = 1; n <= 16; n += 3) {
          const int b = uniqueness_bound(t1, t2, l, n).bound;
          CHECK(b == scan_bound(t1, t2, l, n));
          CHECK(uniqueness_bound(t1 + 1, t2, l, n).bound >= b);
          CHECK(uniqueness_bound(t1, t2 + 1, l, n).bound >= b);
          CHECK(uniqueness_bound(t1, t2, l, n + 1).bound >= b);
          CHECK(uniqueness_bound(t1, t2, l + 1, n).bound <= b);
        }
}

TEST_CASE("pupe") {
  const MessageSet sent{{0, 1}, {1, 0}, {1, 1}, {0, 0}};
  CHECK(pupe(sent, sent) == 0.0);
  CHECK(pupe(sent, {}) == 1.0);
  CHECK(pupe(sent, {{0, 1}, {1, 1}, {1, 1, 1}}) == 0.5);
  CHECK_THROWS_AS(pupe({}, sent), std::invalid_argument);
}

TEST_CASE("noiseless demodulation recovers every user") {
  const LinkCodes link = desk_link();
  Rng rng(1);
  for (int trial = 0; trial < 3; ++trial) {
    const auto msgs = random_messages(rng, 4, 37);
    const ComplexTensor3 y = received(link, msgs, 8, std::nullopt, 10 + trial);
    ReceiverConfig rc;
    rc.assumed_terms = 4;
    SolverConfig sc;
    sc.seed = 5 + trial;
    const DemodResult r = demodulate(y, link, rc, sc);
    CHECK(r.messages == MessageSet(msgs.begin(), msgs.end()));
    CHECK(r.diagnostics.relative_residual < 1e-6);
  }
}

TEST_CASE("cancelling every message empties a noiseless tensor") {
  const LinkCodes link = desk_link();
  Rng rng(2);
  const auto msgs = random_messages(rng, 3, 37);
  const ComplexTensor3 y = received(link, msgs, 8, std::nullopt, 3);
  const ComplexTensor3 rest = cancel_messages(y, link, MessageSet(msgs.begin(), msgs.end()));
  CHECK(rest.norm() <= 1e-10 * y.norm());
  const ComplexTensor3 partial = cancel_messages(y, link, {msgs[0]});
  CHECK(partial.norm() < y.norm());
  CHECK(cancel_messages(y, link, {}).vec() == y.vec());
}

TEST_CASE("signal_of matches the channel encoder") {
  const LinkCodes link = desk_link();
  Rng rng(3);
  const Bits m = random_messages(rng, 1, 37)[0];
  const EncodedUser u = encode_user(link.outer.encode(m), link.codecs);
  CHECK((link.signal_of(m) - u.a.matrix * u.b.matrix.transpose()).norm() < 1e-14);
}

TEST_CASE("unknown K: extra terms are rejected as low power") {
  const LinkCodes link = desk_link();
  Rng rng(4);
  const auto msgs = random_messages(rng, 3, 37);
  const ComplexTensor3 y = received(link, msgs, 8, 30.0, 7);
  ReceiverConfig rc;
  rc.assumed_terms = 5;
  const DemodResult r = demodulate(y, link, rc, SolverConfig{});
  for (const auto& m : r.messages) CHECK(std::find(msgs.begin(), msgs.end(), m) != msgs.end());
  CHECK(r.diagnostics.terms == 5);
}

TEST_CASE("successive cancellation bookkeeping") {
  const LinkCodes link = desk_link();
  Rng rng(5);
  const auto msgs = random_messages(rng, 4, 37);
  const ComplexTensor3 y = received(link, msgs, 8, 20.0, 9);
  ReceiverConfig rc;
  rc.assumed_terms = 4;
  rc.sc_iterations = 2;
  const ScResult r = successive_cancellation(y, link, rc, SolverConfig{});
  REQUIRE(r.per_pass.size() == 3);
  for (std::size_t i = 1; i < r.per_pass.size(); ++i)
    CHECK(std::includes(r.per_pass[i].begin(), r.per_pass[i].end(), r.per_pass[i - 1].begin(), r.per_pass[i - 1].end()));
  CHECK(r.per_pass.back() == r.messages);
  CHECK_FALSE(r.passes.empty());
}

TEST_CASE("group demodulation is order independent and parallel-safe") {
  const LinkCodes link = desk_link();
  Rng rng(6);
  std::vector<GroupInput> groups;
  MessageSet all;
  for (int g = 0; g < 3; ++g) {
    const auto msgs = random_messages(rng, 3, 37);
    all.insert(msgs.begin(), msgs.end());
    groups.push_back({received(link, msgs, 8, 25.0, 40 + g), 3});
  }
  ReceiverConfig rc;
  rc.groups = 3;
  const GroupResult seq = demodulate_groups(groups, link, rc, SolverConfig{}, false);
  const GroupResult par = demodulate_groups(groups, link, rc, SolverConfig{}, true);
  CHECK(seq.messages == par.messages);
  std::reverse(groups.begin(), groups.end());
  CHECK(demodulate_groups(groups, link, rc, SolverConfig{}, true).messages == seq.messages);
  CHECK(std::includes(all.begin(), all.end(), seq.messages.begin(), seq.messages.end()));
  CHECK(std::all_of(seq.errors.begin(), seq.errors.end(), [](const auto& e) { return e.empty(); }));
}

TEST_CASE("receiver configuration errors") {
  const LinkCodes link = desk_link();
  ReceiverConfig rc;
  rc.assumed_terms = 0;
  CHECK_THROWS_AS(rc.validate(), std::invalid_argument);
  rc = {};
  rc.power_threshold = 1.0;
  CHECK_THROWS_AS(rc.validate(), std::invalid_argument);
  CHECK_THROWS_AS(demodulate(ComplexTensor3({9, 8, 2}), link, ReceiverConfig{}, SolverConfig{}), std::invalid_argument);
}

}
