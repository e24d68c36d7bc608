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

#ifndef BTDM_RECEIVER_HPP
#define BTDM_RECEIVER_HPP

#include <set>
#include <span>
#include <string>
#include <vector>

#include "btdm/bch.hpp"
#include "btdm/btd_solver.hpp"
#include "btdm/channel.hpp"

namespace btdm {

struct ReceiverConfig {
  int assumed_terms = 1;         // K when known, else the uniqueness bound
  double power_threshold = 0.05; // relative to ||Y||^2 / assumed_terms
  int sc_iterations = 0;
  int groups = 1;

  void validate() const;
};

/// Decoded information payloads. Unsourced: no user identities.
using MessageSet = std::set<Bits>;

/// Everything a receiver needs to turn block terms back into payloads.
struct LinkCodes {
  SymbolCodecs codecs;
  BchCode outer;

  int info_bits() const { return outer.params().k_eff(); }
  /// Outer-encodes a payload and returns the unit-energy signal A B^T.
  CMatrix signal_of(const Bits& payload) const;
};

struct UniquenessBound {
  int condition1 = 0;  // largest K meeting the first sufficient condition, 0 if none
  int condition2 = 0;
  int bound = 0;       // max of the two
};

/// Largest user count for which the rank-(L,L,1) decomposition is
/// essentially unique by either sufficient condition.
UniquenessBound uniqueness_bound(int t1, int t2, int l, int n);

/// K (T1 + T2 - 2L) L.
long long dof_total(int k, int t1, int t2, int l);

struct DemodDiagnostics {
  int solver_iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  bool solver_failed = false;
  int terms = 0;
  int undecodable = 0;
  int low_power = 0;
  int demap_failures = 0;
  int outer_failures = 0;
  int duplicates = 0;
  std::string error;
};

struct DemodResult {
  MessageSet messages;
  DemodDiagnostics diagnostics;
};

/// One BTD fit followed by power filtering, demapping and outer decoding.
DemodResult demodulate(const ComplexTensor3& y, const LinkCodes& link, const ReceiverConfig& receiver,
                       const SolverConfig& solver);

struct ScResult {
  MessageSet messages;
  /// Cumulative message set after pass 0 (plain demodulation) and after each
  /// of the sc_iterations cancellation passes; always sc_iterations + 1 long.
  std::vector<MessageSet> per_pass;
  std::vector<DemodDiagnostics> passes;
};

/// Subtracts the least-squares fit of every validated user's re-encoded
/// signal from Y and decodes the remainder, up to sc_iterations times.
ScResult successive_cancellation(const ComplexTensor3& y, const LinkCodes& link, const ReceiverConfig& receiver,
                                 const SolverConfig& solver);

/// Y minus the joint least-squares fit of the given payloads' block terms.
ComplexTensor3 cancel_messages(const ComplexTensor3& y, const LinkCodes& link, const MessageSet& messages);

struct GroupInput {
  ComplexTensor3 y;
  int assumed_terms = 1;
};

struct GroupResult {
  MessageSet messages;
  std::vector<ScResult> groups;
  /// Per group: empty on success, otherwise the error that stopped it.
  std::vector<std::string> errors;
};

/// Independent demodulation (with SC when configured) of each group and the
/// union of the results. Groups with assumed_terms == 0 are skipped.
GroupResult demodulate_groups(std::span<const GroupInput> groups, const LinkCodes& link,
                              const ReceiverConfig& receiver, const SolverConfig& solver, bool parallel = true);

/// |sent \ decoded| / |sent|. Throws std::invalid_argument for empty `sent`.
double pupe(const MessageSet& sent, const MessageSet& decoded);

}  // namespace btdm

#endif  // BTDM_RECEIVER_HPP
