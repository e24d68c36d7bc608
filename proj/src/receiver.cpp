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

#include "btdm/receiver.hpp"

#include <algorithm>
#include <exception>
#include <future>
#include <stdexcept>

#include "btdm/error.hpp"
#include "btdm/rng.hpp"

namespace btdm {

void ReceiverConfig::validate() const {
  if (assumed_terms < 1) throw std::invalid_argument("ReceiverConfig: assumed_terms must be >= 1");
  if (!(power_threshold >= 0 && power_threshold < 1))
    throw std::invalid_argument("ReceiverConfig: power_threshold must lie in [0, 1)");
  if (sc_iterations < 0) throw std::invalid_argument("ReceiverConfig: sc_iterations must be >= 0");
  if (groups < 1) throw std::invalid_argument("ReceiverConfig: groups must be >= 1");
}

CMatrix LinkCodes::signal_of(const Bits& payload) const {
  const Bits coded = outer.encode(payload);
  const EncodedUser sym = encode_user(coded, codecs);
  return sym.a.matrix * sym.b.matrix.transpose();
}

UniquenessBound uniqueness_bound(int t1, int t2, int l, int n) {
  UniquenessBound out;
  if (t1 < 1 || t2 < 1 || l < 1 || n < 1) return out;
  const int a = t1 / l;
  const int b = t2 / l;
  const long long cells = static_cast<long long>(t1) * t2 / (static_cast<long long>(l) * l);
  const int limit = a + b + n + 2;
  for (int k = 1; k <= limit; ++k) {
    const int ma = std::min(a, k), mb = std::min(b, k), mn = std::min(n, k);
    if (n >= k && ma + mb >= k + 2) out.condition1 = k;
    if (cells >= k && ma + mb + mn >= 2 * k + 2) out.condition2 = k;
  }
  out.bound = std::max(out.condition1, out.condition2);
  return out;
}

long long dof_total(int k, int t1, int t2, int l) {
  return static_cast<long long>(k) * (t1 + t2 - 2LL * l) * l;
}

DemodResult demodulate(const ComplexTensor3& y, const LinkCodes& link, const ReceiverConfig& receiver,
                       const SolverConfig& solver) {
  receiver.validate();
  const auto& codecs = link.codecs;
  if (y.dims().t1 != codecs.first.t || y.dims().t2 != codecs.second.t)
    throw std::invalid_argument("demodulate: tensor dimensions do not match the constellations");
  if (link.outer.params().n_eff() != codecs.coded_bits())
    throw std::invalid_argument("demodulate: outer code length differs from the symbol bit budget");

  DemodResult out;
  auto& diag = out.diagnostics;
  SolveResult fit;
  try {
    fit = gndl_fit(y, receiver.assumed_terms, codecs.first.l, solver);
  } catch (const SolverFailure& e) {
    diag.solver_failed = true;
    diag.error = e.what();
    return out;
  }
  diag.solver_iterations = fit.total_iterations;
  diag.relative_residual = fit.relative_residual;
  diag.converged = fit.converged;
  diag.terms = static_cast<int>(fit.model.terms.size());

  const double floor = receiver.power_threshold * y.squared_norm() / receiver.assumed_terms;
  for (std::size_t i = 0; i < fit.model.terms.size(); ++i) {
    const BlockTerm& term = fit.model.terms[i];
    if (!fit.decodable[i]) {
      ++diag.undecodable;
      continue;
    }
    const double energy = term.signal().squaredNorm() * term.h.squaredNorm();
    if (energy < floor) {
      ++diag.low_power;
      continue;
    }
    const auto a = demap_symbol(term.a, codecs.first);
    const auto b = demap_symbol(term.b, codecs.second);
    if (!a || !b) {
      ++diag.demap_failures;
      continue;
    }
    Bits coded = a->bits;
    coded.insert(coded.end(), b->bits.begin(), b->bits.end());
    DecodeResult decoded = link.outer.decode(coded);
    if (!decoded.valid()) {
      ++diag.outer_failures;
      continue;
    }
    if (!out.messages.insert(std::move(decoded.payload)).second) ++diag.duplicates;
  }
  return out;
}

ComplexTensor3 cancel_messages(const ComplexTensor3& y, const LinkCodes& link, const MessageSet& messages) {
  if (messages.empty()) return y;
  const Dims d = y.dims();
  CMatrix x(d.t1 * d.t2, static_cast<Index>(messages.size()));
  Index col = 0;
  for (const auto& m : messages) {
    const CMatrix s = link.signal_of(m);
    x.col(col++) = Eigen::Map<const CVector>(s.data(), s.size());
  }
  Eigen::Map<const CMatrix> ymat(y.data().data(), d.t1 * d.t2, d.n);
  const CMatrix h = x.completeOrthogonalDecomposition().solve(CMatrix(ymat));
  ComplexTensor3 out = y;
  Eigen::Map<CMatrix>(out.data().data(), d.t1 * d.t2, d.n) -= x * h;
  return out;
}

ScResult successive_cancellation(const ComplexTensor3& y, const LinkCodes& link, const ReceiverConfig& receiver,
                                 const SolverConfig& solver) {
  receiver.validate();
  ScResult out;
  DemodResult first = demodulate(y, link, receiver, solver);
  out.messages = std::move(first.messages);
  out.passes.push_back(first.diagnostics);
  out.per_pass.push_back(out.messages);

  for (int it = 1; it <= receiver.sc_iterations; ++it) {
    const int remaining = receiver.assumed_terms - static_cast<int>(out.messages.size());
    if (remaining < 1 || out.messages.empty()) break;
    ReceiverConfig next = receiver;
    next.assumed_terms = remaining;
    SolverConfig pass_solver = solver;
    pass_solver.seed = mix_seed(solver.seed, static_cast<std::uint64_t>(it));
    const ComplexTensor3 rest = cancel_messages(y, link, out.messages);
    DemodResult pass = demodulate(rest, link, next, pass_solver);
    out.passes.push_back(pass.diagnostics);
    const std::size_t before = out.messages.size();
    out.messages.insert(pass.messages.begin(), pass.messages.end());
    out.per_pass.push_back(out.messages);
    if (out.messages.size() == before) break;
  }
  while (static_cast<int>(out.per_pass.size()) < receiver.sc_iterations + 1) out.per_pass.push_back(out.messages);
  return out;
}

GroupResult demodulate_groups(std::span<const GroupInput> groups, const LinkCodes& link,
                              const ReceiverConfig& receiver, const SolverConfig& solver, bool parallel) {
  GroupResult out;
  out.groups.resize(groups.size());
  out.errors.resize(groups.size());

  auto work = [&](std::size_t g) {
    const GroupInput& in = groups[g];
    if (in.assumed_terms < 1) return;
    try {
      ReceiverConfig rc = receiver;
      rc.assumed_terms = in.assumed_terms;
      out.groups[g] = successive_cancellation(in.y, link, rc, solver);
    } catch (const std::exception& e) {
      out.errors[g] = e.what();
    }
  };

  if (parallel && groups.size() > 1) {
    std::vector<std::future<void>> pending;
    pending.reserve(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) pending.push_back(std::async(std::launch::async, work, g));
    for (auto& p : pending) p.get();
  } else {
    for (std::size_t g = 0; g < groups.size(); ++g) work(g);
  }
  for (const auto& r : out.groups) out.messages.insert(r.messages.begin(), r.messages.end());
  return out;
}

double pupe(const MessageSet& sent, const MessageSet& decoded) {
  if (sent.empty()) throw std::invalid_argument("pupe: empty transmitted set");
  std::size_t missing = 0;
  for (const auto& m : sent)
    if (!decoded.count(m)) ++missing;
  return static_cast<double>(missing) / static_cast<double>(sent.size());
}

}  // namespace btdm
