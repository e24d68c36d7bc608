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

#include "btdm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <mutex>
#include <random>
#include <thread>

#include "btdm/error.hpp"
#include "btdm/rng.hpp"

namespace btdm {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  value = trim(value);
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "inf" || value == "noiseless") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const std::string s(value);
    const double v = std::stod(s, &used);
    if (used != s.size()) bad_value(key, value);
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

bool parse_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

template <typename F>
auto parse_list(std::string_view key, std::string_view value, F&& one) {
  std::vector<decltype(one(key, value))> out;
  while (true) {
    const auto comma = value.find(',');
    out.push_back(one(key, trim(value.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  auto i = [&] { return parse_integer<int>(key, value); };
  auto r = [&] { return parse_real(key, value); };
  if (key == "T1") c.t1 = i();
  else if (key == "T2") c.t2 = i();
  else if (key == "L") c.l = i();
  else if (key == "B0") c.b0 = i();
  else if (key == "B_BCH") c.b_bch = i();
  else if (key == "B1") c.b1 = i();
  else if (key == "B2") c.b2 = i();
  else if (key == "f") c.f = r();
  else if (key == "N") c.antennas = i();
  else if (key == "K") c.users = parse_list(key, value, parse_integer<int>);
  else if (key == "ebn0_db") c.ebn0_db = parse_list(key, value, parse_real);
  else if (key == "symbol_energy") c.symbol_energy = r();
  else if (key == "sc_iterations") c.sc_iterations = i();
  else if (key == "groups") c.groups = i();
  else if (key == "power_threshold") c.power_threshold = r();
  else if (key == "known_k") c.known_k = parse_bool(key, value);
  else if (key == "trials") c.trials = i();
  else if (key == "seed") c.seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "threads") c.threads = i();
  else if (key == "strict") c.strict = parse_bool(key, value);
  else if (key == "record_timing") c.record_timing = parse_bool(key, value);
  else if (key == "out") c.out = std::string(trim(value));
  else if (key == "bench_users") c.bench_users = parse_list(key, value, parse_integer<int>);
  else if (key == "bench_repeats") c.bench_repeats = i();
  else if (key == "solver.max_iterations") c.solver.max_iterations = i();
  else if (key == "solver.rel_residual_tol") c.solver.rel_residual_tol = r();
  else if (key == "solver.grad_tol") c.solver.grad_tol = r();
  else if (key == "solver.trust_radius_init") c.solver.trust_radius_init = r();
  else if (key == "solver.trust_radius_max") c.solver.trust_radius_max = r();
  else if (key == "solver.step_accept_ratio") c.solver.step_accept_ratio = r();
  else if (key == "solver.restarts") c.solver.restarts = i();
  else if (key == "solver.agreement_tol") c.solver.agreement_tol = r();
  else if (key == "solver.seed") c.solver.seed = parse_integer<std::uint64_t>(key, value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v(line);
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(c, v.substr(0, eq), v.substr(eq + 1));
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

int group_capacity(const ExperimentConfig& c) { return uniqueness_bound(c.t1, c.t2, c.l, c.antennas).bound; }

LinkCodes make_link(const ExperimentConfig& c) {
  if (c.b1 + c.b2 != c.b_bch) throw ConfigError("B1 + B2 must equal B_BCH");
  if (c.antennas < 1) throw ConfigError("N must be >= 1");
  if (c.trials < 0) throw ConfigError("trials must be >= 0");
  if (c.groups < 1) throw ConfigError("groups must be >= 1");
  if (c.sc_iterations < 0) throw ConfigError("sc_iterations must be >= 0");
  if (!(c.power_threshold >= 0 && c.power_threshold < 1)) throw ConfigError("power_threshold must lie in [0, 1)");
  if (c.users.empty() || c.ebn0_db.empty()) throw ConfigError("K and ebn0_db need at least one value");
  try {
    c.solver.validate();
    SymbolCodecs codecs{CodecParams::make(c.t1, c.l, c.b1, c.f), CodecParams::make(c.t2, c.l, c.b2, c.f)};
    BchCode outer = BchCode::for_lengths(c.b_bch, c.b0);
    const int capacity = group_capacity(c);
    if (c.strict && capacity == 0) throw ConfigError("no user count satisfies the uniqueness conditions");
    for (int k : c.users) {
      if (k < 1) throw ConfigError("K must be >= 1");
      if (c.groups > 1 && k > c.groups * capacity)
        throw ConfigError("K = " + std::to_string(k) + " exceeds the capacity of " + std::to_string(c.groups) +
                          " groups");
      if (c.b0 < 62 && (std::uint64_t{1} << c.b0) < static_cast<std::uint64_t>(k))
        throw ConfigError("too few payload bits for distinct messages");
    }
    if (!c.known_k && capacity == 0) throw ConfigError("unknown K needs a positive uniqueness bound");
    return LinkCodes{std::move(codecs), std::move(outer)};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

TrialRecord run_trial(const ExperimentConfig& c, const LinkCodes& link, double ebn0_db, int users, int trial) {
  const auto start = std::chrono::steady_clock::now();
  const SeedTree streams =
      SeedTree(c.seed).child("trial").child(static_cast<std::uint64_t>(users)).child(static_cast<std::uint64_t>(trial));

  TrialRecord rec;
  Rng payload_rng = streams.child("payloads").rng();
  std::vector<Bits> payloads;
  std::bernoulli_distribution coin(0.5);
  while (static_cast<int>(payloads.size()) < users) {
    Bits p(static_cast<std::size_t>(c.b0));
    for (auto& b : p) b = coin(payload_rng) ? 1 : 0;
    if (rec.sent.insert(p).second) payloads.push_back(std::move(p));
  }

  std::vector<int> order(static_cast<std::size_t>(users));
  for (int u = 0; u < users; ++u) order[static_cast<std::size_t>(u)] = u;
  Rng group_rng = streams.child("groups").rng();
  std::shuffle(order.begin(), order.end(), group_rng);
  std::vector<std::vector<Bits>> coded(static_cast<std::size_t>(c.groups));
  for (int u = 0; u < users; ++u)
    coded[static_cast<std::size_t>(u % c.groups)].push_back(link.outer.encode(payloads[static_cast<std::size_t>(order[static_cast<std::size_t>(u)])]));

  const int capacity = group_capacity(c);
  std::vector<GroupInput> inputs;
  for (int g = 0; g < c.groups; ++g) {
    const auto& members = coded[static_cast<std::size_t>(g)];
    if (members.empty()) continue;
    ChannelConfig ch;
    ch.antennas = c.antennas;
    ch.users = static_cast<int>(members.size());
    if (std::isfinite(ebn0_db)) ch.ebn0_db = ebn0_db;
    ch.symbol_energy = c.symbol_energy;
    ch.info_bits = c.b0;
    Rng channel_rng = streams.child("channel").child(static_cast<std::uint64_t>(g)).rng();
    Rng noise_rng = streams.child("noise").child(static_cast<std::uint64_t>(g)).rng();
    Transmission tx = transmit(members, link.codecs, ch, channel_rng, noise_rng);
    inputs.push_back({std::move(tx.y), c.known_k ? ch.users : capacity});
  }

  ReceiverConfig rc;
  rc.power_threshold = c.power_threshold;
  rc.sc_iterations = c.sc_iterations;
  rc.groups = c.groups;
  SolverConfig sc = c.solver;
  sc.seed = streams.child("solver").value();
  const GroupResult res = demodulate_groups(inputs, link, rc, sc, false);

  rec.decoded = res.messages;
  rec.per_pass.assign(static_cast<std::size_t>(c.sc_iterations + 1), {});
  for (const auto& g : res.groups) {
    for (std::size_t p = 0; p < g.per_pass.size() && p < rec.per_pass.size(); ++p)
      rec.per_pass[p].insert(g.per_pass[p].begin(), g.per_pass[p].end());
    for (const auto& d : g.passes) {
      rec.solver_iterations += d.solver_iterations;
      rec.solver_failed = rec.solver_failed || d.solver_failed;
      rec.solver_converged = rec.solver_converged && (d.solver_failed || d.converged);
    }
  }
  for (const auto& e : res.errors) rec.solver_failed = rec.solver_failed || !e.empty();
  rec.pupe = pupe(rec.sent, rec.decoded);
  if (c.record_timing)
    rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<TrialRecord> run_cell(const ExperimentConfig& c, const LinkCodes& link, double ebn0_db, int users) {
  std::vector<TrialRecord> out(static_cast<std::size_t>(std::max(c.trials, 0)));
  if (out.empty()) return out;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(c.threads > 0 ? static_cast<unsigned>(c.threads) : hw,
                                              static_cast<unsigned>(out.size()));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int t = next++; t < c.trials; t = next++) {
      try {
        out[static_cast<std::size_t>(t)] = run_trial(c, link, ebn0_db, users, t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::pair<double, double> mean_ci95(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n)};
}

ResultRow summarize(const ExperimentConfig& c, double ebn0_db, int users, const std::vector<TrialRecord>& trials) {
  ResultRow row;
  row.ebn0_db = ebn0_db;
  row.users = users;
  row.groups = c.groups;
  row.sc_iters = c.sc_iterations;
  row.trials = static_cast<int>(trials.size());
  row.seed = c.seed;
  std::vector<double> p;
  double iters = 0.0, ms = 0.0;
  for (const auto& t : trials) {
    p.push_back(t.pupe);
    iters += t.solver_iterations;
    ms += t.runtime_ms;
  }
  std::tie(row.pupe_mean, row.pupe_ci95) = mean_ci95(p);
  if (!trials.empty()) {
    row.mean_solver_iters = iters / static_cast<double>(trials.size());
    row.mean_runtime_ms = ms / static_cast<double>(trials.size());
  }
  return row;
}

std::vector<ResultRow> run_monte_carlo(const ExperimentConfig& c) {
  const LinkCodes link = make_link(c);
  std::vector<ResultRow> rows;
  if (c.trials == 0) return rows;
  std::vector<double> snrs = c.ebn0_db;
  std::vector<int> ks = c.users;
  std::sort(snrs.begin(), snrs.end());
  std::sort(ks.begin(), ks.end());
  for (double e : snrs) {
    for (int k : ks) {
      const auto trials = run_cell(c, link, e, k);
      if (c.strict && std::any_of(trials.begin(), trials.end(),
                                  [](const auto& t) { return t.solver_failed || !t.solver_converged; }))
        throw SolverFailure("solver failure in cell Eb/N0 = " + std::to_string(e) + ", K = " + std::to_string(k));
      rows.push_back(summarize(c, e, k, trials));
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%d,%d,%d,%d,%.6f,%.6f,%.3f,%.3f,%llu\n", r.ebn0_db, r.users, r.groups,
                  r.sc_iters, r.trials, r.pupe_mean, r.pupe_ci95, r.mean_solver_iters, r.mean_runtime_ms,
                  static_cast<unsigned long long>(r.seed));
    out << buf;
  }
}

std::string check_params_report(const ExperimentConfig& c) {
  std::ostringstream os;
  const UniquenessBound ub = uniqueness_bound(c.t1, c.t2, c.l, c.antennas);
  os << "dims: T1=" << c.t1 << " T2=" << c.t2 << " L=" << c.l << " N=" << c.antennas << '\n';
  os << "uniqueness bound: condition1=" << ub.condition1 << " condition2=" << ub.condition2 << " K_max=" << ub.bound
     << '\n';
  os << "DOF total at K_max: " << dof_total(ub.bound, c.t1, c.t2, c.l) << '\n';
  auto budget = [&](const char* name, int t, int ell) {
    os << name << ": T=" << t << " bits=" << ell;
    try {
      const BitBudget b = bit_budget(t, c.l, ell);
      int longest = 0, shortest = b.part_lengths.empty() ? 0 : b.part_lengths.front();
      for (int len : b.part_lengths) {
        longest = std::max(longest, len);
        shortest = std::min(shortest, len);
      }
      int n_long = static_cast<int>(std::count(b.part_lengths.begin(), b.part_lengths.end(), longest));
      os << " ell1=" << b.ell1 << " ell2=" << b.ell2 << " parts=" << b.part_lengths.size() << " (" << n_long << " x "
         << longest << " bits";
      if (shortest != longest) os << ", " << b.part_lengths.size() - static_cast<std::size_t>(n_long) << " x " << shortest << " bits";
      os << ")\n";
    } catch (const std::exception& e) {
      os << " infeasible: " << e.what() << '\n';
    }
  };
  budget("symbol A", c.t1, c.b1);
  budget("symbol B", c.t2, c.b2);
  const int tc = c.t1 * c.t2;
  char buf[128];
  std::snprintf(buf, sizeof buf, "spectral efficiency: B0/Tc = %d/%d = %.4f bits/channel-use\n", c.b0, tc,
                static_cast<double>(c.b0) / tc);
  os << buf;
  try {
    const BchCode code = BchCode::for_lengths(c.b_bch, c.b0);
    const auto& p = code.params();
    os << "outer code: (" << p.n_eff() << "," << p.k_eff() << ") from BCH(" << p.n << "," << p.k << ",t=" << p.t
       << ") shortened by " << p.shorten << '\n';
  } catch (const std::exception& e) {
    os << "outer code: infeasible: " << e.what() << '\n';
  }
  return os.str();
}

}  // namespace btdm
