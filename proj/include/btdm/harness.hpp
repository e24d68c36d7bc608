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

#ifndef BTDM_HARNESS_HPP
#define BTDM_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "btdm/receiver.hpp"

namespace btdm {

/// One experiment. Every field has a key in the flat config format; the
/// solver fields use a `solver.` prefix (e.g. `solver.restarts = 5`).
struct ExperimentConfig {
  int t1 = 10;
  int t2 = 8;
  int l = 2;
  int b0 = 37;      // information bits per user
  int b_bch = 65;   // outer codeword length
  int b1 = 37;      // coded bits carried by A
  int b2 = 28;      // coded bits carried by B
  double f = 2.0;
  int antennas = 8;
  std::vector<int> users{4};
  /// Eb/N0 points in dB; infinity means noiseless.
  std::vector<double> ebn0_db{std::numeric_limits<double>::infinity()};
  double symbol_energy = 0.0;  // <= 0: T1 * T2
  int sc_iterations = 0;
  int groups = 1;
  double power_threshold = 0.05;
  bool known_k = true;
  SolverConfig solver;
  int trials = 20;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: all hardware threads
  bool strict = false;
  bool record_timing = false;
  std::string out;
  std::vector<int> bench_users{1, 2, 4};
  int bench_repeats = 3;
};

/// Parses `key = value` lines; '#' starts a comment. Throws ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Checks invariants and builds codecs plus the outer code. Throws ConfigError.
LinkCodes make_link(const ExperimentConfig& config);

/// Uniqueness bound of one group for this configuration.
int group_capacity(const ExperimentConfig& config);

struct TrialRecord {
  MessageSet sent;
  MessageSet decoded;
  /// Cumulative decoded set after each SC pass (sc_iterations + 1 entries).
  std::vector<MessageSet> per_pass;
  double pupe = 0.0;
  int solver_iterations = 0;
  double runtime_ms = 0.0;
  bool solver_failed = false;
  /// False when any solver run stopped at max_iterations.
  bool solver_converged = true;
};

/// One trial. Payloads, channels and noise depend only on (seed, K, trial);
/// cells that differ only in Eb/N0 share their random draws.
TrialRecord run_trial(const ExperimentConfig& config, const LinkCodes& link, double ebn0_db, int users, int trial);

/// `config.trials` trials of one cell, in trial order, spread over threads.
std::vector<TrialRecord> run_cell(const ExperimentConfig& config, const LinkCodes& link, double ebn0_db, int users);

struct ResultRow {
  double ebn0_db = 0.0;
  int users = 0;
  int groups = 1;
  int sc_iters = 0;
  int trials = 0;
  double pupe_mean = 0.0;
  double pupe_ci95 = 0.0;
  double mean_solver_iters = 0.0;
  double mean_runtime_ms = 0.0;
  std::uint64_t seed = 0;
};

/// Mean and normal-approximation 95% half-width of per-trial values.
std::pair<double, double> mean_ci95(const std::vector<double>& values);

ResultRow summarize(const ExperimentConfig& config, double ebn0_db, int users, const std::vector<TrialRecord>& trials);

/// Every (Eb/N0, K) cell, sorted by Eb/N0 then K. Throws ConfigError on an
/// infeasible configuration and SolverFailure in strict mode.
std::vector<ResultRow> run_monte_carlo(const ExperimentConfig& config);

inline constexpr std::string_view kCsvHeader =
    "ebn0_db,K,G,sc_iters,trials,pupe_mean,pupe_ci95,mean_solver_iters,mean_runtime_ms,seed";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// Uniqueness bound per condition, DOF, per-symbol bit budgets and spectral efficiency.
std::string check_params_report(const ExperimentConfig& config);

}  // namespace btdm

#endif  // BTDM_HARNESS_HPP
