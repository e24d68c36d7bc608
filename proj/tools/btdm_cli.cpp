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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "btdm/bits.hpp"
#include "btdm/btd_solver.hpp"
#include "btdm/channel.hpp"
#include "btdm/error.hpp"
#include "btdm/grassmann.hpp"
#include "btdm/harness.hpp"
#include "btdm/rng.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

btdm::ExperimentConfig load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
  btdm::ExperimentConfig cfg = btdm::load_config(path);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw btdm::ConfigError("override '" + s + "' is not key=value");
    btdm::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  return cfg;
}

void print_matrix(std::ostream& out, const btdm::CMatrix& m) {
  char buf[64];
  for (btdm::Index r = 0; r < m.rows(); ++r) {
    for (btdm::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", c ? "," : "", m(r, c).real(), m(r, c).imag());
      out << buf;
    }
    out << '\n';
  }
}

btdm::CMatrix read_matrix(std::istream& in, int t, int l) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    rows.push_back(std::move(vals));
  }
  if (static_cast<int>(rows.size()) != t) throw btdm::ConfigError("matrix must have T rows");
  btdm::CMatrix m(t, l);
  for (int r = 0; r < t; ++r) {
    if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != 2 * l)
      throw btdm::ConfigError("each matrix row needs 2L values (re,im per column)");
    for (int c = 0; c < l; ++c)
      m(r, c) = {rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(2 * c)],
                 rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(2 * c + 1)]};
  }
  return m;
}

int run_simulate(const std::string& config, const std::vector<std::string>& sets, std::optional<std::uint64_t> seed,
                 const std::string& out_path) {
  btdm::ExperimentConfig cfg = load_with_overrides(config, sets);
  if (seed) cfg.seed = *seed;
  if (!out_path.empty()) cfg.out = out_path;
  const auto rows = btdm::run_monte_carlo(cfg);
  if (cfg.out.empty() || cfg.out == "-") {
    btdm::write_csv(std::cout, rows);
  } else {
    std::ofstream out(cfg.out);
    if (!out) throw btdm::ConfigError("cannot write '" + cfg.out + "'");
    btdm::write_csv(out, rows);
  }
  return 0;
}

int run_bench(const std::string& config, const std::vector<std::string>& sets) {
  const btdm::ExperimentConfig cfg = load_with_overrides(config, sets);
  const btdm::LinkCodes link = btdm::make_link(cfg);
  std::cout << "K,T1,T2,N,L,repeats,mean_ms,mean_iters,mean_rel_residual\n";
  for (int k : cfg.bench_users) {
    if (k < 1) throw btdm::ConfigError("bench_users entries must be >= 1");
    double ms = 0.0, iters = 0.0, res = 0.0;
    for (int r = 0; r < cfg.bench_repeats; ++r) {
      const btdm::SeedTree node = btdm::SeedTree(cfg.seed).child("bench").child(static_cast<std::uint64_t>(k)).child(
          static_cast<std::uint64_t>(r));
      btdm::Rng bits_rng = node.child("payloads").rng();
      std::bernoulli_distribution coin(0.5);
      std::vector<btdm::Bits> coded;
      for (int u = 0; u < k; ++u) {
        btdm::Bits p(static_cast<std::size_t>(cfg.b0));
        for (auto& b : p) b = coin(bits_rng) ? 1 : 0;
        coded.push_back(link.outer.encode(p));
      }
      btdm::ChannelConfig ch;
      ch.antennas = cfg.antennas;
      ch.users = k;
      if (std::isfinite(cfg.ebn0_db.front())) ch.ebn0_db = cfg.ebn0_db.front();
      ch.symbol_energy = cfg.symbol_energy;
      ch.info_bits = cfg.b0;
      btdm::Rng channel_rng = node.child("channel").rng();
      btdm::Rng noise_rng = node.child("noise").rng();
      const auto tx = btdm::transmit(coded, link.codecs, ch, channel_rng, noise_rng);
      btdm::SolverConfig sc = cfg.solver;
      sc.seed = node.child("solver").value();
      const auto start = std::chrono::steady_clock::now();
      const auto fit = btdm::gndl_fit(tx.y, k, cfg.l, sc);
      ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      iters += fit.total_iterations;
      res += fit.relative_residual;
    }
    const double n = std::max(1, cfg.bench_repeats);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%d,%d,%.3f,%.1f,%.3e\n", k, cfg.t1, cfg.t2, cfg.antennas, cfg.l,
                  cfg.bench_repeats, ms / n, iters / n, res / n);
    std::cout << buf;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-term tensor modulation simulator"};
  app.require_subcommand(1);

  std::string config, out_path, bits_hex, matrix_path;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  int t = 0, l = 2, ell = -1;
  double f = 2.0;

  auto* sim = app.add_subcommand("simulate", "Run the Monte-Carlo sweep described by a config file");
  sim->add_option("--config", config, "Config file")->required();
  auto* seed_opt = sim->add_option("--seed", seed, "Override the master seed");
  sim->add_option("--out", out_path, "Output CSV path ('-' for stdout)");
  sim->add_option("--set", sets, "Override a config entry (key=value)");

  auto* check = app.add_subcommand("check-params", "Report uniqueness bound, DOF and bit budgets");
  check->add_option("--config", config, "Config file")->required();
  check->add_option("--set", sets, "Override a config entry (key=value)");

  auto* enc = app.add_subcommand("encode", "Map a hex payload to a Grassmann symbol (CSV on stdout)");
  enc->add_option("--t", t, "Symbol height T")->required();
  enc->add_option("--l", l, "Symbol rank L (1 or 2)");
  enc->add_option("--bits", bits_hex, "Payload in hex; read from stdin when omitted");
  enc->add_option("--ell", ell, "Payload length in bits (default: full budget)");
  enc->add_option("--f", f, "Pilot constant");

  auto* dec = app.add_subcommand("decode", "Demap a symbol estimate (CSV) back to a hex payload");
  dec->add_option("--t", t, "Symbol height T")->required();
  dec->add_option("--l", l, "Symbol rank L (1 or 2)");
  dec->add_option("--matrix", matrix_path, "CSV file with T rows of re,im pairs ('-' for stdin)")->required();
  dec->add_option("--ell", ell, "Payload length in bits (default: full budget)");
  dec->add_option("--f", f, "Pilot constant");

  auto* bench = app.add_subcommand("bench", "Time the BTD solver against the number of users");
  bench->add_option("--config", config, "Config file")->required();
  bench->add_option("--set", sets, "Override a config entry (key=value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) {
      std::optional<std::uint64_t> s;
      if (seed_opt->count() > 0) s = seed;
      return run_simulate(config, sets, s, out_path);
    }
    if (*check) {
      std::cout << btdm::check_params_report(load_with_overrides(config, sets));
      return 0;
    }
    if (*enc) {
      btdm::CodecParams params;
      try {
        params = btdm::CodecParams::make(t, l, ell, f);
      } catch (const std::exception& e) {
        throw btdm::ConfigError(e.what());
      }
      if (bits_hex.empty()) {
        std::getline(std::cin, bits_hex);
        while (!bits_hex.empty() && std::isspace(static_cast<unsigned char>(bits_hex.back()))) bits_hex.pop_back();
      }
      const btdm::Bits bits = btdm::hex_to_bits(bits_hex, static_cast<std::size_t>(params.ell));
      print_matrix(std::cout, btdm::build_symbol(bits, params).matrix);
      return 0;
    }
    if (*dec) {
      btdm::CodecParams params;
      try {
        params = btdm::CodecParams::make(t, l, ell, f);
      } catch (const std::exception& e) {
        throw btdm::ConfigError(e.what());
      }
      btdm::CMatrix m;
      if (matrix_path == "-") {
        m = read_matrix(std::cin, t, l);
      } else {
        std::ifstream in(matrix_path);
        if (!in) throw btdm::ConfigError("cannot open '" + matrix_path + "'");
        m = read_matrix(in, t, l);
      }
      const auto res = l == 1 ? btdm::demap_symbol_rank1(m, params) : btdm::demap_symbol(m, params);
      if (!res) {
        std::cerr << "error: symbol erased (demapping failed)\n";
        return 1;
      }
      std::cout << btdm::bits_to_hex(res->bits) << '\n';
      return 0;
    }
    if (*bench) return run_bench(config, sets);
  } catch (const btdm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const btdm::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
