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

#include "btdm/btd_solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "btdm/error.hpp"
#include "btdm/rng.hpp"

namespace btdm {

void SolverConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
  if (!(rel_residual_tol > 0) || !(grad_tol > 0)) throw std::invalid_argument("SolverConfig: tolerances must be > 0");
  if (!(trust_radius_init > 0) || !(trust_radius_max >= trust_radius_init))
    throw std::invalid_argument("SolverConfig: need 0 < trust_radius_init <= trust_radius_max");
  if (!(step_accept_ratio > 0) || !(step_accept_ratio < 1))
    throw std::invalid_argument("SolverConfig: step_accept_ratio must lie in (0, 1)");
  if (restarts < 1) throw std::invalid_argument("SolverConfig: restarts must be >= 1");
  if (!(agreement_tol >= 0)) throw std::invalid_argument("SolverConfig: agreement_tol must be >= 0");
}

namespace {

struct Layout {
  Dims dims;
  int k = 0;
  int l = 0;

  Index per_term() const { return (dims.t1 + dims.t2) * l + dims.n; }
  Index size() const { return per_term() * k; }
  Index a_off(int t) const { return per_term() * t; }
  Index b_off(int t) const { return a_off(t) + dims.t1 * l; }
  Index h_off(int t) const { return b_off(t) + dims.t2 * l; }
};

using ConstMap = Eigen::Map<const CMatrix>;

// Residual, gradient and Gramian of ||Y - sum_k (A_k B_k^T) o h_k||^2 on
// the flattened parameter vector. The tensor is handled as its transposed
// mode-3 unfolding (T1*T2 x N).
class Problem {
 public:
  Problem(const ComplexTensor3& y, Layout layout)
      : y_(y.data().data(), y.dims().t1 * y.dims().t2, y.dims().n), layout_(layout) {}

  const Layout& layout() const { return layout_; }

  ConstMap a(const CVector& z, int t) const { return {z.data() + layout_.a_off(t), layout_.dims.t1, layout_.l}; }
  ConstMap b(const CVector& z, int t) const { return {z.data() + layout_.b_off(t), layout_.dims.t2, layout_.l}; }
  Eigen::Map<const CVector> h(const CVector& z, int t) const { return {z.data() + layout_.h_off(t), layout_.dims.n}; }

  // Caches signal matrices and the residual; returns ||R||^2.
  double evaluate(const CVector& z) {
    const auto& d = layout_.dims;
    s_.resize(d.t1 * d.t2, layout_.k);
    hmat_.resize(d.n, layout_.k);
    for (int t = 0; t < layout_.k; ++t) {
      Eigen::Map<CMatrix>(s_.col(t).data(), d.t1, d.t2).noalias() = a(z, t) * b(z, t).transpose();
      hmat_.col(t) = h(z, t);
    }
    r_ = y_;
    r_.noalias() -= s_ * hmat_.transpose();
    return r_.squaredNorm();
  }

  // Fits h_k by linear least squares with A_k, B_k held fixed.
  void fit_channels(CVector& z) {
    evaluate(z);
    const CMatrix ht = s_.completeOrthogonalDecomposition().solve(CMatrix(y_));
    for (int t = 0; t < layout_.k; ++t) z.segment(layout_.h_off(t), layout_.dims.n) = ht.row(t).transpose();
  }

  // J^H r for the residual cached by the last evaluate().
  CVector gradient(const CVector& z) const {
    const auto& d = layout_.dims;
    CVector g(layout_.size());
    const CMatrix rh = r_ * hmat_.conjugate();
    const CMatrix gh = s_.adjoint() * r_;
    for (int t = 0; t < layout_.k; ++t) {
      ConstMap rk(rh.col(t).data(), d.t1, d.t2);
      Eigen::Map<CMatrix>(g.data() + layout_.a_off(t), d.t1, layout_.l) = rk * b(z, t).conjugate();
      Eigen::Map<CMatrix>(g.data() + layout_.b_off(t), d.t2, layout_.l) = rk.transpose() * a(z, t).conjugate();
      g.segment(layout_.h_off(t), d.n) = gh.row(t).transpose();
    }
    return g;
  }

  CMatrix gramian(const CVector& z) const {
    const auto& d = layout_.dims;
    const Index t1 = d.t1, t2 = d.t2, n = d.n;
    const int l = layout_.l;
    CMatrix g = CMatrix::Zero(layout_.size(), layout_.size());
    for (int k = 0; k < layout_.k; ++k) {
      const auto ak = a(z, k);
      const auto bk = b(z, k);
      const auto hk = h(z, k);
      for (int m = 0; m < layout_.k; ++m) {
        const auto am = a(z, m);
        const auto bm = b(z, m);
        const auto hm = h(z, m);
        const cplx hh = hk.dot(hm);
        const CMatrix aa = ak.adjoint() * am;
        const CMatrix bb = bk.adjoint() * bm;
        const cplx ss = aa.cwiseProduct(bb).sum();
        const CMatrix a_bbt = am * bb.transpose();
        const CMatrix b_aat = bm * aa.transpose();
        const CMatrix cak_bb = ak.conjugate() * bb;
        const CMatrix cbk_aa = bk.conjugate() * aa;
        const Index ra = layout_.a_off(k), rb = layout_.b_off(k), rh = layout_.h_off(k);
        const Index ca = layout_.a_off(m), cb = layout_.b_off(m), ch = layout_.h_off(m);
        for (int p = 0; p < l; ++p) {
          for (int q = 0; q < l; ++q) {
            g.block(ra + t1 * p, ca + t1 * q, t1, t1).diagonal().setConstant(bb(p, q) * hh);
            g.block(rb + t2 * p, cb + t2 * q, t2, t2).diagonal().setConstant(aa(p, q) * hh);
            g.block(ra + t1 * p, cb + t2 * q, t1, t2).noalias() = hh * am.col(q) * bk.col(p).adjoint();
            g.block(rb + t2 * p, ca + t1 * q, t2, t1).noalias() = hh * bm.col(q) * ak.col(p).adjoint();
          }
          g.block(ra + t1 * p, ch, t1, n).noalias() = a_bbt.col(p) * hk.adjoint();
          g.block(rb + t2 * p, ch, t2, n).noalias() = b_aat.col(p) * hk.adjoint();
          g.block(rh, ca + t1 * p, n, t1).noalias() = hm * cak_bb.col(p).transpose();
          g.block(rh, cb + t2 * p, n, t2).noalias() = hm * cbk_aa.col(p).transpose();
        }
        g.block(rh, ch, n, n).diagonal().setConstant(ss);
      }
    }
    return g;
  }

 private:
  ConstMap y_;
  Layout layout_;
  CMatrix s_;
  CMatrix hmat_;
  CMatrix r_;
};

// Equalizes ||A_k||, ||B_k||, ||h_k|| without changing the model.
void balance(CVector& z, const Layout& layout) {
  const auto& d = layout.dims;
  for (int t = 0; t < layout.k; ++t) {
    auto a = z.segment(layout.a_off(t), d.t1 * layout.l);
    auto b = z.segment(layout.b_off(t), d.t2 * layout.l);
    auto h = z.segment(layout.h_off(t), d.n);
    const double na = a.norm(), nb = b.norm(), nh = h.norm();
    if (na == 0.0 || nb == 0.0 || nh == 0.0) continue;
    const double g = std::cbrt(na * nb * nh);
    a *= g / na;
    b *= g / nb;
    h *= g / nh;
  }
}

CVector solve_damped(const CMatrix& g, const CVector& rhs) {
  const double scale = std::max(g.diagonal().real().maxCoeff(), std::numeric_limits<double>::min());
  double lambda = 1e-12 * scale;
  CMatrix damped = g;
  for (int attempt = 0; attempt < 12; ++attempt) {
    damped.diagonal() = g.diagonal().array() + lambda;
    Eigen::LLT<CMatrix> llt(damped);
    if (llt.info() == Eigen::Success) {
      CVector x = llt.solve(rhs);
      if (x.allFinite()) return x;
    }
    lambda *= 100.0;
  }
  return CVector::Zero(rhs.size());
}

struct RunResult {
  CVector z;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

RunResult run_dogleg(Problem& problem, CVector z, const SolverConfig& cfg, double ynorm) {
  const Layout& layout = problem.layout();
  RunResult out;
  double f = problem.evaluate(z);
  if (!std::isfinite(f)) return out;
  out.history.push_back(std::sqrt(f));
  const double znorm0 = std::max(z.norm(), std::numeric_limits<double>::min());
  double radius = cfg.trust_radius_init * znorm0;
  const double radius_max = cfg.trust_radius_max * znorm0;
  const double ynorm2 = ynorm * ynorm;

  auto finish = [&](bool converged) {
    out.z = z;
    out.residual = std::sqrt(f);
    out.converged = converged;
    return out;
  };
  if (std::sqrt(f) <= 1e-15 * ynorm) return finish(true);

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    out.iterations = it;
    f = problem.evaluate(z);
    const CVector g = problem.gradient(z);
    if (g.norm() <= cfg.grad_tol * ynorm2) return finish(true);
    const CMatrix gram = problem.gramian(z);

    const CVector p_gn = solve_damped(gram, g);
    const double gg = g.squaredNorm();
    const double ggg = (g.adjoint() * gram * g)(0, 0).real();
    CVector p;
    if (p_gn.norm() <= radius) {
      p = p_gn;
    } else {
      const CVector p_sd = (ggg > 0 ? gg / ggg : radius / std::sqrt(gg)) * g;
      const double sd_norm = p_sd.norm();
      if (sd_norm >= radius) {
        p = (radius / std::sqrt(gg)) * g;
      } else {
        const CVector dir = p_gn - p_sd;
        const double qa = dir.squaredNorm();
        const double qb = 2.0 * p_sd.dot(dir).real();
        const double qc = sd_norm * sd_norm - radius * radius;
        const double tau = (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
        p = p_sd + tau * dir;
      }
    }

    const double predicted = 2.0 * g.dot(p).real() - (p.adjoint() * gram * p)(0, 0).real();
    const CVector z_try = z + p;
    const double f_try = problem.evaluate(z_try);
    const double rho = (predicted > 0 && std::isfinite(f_try)) ? (f - f_try) / predicted : -1.0;

    if (rho < 0.1) {
      radius *= 0.25;
    } else if (rho > 0.75) {
      radius = std::min(2.0 * radius, radius_max);
    }

    if (rho > cfg.step_accept_ratio) {
      const double old_res = std::sqrt(f);
      z = z_try;
      f = f_try;
      balance(z, layout);
      const double res = std::sqrt(f);
      out.history.push_back(res);
      if (res <= 1e-15 * ynorm) return finish(true);
      if (old_res - res < cfg.rel_residual_tol * old_res) return finish(true);
    }
    if (radius < 1e-15 * z.norm()) return finish(true);
  }
  f = problem.evaluate(z);
  return finish(false);
}

BTDModel unflatten_layout(const CVector& z, const Layout& layout) {
  const auto& d = layout.dims;
  BTDModel model;
  model.terms.reserve(static_cast<std::size_t>(layout.k));
  for (int t = 0; t < layout.k; ++t) {
    BlockTerm term;
    term.a = ConstMap(z.data() + layout.a_off(t), d.t1, layout.l);
    term.b = ConstMap(z.data() + layout.b_off(t), d.t2, layout.l);
    term.h = z.segment(layout.h_off(t), d.n);
    model.terms.push_back(std::move(term));
  }
  return model;
}

Layout layout_of(const BTDModel& model) {
  if (model.terms.empty()) throw std::invalid_argument("empty model");
  const auto& t0 = model.terms.front();
  Layout layout{{t0.a.rows(), t0.b.rows(), t0.h.size()}, static_cast<int>(model.terms.size()),
                static_cast<int>(t0.a.cols())};
  for (const auto& t : model.terms) {
    if (t.core.size() != 0) throw std::invalid_argument("least-squares helpers expect models without a core");
    if (t.a.rows() != layout.dims.t1 || t.b.rows() != layout.dims.t2 || t.h.size() != layout.dims.n ||
        t.a.cols() != layout.l || t.b.cols() != layout.l)
      throw std::invalid_argument("terms disagree on (T1, T2, N, L)");
  }
  return layout;
}

CMatrix orthonormal_basis(const CMatrix& m, CMatrix& r) {
  Eigen::HouseholderQR<CMatrix> qr(m);
  r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  return qr.householderQ() * CMatrix::Identity(m.rows(), m.cols());
}

}  // namespace

std::optional<BlockTerm> orthonormalize_term(const BlockTerm& term) {
  if (!has_full_column_rank(term.a) || !has_full_column_rank(term.b)) return std::nullopt;
  const Index l = term.a.cols();
  CMatrix ra, rb;
  BlockTerm out;
  out.a = orthonormal_basis(term.a, ra);
  out.b = orthonormal_basis(term.b, rb);
  CMatrix core = term.core.size() == 0 ? CMatrix(ra * rb.transpose()) : CMatrix(ra * term.core * rb.transpose());
  const double scale = core.norm() / std::sqrt(static_cast<double>(l));
  if (!(scale > 0) || !std::isfinite(scale)) return std::nullopt;
  out.core = core / scale;
  out.h = term.h * scale;
  return out;
}

BTDModel orthonormalize_terms(const BTDModel& model) {
  BTDModel out;
  out.terms.reserve(model.terms.size());
  for (const auto& term : model.terms) {
    auto canon = orthonormalize_term(term);
    if (!canon) throw CanonicalizationFailure("orthonormalize_terms: rank-deficient factor");
    out.terms.push_back(std::move(*canon));
  }
  return out;
}

BTDModel init_random(Dims dims, int k, int l, std::uint64_t seed) {
  if (k < 1 || l < 1 || dims.t1 < l || dims.t2 < l || dims.n < 1) throw std::invalid_argument("init_random: bad sizes");
  Rng rng(seed);
  BTDModel model;
  for (int t = 0; t < k; ++t) {
    BlockTerm term;
    term.a.resize(dims.t1, l);
    term.b.resize(dims.t2, l);
    term.h.resize(dims.n);
    for (Index j = 0; j < l; ++j)
      for (Index i = 0; i < dims.t1; ++i) term.a(i, j) = complex_normal(rng);
    for (Index j = 0; j < l; ++j)
      for (Index i = 0; i < dims.t2; ++i) term.b(i, j) = complex_normal(rng);
    for (Index i = 0; i < dims.n; ++i) term.h(i) = complex_normal(rng);
    CMatrix unused;
    term.a = orthonormal_basis(term.a, unused);
    term.b = orthonormal_basis(term.b, unused);
    model.terms.push_back(std::move(term));
  }
  return model;
}

SolveResult gndl_fit(const ComplexTensor3& y, int k, int l, const SolverConfig& config, const BTDModel* init) {
  config.validate();
  if (!y.all_finite()) throw std::invalid_argument("gndl_fit: tensor has non-finite entries");
  const Dims dims = y.dims();
  if (k < 1 || l < 1 || l > dims.t1 || l > dims.t2) throw std::invalid_argument("gndl_fit: bad K or L");
  const Layout layout{dims, k, l};
  const double ynorm = y.norm();
  Problem problem(y, layout);

  RunResult best;
  int best_restart = -1;
  int total_iterations = 0;
  for (int r = 0; r < config.restarts; ++r) {
    CVector z;
    if (r == 0 && init != nullptr) {
      z = gn::flatten(*init);
      if (layout_of(*init).size() != layout.size()) throw std::invalid_argument("gndl_fit: init has wrong shape");
    } else {
      z = gn::flatten(init_random(dims, k, l, mix_seed(config.seed, static_cast<std::uint64_t>(r))));
      problem.fit_channels(z);
      balance(z, layout);
    }
    RunResult run = run_dogleg(problem, std::move(z), config, ynorm);
    total_iterations += run.iterations;
    if (!std::isfinite(run.residual)) continue;
    const bool agrees = best_restart >= 0 && std::abs(run.residual - best.residual) <=
                                                 config.agreement_tol * std::max(run.residual, best.residual);
    if (best_restart < 0 || run.residual < best.residual) {
      best = std::move(run);
      best_restart = r;
    }
    if (config.agreement_tol > 0 && (agrees || best.residual <= 1e-10 * ynorm)) break;
  }
  if (best_restart < 0) throw SolverFailure("gndl_fit: every restart diverged");

  SolveResult out;
  out.relative_residual = ynorm > 0 ? best.residual / ynorm : 0.0;
  out.iterations = best.iterations;
  out.total_iterations = total_iterations;
  out.converged = best.converged;
  out.restart_index = best_restart;
  out.residual_history = std::move(best.history);
  const BTDModel raw = unflatten_layout(best.z, layout);
  for (const auto& term : raw.terms) {
    auto canon = orthonormalize_term(term);
    out.decodable.push_back(canon.has_value());
    out.model.terms.push_back(canon ? std::move(*canon) : term);
  }
  return out;
}

SolveResult cpd_fit(const ComplexTensor3& y, int k, const SolverConfig& config) { return gndl_fit(y, k, 1, config); }

namespace gn {

CVector flatten(const BTDModel& model) {
  const Layout layout = layout_of(model);
  const auto& d = layout.dims;
  CVector z(layout.size());
  for (int t = 0; t < layout.k; ++t) {
    const auto& term = model.terms[static_cast<std::size_t>(t)];
    Eigen::Map<CMatrix>(z.data() + layout.a_off(t), d.t1, layout.l) = term.a;
    Eigen::Map<CMatrix>(z.data() + layout.b_off(t), d.t2, layout.l) = term.b;
    z.segment(layout.h_off(t), d.n) = term.h;
  }
  return z;
}

BTDModel unflatten(const CVector& z, Dims dims, int k, int l) {
  const Layout layout{dims, k, l};
  if (z.size() != layout.size()) throw std::invalid_argument("unflatten: parameter count mismatch");
  return unflatten_layout(z, layout);
}

double objective(const ComplexTensor3& y, const BTDModel& model) {
  const Layout layout = layout_of(model);
  if (!(layout.dims == y.dims())) throw std::invalid_argument("objective: dimension mismatch");
  Problem problem(y, layout);
  return problem.evaluate(flatten(model));
}

CVector gradient(const ComplexTensor3& y, const BTDModel& model) {
  const Layout layout = layout_of(model);
  if (!(layout.dims == y.dims())) throw std::invalid_argument("gradient: dimension mismatch");
  Problem problem(y, layout);
  const CVector z = flatten(model);
  problem.evaluate(z);
  return problem.gradient(z);
}

CMatrix gramian(const BTDModel& model) {
  const Layout layout = layout_of(model);
  const ComplexTensor3 zero(layout.dims);
  Problem problem(zero, layout);
  return problem.gramian(flatten(model));
}

}  // namespace gn

}  // namespace btdm
