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

#include <cmath>
#include <stdexcept>

#include "btdm/btd_solver.hpp"
#include "btdm/error.hpp"
#include "oracles.hpp"

using namespace btdm;

namespace {

BTDModel random_model(Rng& rng, Dims d, int k, int l) {
  BTDModel m;
  for (int t = 0; t < k; ++t)
    m.terms.push_back({oracle::random_matrix(rng, d.t1, l), oracle::random_matrix(rng, d.t2, l),
                       oracle::random_vector(rng, d.n), {}});
  return m;
}

ComplexTensor3 random_tensor(Rng& rng, Dims d) {
  ComplexTensor3 y(d);
  for (auto& v : y.data()) v = complex_normal(rng);
  return y;
}

// Column c is M(z + e_c) - M(z); exact for a model affine in each coordinate.
CMatrix explicit_jacobian(const BTDModel& model, Dims d, int k, int l) {
  const CVector z = gn::flatten(model);
  const CVector m0 = oracle::synthesize(model).vec();
  CMatrix j(m0.size(), z.size());
  for (Index c = 0; c < z.size(); ++c) {
    CVector zc = z;
    zc(c) += 1.0;
    j.col(c) = oracle::synthesize(gn::unflatten(zc, d, k, l)).vec() - m0;
  }
  return j;
}

// Greedy matching of estimated to true subspaces; returns the worst distance.
double worst_match(const BTDModel& truth, const BTDModel& est, bool use_b) {
  std::vector<bool> taken(est.terms.size(), false);
  double worst = 0.0;
  for (const auto& t : truth.terms) {
    double best = 1e9;
    std::size_t arg = 0;
    for (std::size_t e = 0; e < est.terms.size(); ++e) {
      if (taken[e]) continue;
      const double d = oracle::subspace_distance(use_b ? t.b : t.a, use_b ? est.terms[e].b : est.terms[e].a);
      if (d < best) best = d, arg = e;
    }
    taken[arg] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.restarts = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.rel_residual_tol = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.step_accept_ratio = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("flatten and unflatten are inverse") {
  Rng rng(1);
  const Dims d{4, 3, 2};
  const BTDModel m = random_model(rng, d, 3, 2);
  const CVector z = gn::flatten(m);
  CHECK(z.size() == 3 * ((4 + 3) * 2 + 2));
  CHECK(gn::flatten(gn::unflatten(z, d, 3, 2)) == z);
  CHECK(z(0) == m.terms[0].a(0, 0));
  CHECK(z(4 * 2) == m.terms[0].b(0, 0));
  CHECK(z(4 * 2 + 3 * 2) == m.terms[0].h(0));
}

TEST_CASE("objective against the oracle") {
  Rng rng(2);
  const Dims d{4, 3, 2};
  const BTDModel m = random_model(rng, d, 2, 2);
  const ComplexTensor3 y = random_tensor(rng, d);
  const double expect = (y.vec() - oracle::synthesize(m).vec()).squaredNorm();
  CHECK(gn::objective(y, m) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("gradient and Gramian against the explicit Jacobian") {
  Rng rng(3);
  for (auto [d, k, l] : {std::tuple{Dims{4, 3, 2}, 1, 2}, std::tuple{Dims{5, 4, 3}, 3, 2}, std::tuple{Dims{3, 4, 2}, 2, 1}}) {
    const BTDModel m = random_model(rng, d, k, l);
    const ComplexTensor3 y = random_tensor(rng, d);
    const CMatrix j = explicit_jacobian(m, d, k, l);
    const CVector r = y.vec() - oracle::synthesize(m).vec();
    const CVector g_ref = j.adjoint() * r;
    const CMatrix h_ref = j.adjoint() * j;
    CHECK((gn::gradient(y, m) - g_ref).norm() <= 1e-10 * g_ref.norm());
    CHECK((gn::gramian(m) - h_ref).norm() <= 1e-10 * h_ref.norm());
  }
}

TEST_CASE("gradient against central finite differences") {
  Rng rng(4);
  const Dims d{4, 3, 2};
  const BTDModel m = random_model(rng, d, 1, 2);
  const ComplexTensor3 y = random_tensor(rng, d);
  const CVector z = gn::flatten(m);
  const CVector g = gn::gradient(y, m);
  const double h = 1e-6;
  Eigen::VectorXd analytic(2 * z.size()), numeric(2 * z.size());
  for (Index c = 0; c < z.size(); ++c) {
    for (int part = 0; part < 2; ++part) {
      const cplx step = part == 0 ? cplx(h, 0) : cplx(0, h);
      CVector zp = z, zm = z;
      zp(c) += step;
      zm(c) -= step;
      numeric(2 * c + part) =
          (gn::objective(y, gn::unflatten(zp, d, 1, 2)) - gn::objective(y, gn::unflatten(zm, d, 1, 2))) / (2 * h);
      analytic(2 * c + part) = part == 0 ? -2.0 * g(c).real() : -2.0 * g(c).imag();
    }
  }
  CHECK((analytic - numeric).norm() <= 1e-5 * analytic.norm());
}

TEST_CASE("orthonormalization keeps the term signal") {
  Rng rng(5);
  const Dims d{6, 5, 3};
  const BTDModel m = random_model(rng, d, 2, 2);
  const BTDModel o = orthonormalize_terms(m);
  for (std::size_t t = 0; t < 2; ++t) {
    const auto& term = o.terms[t];
    CHECK((term.a.adjoint() * term.a - CMatrix::Identity(2, 2)).norm() < 1e-12);
    CHECK((term.b.adjoint() * term.b - CMatrix::Identity(2, 2)).norm() < 1e-12);
    CHECK(term.core.norm() == doctest::Approx(std::sqrt(2.0)));
    const ComplexTensor3 before = synthesize_block_term(m.terms[t]);
    const ComplexTensor3 after = oracle::synthesize(BTDModel{{term}});
    CHECK((before.vec() - after.vec()).norm() <= 1e-12 * before.norm());
  }
  BlockTerm bad = m.terms[0];
  bad.a.col(1) = 2.0 * bad.a.col(0);
  CHECK_FALSE(orthonormalize_term(bad));
  CHECK_THROWS_AS(orthonormalize_terms(BTDModel{{bad}}), CanonicalizationFailure);
}

TEST_CASE("random initialization is seeded") {
  const Dims d{5, 4, 3};
  const BTDModel a = init_random(d, 2, 2, 9), b = init_random(d, 2, 2, 9), c = init_random(d, 2, 2, 10);
  CHECK(gn::flatten(a) == gn::flatten(b));
  CHECK(gn::flatten(a) != gn::flatten(c));
  CHECK((a.terms[0].a.adjoint() * a.terms[0].a - CMatrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("noiseless fit recovers the subspaces") {
  Rng rng(6);
  const Dims d{10, 8, 8};
  const BTDModel truth = random_model(rng, d, 3, 2);
  const ComplexTensor3 y = synthesize_received(truth);
  SolverConfig cfg;
  cfg.seed = 3;
  const SolveResult r = gndl_fit(y, 3, 2, cfg);
  CHECK(r.relative_residual <= 1e-6);
  CHECK(worst_match(truth, r.model, false) <= 1e-4);
  CHECK(worst_match(truth, r.model, true) <= 1e-4);
  CHECK(r.decodable == std::vector<bool>(3, true));
  REQUIRE_FALSE(r.residual_history.empty());
  for (std::size_t i = 1; i < r.residual_history.size(); ++i)
    CHECK(r.residual_history[i] <= r.residual_history[i - 1] * (1 + 1e-12));
  CHECK(residual(r.model, y) <= 1e-6 * y.norm());
}

TEST_CASE("a warm start at the truth converges at once") {
  Rng rng(7);
  const Dims d{6, 5, 4};
  const BTDModel truth = random_model(rng, d, 2, 2);
  const ComplexTensor3 y = synthesize_received(truth);
  SolverConfig cfg;
  cfg.restarts = 1;
  const SolveResult r = gndl_fit(y, 2, 2, cfg, &truth);
  CHECK(r.relative_residual <= 1e-12);
  CHECK(r.iterations <= 2);
}

TEST_CASE("restarts stop once the fit is exact or two runs agree") {
  Rng rng(12);
  const Dims d{6, 5, 4};
  const BTDModel truth = random_model(rng, d, 2, 2);
  const ComplexTensor3 y = synthesize_received(truth);
  SolverConfig cfg;
  cfg.restarts = 4;
  const SolveResult early = gndl_fit(y, 2, 2, cfg, &truth);
  CHECK(early.total_iterations == early.iterations);
  cfg.agreement_tol = 0.0;
  const SolveResult all = gndl_fit(y, 2, 2, cfg, &truth);
  CHECK(all.total_iterations > all.iterations);
  CHECK(all.relative_residual <= 1e-10);
  SolverConfig bad;
  bad.agreement_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("rank-1 fit") {
  Rng rng(8);
  const Dims d{5, 4, 6};
  const BTDModel truth = random_model(rng, d, 3, 1);
  const ComplexTensor3 y = synthesize_received(truth);
  const SolveResult r = cpd_fit(y, 3, SolverConfig{});
  CHECK(r.relative_residual <= 1e-6);
  CHECK(worst_match(truth, r.model, false) <= 1e-4);
}

TEST_CASE("the fit is deterministic per seed") {
  Rng rng(9);
  const Dims d{6, 5, 4};
  ComplexTensor3 y = synthesize_received(random_model(rng, d, 2, 2));
  y += random_tensor(rng, d) *= cplx(0.05);
  SolverConfig cfg;
  cfg.seed = 42;
  const SolveResult a = gndl_fit(y, 2, 2, cfg), b = gndl_fit(y, 2, 2, cfg);
  CHECK(a.relative_residual == b.relative_residual);
  CHECK(a.total_iterations == b.total_iterations);
}

TEST_CASE("input errors") {
  Rng rng(10);
  ComplexTensor3 y = random_tensor(rng, {4, 4, 2});
  CHECK_THROWS_AS(gndl_fit(y, 0, 2, SolverConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(gndl_fit(y, 1, 5, SolverConfig{}), std::invalid_argument);
  y(0, 0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(gndl_fit(y, 1, 2, SolverConfig{}), std::invalid_argument);
}

TEST_CASE("zero tensor gives a zero residual") {
  const ComplexTensor3 y({4, 4, 2});
  const SolveResult r = gndl_fit(y, 1, 2, SolverConfig{});
  CHECK(r.relative_residual == 0.0);
}

}
