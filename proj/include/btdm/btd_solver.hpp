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

#ifndef BTDM_BTD_SOLVER_HPP
#define BTDM_BTD_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "btdm/tensor.hpp"

namespace btdm {

/// Gauss-Newton dogleg settings. Trust radii are relative to the norm of
/// the parameter vector at the start of each restart.
struct SolverConfig {
  int max_iterations = 500;
  double rel_residual_tol = 1e-8;
  double grad_tol = 1e-8;
  double trust_radius_init = 0.5;
  double trust_radius_max = 1e3;
  double step_accept_ratio = 0.1;
  int restarts = 5;
  /// Skip the remaining restarts once two of them end within this relative
  /// residual of each other, or one fits to 1e-10 relative. 0 disables.
  double agreement_tol = 1e-6;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument unless tolerances are positive and restarts >= 1.
  void validate() const;
};

struct SolveResult {
  BTDModel model;
  double relative_residual = 0.0;
  int iterations = 0;
  int total_iterations = 0;
  bool converged = false;
  int restart_index = 0;
  /// Per term: false when canonicalization found a rank-deficient factor.
  std::vector<bool> decodable;
  /// Residual norm after every accepted step of the winning restart.
  std::vector<double> residual_history;
};

/// Fits K rank-(L, L, 1) terms to y, keeping the best of config.restarts
/// random starts (the first start is `init` when given). The result is
/// canonicalized with orthonormal A_k, B_k.
///
/// Throws std::invalid_argument on non-finite y or bad sizes, and
/// SolverFailure when every restart ends with a non-finite residual.
SolveResult gndl_fit(const ComplexTensor3& y, int k, int l, const SolverConfig& config,
                     const BTDModel* init = nullptr);

/// Rank-1 terms (the L = 1 case).
SolveResult cpd_fit(const ComplexTensor3& y, int k, const SolverConfig& config);

/// Orthonormal bases for A and B, the remaining mixing in an L x L core with
/// Frobenius norm sqrt(L), and the overall scale in h. Empty when A or B is
/// rank deficient.
std::optional<BlockTerm> orthonormalize_term(const BlockTerm& term);

/// Applies orthonormalize_term to every term; throws CanonicalizationFailure
/// if any factor is rank deficient.
BTDModel orthonormalize_terms(const BTDModel& model);

/// Standard complex Gaussian factors with orthonormalized A and B columns.
BTDModel init_random(Dims dims, int k, int l, std::uint64_t seed);

/// Least-squares building blocks, exposed for verification. Parameters are
/// flattened term by term as [vec(A_k), vec(B_k), h_k] with column-major vec;
/// models must not carry a core.
namespace gn {

CVector flatten(const BTDModel& model);
BTDModel unflatten(const CVector& z, Dims dims, int k, int l);

/// ||Y - M(z)||_F^2.
double objective(const ComplexTensor3& y, const BTDModel& model);

/// J^H (Y - M(z)). For z = x + iy the real gradient of the objective is
/// d/dx = -2 Re(g), d/dy = -2 Im(g).
CVector gradient(const ComplexTensor3& y, const BTDModel& model);

/// J^H J, assembled from factor inner products.
CMatrix gramian(const BTDModel& model);

}  // namespace gn

}  // namespace btdm

#endif  // BTDM_BTD_SOLVER_HPP
