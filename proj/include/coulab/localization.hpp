// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "coulab/common.hpp"
#include "coulab/fock.hpp"
#include "coulab/report.hpp"

namespace coulab {

class Rng;

/// Upsilon(Q): F(H) -> F(H) (x) F(H) for Q phi = q phi + (1-q^2)^{1/2} phi,
/// Kronecker index i1 * D + i2. Basis monomials are mapped by replacing each
/// a^dagger(e_i) with c^dagger(q e_i) + d^dagger(r e_i), where
/// c^dagger = a^dagger (x) 1 and d^dagger = (-1)^N (x) a^dagger for fermions.
/// Bosonic spaces are exact only for diagonal q.
SpMat localization_isometry(const FockSpace& space, const CMat& q);

/// (1 - q^2)^{1/2}. Throws unless the spectrum of q lies in [-1e-12, 1 + 1e-12].
CMat complement_weight(const CMat& q);

/// c^dagger_j = a^dagger_j (x) 1 and d^dagger_j = P (x) a^dagger_j on the
/// doubled space, P = (-1)^N for fermions and 1 for bosons.
SpMat doubled_creation(const FockSpace& space, int mode, bool second);

/// a^dagger(f) = sum_j f_j a^dagger_j.
SpMat creation(const FockSpace& space, const CVec& f);

/// Gamma_q = tr_2(Upsilon Gamma Upsilon^*). Linear in gamma, so unnormalized
/// positive operators are allowed.
CMat localize_state(const FockSpace& space, const CMat& gamma, const CMat& q);
CMat localize_state(const FockSpace& space, const CMat& gamma, const SpMat& isometry);

/// q_P = (sum_{i in P} q_i^2)^{1/2}, q_{empty} = 0. Throws when the family does
/// not commute or does not sum to the identity within 1e-10.
CMat family_weight(const std::vector<CMat>& weights, const std::vector<int>& subset);
/// Multiplication operators from grid functions.
std::vector<CMat> diagonal_weights(const std::vector<RVec>& thetas);

/// gap = S(12) + S(23) - S(2) - S(123) for the localized states.
Report ssa_gap(const FockSpace& space, const CMat& gamma, const std::vector<CMat>& weights,
               const std::vector<int>& p1, const std::vector<int>& p2,
               const std::vector<int>& p3);

/// Random smooth diagonal partition of unity with `parts` members over n modes.
std::vector<RVec> random_smooth_partition(int n, int parts, Rng& rng);

/// exp(-dGamma(h)) / Z with h = log((1 - gamma) / gamma); requires 0 < gamma < 1.
CMat quasi_free_state(const FockSpace& space, const CMat& gamma1);
/// max |gamma2 - Wick(gamma1)| for a number-conserving fermionic state.
double wick_error(const FockSpace& space, const CMat& g);

// ------------------------------------------------- classical-quantum states

/// rho = (rho_K), each rho_K a positive operator on F(H) tabulated on sorted
/// tuples of distinct classical grid points. Normalization:
/// sum_K sum_{sorted X} h^K tr rho_K(X) = 1.
struct CQState {
  FockSpace space;
  int points = 0;  // classical grid size
  double h = 1.0;  // cell volume
  std::vector<std::map<std::vector<int>, CMat>> rho;  // rho[K][sorted tuple]
  bool warning = false;

  int k_max() const { return static_cast<int>(rho.size()) - 1; }
  double norm() const;
  /// Throws on asymmetric, non-positive or unnormalized data.
  void validate(double tol = 1e-10) const;
};

/// -tr rho_0 log rho_0 - sum_{K>=1} sum_{sorted X} h^K tr rho_K log rho_K.
double cq_entropy(const CQState& rho);

/// (q, theta)-localized state: classical tuples weighted by prod theta^2,
/// absorbed particles summed with eta^2 = 1 - theta^2, quantum factor
/// q-localized.
CQState cq_localize(const CQState& rho, const CMat& q, const RVec& theta);

Report cq_ssa_gap(const CQState& rho, const std::vector<CMat>& q_family,
                  const std::vector<RVec>& theta_family, const std::vector<int>& p1,
                  const std::vector<int>& p2, const std::vector<int>& p3);

/// Random cq-state with K <= k_max, random densities on each tuple.
CQState random_cq_state(const FockSpace& space, int points, int k_max, Rng& rng);

/// Gamma^ell on F(H) (x) F(V), stored by blocks: each block is the quantum
/// operator attached to one classical occupation projector.
struct QuantizedCQ {
  std::vector<std::vector<int>> occupations;
  std::vector<CMat> blocks;  // already divided by t
  double t = 0.0;
  int grid_points = 0;       // N_ell
  double mean_k = 0.0;       // <K Gamma^ell>
  double entropy = 0.0;      // S_ell(Gamma^ell)
  /// S_ell + <K> log h - log t, which tends to S(rho).
  double corrected_entropy = 0.0;
  /// Materialized matrix on the truncated space (block diagonal).
  CMat dense() const;
};

QuantizedCQ quantize_cq(const CQState& rho);

/// Smooth K <= k_max fixture on [0, cells) with periodic densities, so that
/// midpoint grids converge fast. K = 2 densities vanish on the diagonal.
struct SmoothCQFixture {
  int cells = 3;
  int k_max = 1;
  int quantum_modes = 2;
  std::uint64_t seed = 1;

  /// rho_K at continuum points (K = xs.size()), normalized in the continuum.
  CMat density(const std::vector<double>& xs) const;
  /// Midpoint discretization with m points per cell. The densities are
  /// trigonometric polynomials, so the midpoint sums keep the normalization.
  CQState discretize(int m) const;
};

}  // namespace coulab
