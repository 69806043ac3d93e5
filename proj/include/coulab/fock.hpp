// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "coulab/common.hpp"

namespace coulab {

enum class Statistics { Fermion, Boson };

inline constexpr int kDefaultFermionModeCap = 14;
inline constexpr std::int64_t kDefaultBosonDimCap = std::int64_t{1} << 20;
inline constexpr int kDefaultBosonCap = 4;

/// Occupation-number basis of a (truncated) Fock space over n modes.
/// Basis index = sum_i n_i (cap+1)^i, i.e. colex order on occupation tuples.
/// Basis vector |n> = prod over occupied modes in ascending order of
/// (a_i^dagger)^{n_i} / sqrt(n_i!) applied to the vacuum.
struct FockSpace {
  int n = 0;
  Statistics stats = Statistics::Fermion;
  int cap = 1;
  std::int64_t dim = 1;

  bool fermionic() const { return stats == Statistics::Fermion; }
  int radix() const { return cap + 1; }
  int occupation(std::int64_t index, int mode) const;
  std::vector<int> occupations(std::int64_t index) const;
  std::int64_t index_of(const std::vector<int>& occ) const;
  int particle_number(std::int64_t index) const;
  int max_particles() const { return n * cap; }
  /// Basis indices with exactly N particles, ascending.
  std::vector<std::int64_t> sector(int N) const;
};

FockSpace build_space(int n, Statistics stats, int boson_cap = kDefaultBosonCap,
                      int fermion_mode_cap = kDefaultFermionModeCap,
                      std::int64_t boson_dim_cap = kDefaultBosonDimCap);

enum class LadderKind { Create, Annihilate };

/// a_i^dagger or a_i on the full space. Fermionic sign is the parity of the
/// occupied modes below i; bosonic creation vanishes at the cap.
RSpMat ladder(const FockSpace& space, int mode, LadderKind kind);

RSpMat number_operator(const FockSpace& space);

/// sum_ij h_ij a_i^dagger a_j. Throws on non-Hermitian h.
SpMat second_quantize_onebody(const FockSpace& space, const CMat& h);

/// Site-diagonal pair term 1/2 sum_{i!=j} w_ij n_i n_j + 1/2 sum_i w_ii n_i(n_i-1).
/// For fermions the second sum vanishes identically.
RSpMat second_quantize_twobody(const FockSpace& space, const RMat& w);

/// Fixed particle-number sector, enumerated without the full space.
/// Usable when the full mixed-radix index would overflow.
class SectorBasis {
 public:
  SectorBasis(int n, Statistics stats, int cap, int N);

  int modes() const { return n_; }
  int particles() const { return N_; }
  Statistics stats() const { return stats_; }
  int cap() const { return cap_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<std::uint8_t>& occupation(std::size_t k) const { return states_[k]; }
  /// Position of an occupation vector, or -1.
  long find(const std::vector<std::uint8_t>& occ) const;

 private:
  int n_, N_, cap_;
  Statistics stats_;
  std::vector<std::vector<std::uint8_t>> states_;
  std::unordered_map<std::string, long> lookup_;
};

/// Number of states in a sector without enumerating it.
double sector_dimension(int n, Statistics stats, int cap, int N);

/// sum_ij h_ij a_i^dagger a_j restricted to a sector.
SpMat sector_onebody(const SectorBasis& basis, const CMat& h);
/// Diagonal of the pair term restricted to a sector.
RVec sector_pair_diagonal(const SectorBasis& basis, const RMat& w);

/// Density matrix on a Fock space.
struct FockState {
  FockSpace space;
  CMat matrix;
  bool number_conserving = true;

  /// Checks trace, hermiticity and positivity at 1e-12; throws on violation.
  void validate(double tol = 1e-12) const;
  /// True when no coherence between different particle numbers exceeds tol.
  bool commutes_with_number(double tol = 1e-12) const;
};

FockState make_state(const FockSpace& space, const CMat& matrix);
FockState pure_state(const FockSpace& space, const CVec& psi);

/// -tr G log G with the 1e-14 eigenvalue floor.
double entropy(const FockState& g);
double entropy(const CMat& g);

/// k = 1: gamma(i,j) = tr(G a_j^dagger a_i).
/// k = 2: gamma2(i*n+j, k*n+l) = tr(G a_l^dagger a_k^dagger a_i a_j).
CMat reduced_density(const FockState& g, int k);
CMat reduced_density(const FockSpace& space, const CMat& g, int k);

/// Unitary U: F(H) -> F(H_1) (x) F(H_2), Kronecker index i1*D2 + i2, where
/// H_1 is spanned by `first` (ascending) and H_2 by the remaining modes.
/// U maps a^dagger(products over H_1) a^dagger(products over H_2)|0> to the
/// tensor product, so fermionic signs count H_2 modes placed before H_1 modes.
RSpMat split_isomorphism(const FockSpace& space, const std::vector<int>& first);

/// Partial trace of an operator on C^{d1} (x) C^{d2}; keep = 1 traces factor 2.
CMat partial_trace(const CMat& m, std::int64_t d1, std::int64_t d2, int keep);

}  // namespace coulab
