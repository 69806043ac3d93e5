// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "coulab/common.hpp"

namespace coulab {

class Rng;

struct EigenPair {
  double value = 0.0;
  CVec vector;
  double residual = 0.0;
  std::string method;  // "dense" or "lanczos"
};

/// Sectors up to this dimension are diagonalized densely.
inline constexpr int kDenseLimit = 2048;

/// Eigenvalues of a Hermitian matrix in ascending order.
RVec eigvalsh(const CMat& m);

/// Lowest eigenpair of a sparse Hermitian matrix. Dense below kDenseLimit,
/// otherwise Lanczos with full reorthogonalization and restarts.
/// Throws Error when the residual does not reach `tol`.
EigenPair lowest_eigenpair(const SpMat& h, double tol = 1e-9,
                           int dense_limit = kDenseLimit);

/// f(M) for Hermitian M through the spectral decomposition.
CMat hermitian_function(const CMat& m, const std::function<double(double)>& f);

double logsumexp(const std::vector<double>& xs);

/// -sum p log p with p < 1e-14 treated as zero.
double entropy_from_eigenvalues(const RVec& ev);

/// Max |entry| of M - M^dagger.
double hermiticity_error(const CMat& m);

/// Spectral norm (largest singular value).
double spectral_norm(const CMat& m);

/// Random Hermitian positive matrix with unit trace; `rank` < 0 means full.
CMat random_density(int dim, Rng& rng, int rank = -1);

/// Haar-random unitary from QR of a complex Ginibre matrix.
CMat random_unitary(int dim, Rng& rng);

}  // namespace coulab
