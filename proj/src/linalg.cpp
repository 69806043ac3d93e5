// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include "coulab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coulab/rng.hpp"

namespace coulab {

RVec eigvalsh(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

namespace {

EigenPair dense_lowest(const SpMat& h) {
  CMat d = CMat(h);
  Eigen::SelfAdjointEigenSolver<CMat> es(d);
  EigenPair out;
  out.value = es.eigenvalues()(0);
  out.vector = es.eigenvectors().col(0);
  out.residual = (d * out.vector - out.value * out.vector).norm();
  out.method = "dense";
  return out;
}

}  // namespace

EigenPair lowest_eigenpair(const SpMat& h, double tol, int dense_limit) {
  const int n = static_cast<int>(h.rows());
  if (n == 0) throw Error("lowest_eigenpair: empty matrix");
  if (n <= dense_limit) return dense_lowest(h);

  // Restarted Lanczos, full reorthogonalization against the current basis.
  // Krylov basis capped at about 64 MB.
  const long budget = (64L << 20) / (16L * n);
  const int m = static_cast<int>(std::clamp<long>(std::min<long>(n, 160), 2, std::max<long>(budget, 20)));
  const int max_restarts = 200;
  Rng rng(0x1a2c3e5f7ULL + static_cast<std::uint64_t>(n));
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(rng.uniform(-1, 1), 0.0);
  v.normalize();

  EigenPair best;
  best.method = "lanczos";
  best.residual = kInf;
  CMat basis(n, m);
  for (int restart = 0; restart < max_restarts; ++restart) {
    RVec alpha = RVec::Zero(m);
    RVec beta = RVec::Zero(m);
    basis.col(0) = v;
    int k = 0;
    for (; k < m; ++k) {
      CVec w = h * basis.col(k);
      alpha(k) = basis.col(k).dot(w).real();
      for (int pass = 0; pass < 2; ++pass)
        w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).adjoint() * w);
      if (k + 1 == m) break;
      const double b = w.norm();
      if (b < 1e-13) break;
      beta(k) = b;
      basis.col(k + 1) = w / b;
    }
    const int kk = std::min(k + 1, m);
    RMat t = RMat::Zero(kk, kk);
    for (int i = 0; i < kk; ++i) {
      t(i, i) = alpha(i);
      if (i + 1 < kk) t(i, i + 1) = t(i + 1, i) = beta(i);
    }
    Eigen::SelfAdjointEigenSolver<RMat> es(t);
    const double theta = es.eigenvalues()(0);
    CVec y = basis.leftCols(kk) * es.eigenvectors().col(0).cast<cplx>();
    y.normalize();
    const double res = (h * y - theta * y).norm();
    if (res < best.residual) {
      best.value = theta;
      best.vector = y;
      best.residual = res;
    }
    if (res <= tol * std::max(1.0, std::abs(theta))) return best;
    v = y;
  }
  std::ostringstream os;
  os << "lanczos did not converge: residual " << best.residual;
  throw Error(os.str());
}

CMat hermitian_function(const CMat& m, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  RVec fv = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * fv.cast<cplx>().asDiagonal() *
         es.eigenvectors().adjoint();
}

double logsumexp(const std::vector<double>& xs) {
  if (xs.empty()) return -kInf;
  const double mx = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

double entropy_from_eigenvalues(const RVec& ev) {
  double s = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    const double p = ev(i);
    if (p > 1e-14) s -= p * std::log(p);
  }
  return s;
}

double hermiticity_error(const CMat& m) {
  if (m.rows() != m.cols()) return kInf;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

CMat random_density(int dim, Rng& rng, int rank) {
  const int r = rank < 0 ? dim : rank;
  CMat g(dim, r);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < r; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
  CMat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

CMat random_unitary(int dim, Rng& rng) {
  CMat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    const double ad = std::abs(d);
    if (ad > 0) q.col(j) *= d / ad;
  }
  return q;
}

}  // namespace coulab
