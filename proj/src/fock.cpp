// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include "coulab/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coulab/linalg.hpp"

namespace coulab {

// ---------------------------------------------------------------- FockSpace

int FockSpace::occupation(std::int64_t index, int mode) const {
  for (int i = 0; i < mode; ++i) index /= radix();
  return static_cast<int>(index % radix());
}

std::vector<int> FockSpace::occupations(std::int64_t index) const {
  std::vector<int> occ(n);
  for (int i = 0; i < n; ++i) {
    occ[i] = static_cast<int>(index % radix());
    index /= radix();
  }
  return occ;
}

std::int64_t FockSpace::index_of(const std::vector<int>& occ) const {
  std::int64_t idx = 0, p = 1;
  for (int i = 0; i < n; ++i) {
    idx += occ[i] * p;
    p *= radix();
  }
  return idx;
}

int FockSpace::particle_number(std::int64_t index) const {
  int s = 0;
  for (int i = 0; i < n; ++i) {
    s += static_cast<int>(index % radix());
    index /= radix();
  }
  return s;
}

std::vector<std::int64_t> FockSpace::sector(int N) const {
  std::vector<std::int64_t> out;
  for (std::int64_t s = 0; s < dim; ++s)
    if (particle_number(s) == N) out.push_back(s);
  return out;
}

FockSpace build_space(int n, Statistics stats, int boson_cap, int fermion_mode_cap,
                      std::int64_t boson_dim_cap) {
  if (n < 1) throw Error("build_space: need at least one mode");
  FockSpace s;
  s.n = n;
  s.stats = stats;
  if (stats == Statistics::Fermion) {
    if (n > fermion_mode_cap) {
      std::ostringstream os;
      os << "build_space: " << n << " fermionic modes exceed the cap of " << fermion_mode_cap;
      throw Error(os.str());
    }
    s.cap = 1;
    s.dim = std::int64_t{1} << n;
    return s;
  }
  if (boson_cap < 1) throw Error("build_space: boson cap must be at least 1");
  s.cap = boson_cap;
  double d = std::pow(static_cast<double>(boson_cap + 1), n);
  if (d > static_cast<double>(boson_dim_cap)) {
    std::ostringstream os;
    os << "build_space: bosonic dimension " << d << " exceeds the cap of " << boson_dim_cap;
    throw Error(os.str());
  }
  s.dim = 1;
  for (int i = 0; i < n; ++i) s.dim *= boson_cap + 1;
  return s;
}

RSpMat ladder(const FockSpace& space, int mode, LadderKind kind) {
  if (mode < 0 || mode >= space.n) throw Error("ladder: mode out of range");
  std::vector<Eigen::Triplet<double>> trip;
  std::int64_t stride = 1;
  for (int i = 0; i < mode; ++i) stride *= space.radix();
  for (std::int64_t s = 0; s < space.dim; ++s) {
    const auto occ = space.occupations(s);
    const int ni = occ[mode];
    double amp = 0;
    std::int64_t t = 0;
    if (kind == LadderKind::Create) {
      if (ni >= space.cap) continue;
      t = s + stride;
      amp = space.fermionic() ? 1.0 : std::sqrt(ni + 1.0);
    } else {
      if (ni == 0) continue;
      t = s - stride;
      amp = space.fermionic() ? 1.0 : std::sqrt(static_cast<double>(ni));
    }
    if (space.fermionic()) {
      int below = 0;
      for (int i = 0; i < mode; ++i) below += occ[i];
      if (below & 1) amp = -amp;
    }
    trip.emplace_back(static_cast<int>(t), static_cast<int>(s), amp);
  }
  RSpMat m(space.dim, space.dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

RSpMat number_operator(const FockSpace& space) {
  RSpMat m(space.dim, space.dim);
  std::vector<Eigen::Triplet<double>> trip;
  for (std::int64_t s = 0; s < space.dim; ++s)
    trip.emplace_back(static_cast<int>(s), static_cast<int>(s), space.particle_number(s));
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

namespace {

void require_hermitian(const CMat& h, int n) {
  if (h.rows() != n || h.cols() != n) throw Error("one-body operator has the wrong size");
  if (hermiticity_error(h) > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
    throw Error("one-body operator is not Hermitian");
}

// Applies a_i^dagger a_j to an occupation vector in place; returns amplitude
// (0 when the result vanishes).
double hop(std::vector<int>& occ, int i, int j, bool fermi, int cap) {
  if (occ[j] == 0) return 0.0;
  double amp = 1.0;
  if (fermi) {
    int below = 0;
    for (int k = 0; k < j; ++k) below += occ[k];
    if (below & 1) amp = -amp;
    occ[j] = 0;
    if (occ[i] != 0) {
      occ[j] = 1;
      return 0.0;
    }
    below = 0;
    for (int k = 0; k < i; ++k) below += occ[k];
    if (below & 1) amp = -amp;
    occ[i] = 1;
    return amp;
  }
  amp *= std::sqrt(static_cast<double>(occ[j]));
  occ[j] -= 1;
  if (occ[i] >= cap) {
    occ[j] += 1;
    return 0.0;
  }
  amp *= std::sqrt(occ[i] + 1.0);
  occ[i] += 1;
  return amp;
}

}  // namespace

SpMat second_quantize_onebody(const FockSpace& space, const CMat& h) {
  require_hermitian(h, space.n);
  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::int64_t s = 0; s < space.dim; ++s) {
    const auto occ0 = space.occupations(s);
    for (int j = 0; j < space.n; ++j) {
      if (occ0[j] == 0) continue;
      for (int i = 0; i < space.n; ++i) {
        if (h(i, j) == cplx(0, 0)) continue;
        auto occ = occ0;
        const double amp = hop(occ, i, j, space.fermionic(), space.cap);
        if (amp == 0.0) continue;
        trip.emplace_back(static_cast<int>(space.index_of(occ)), static_cast<int>(s), h(i, j) * amp);
      }
    }
  }
  SpMat m(space.dim, space.dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

namespace {

template <class Occ>
double pair_energy(const Occ& occ, const RMat& w) {
  const int n = static_cast<int>(w.rows());
  double e = 0;
  for (int i = 0; i < n; ++i) {
    if (occ[i] == 0) continue;
    e += 0.5 * w(i, i) * occ[i] * (occ[i] - 1.0);
    for (int j = i + 1; j < n; ++j)
      if (occ[j] != 0) e += w(i, j) * occ[i] * occ[j];
  }
  return e;
}

void require_symmetric(const RMat& w, int n) {
  if (w.rows() != n || w.cols() != n) throw Error("pair potential has the wrong size");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff()))
    throw Error("pair potential is not symmetric");
}

}  // namespace

RSpMat second_quantize_twobody(const FockSpace& space, const RMat& w) {
  require_symmetric(w, space.n);
  std::vector<Eigen::Triplet<double>> trip;
  for (std::int64_t s = 0; s < space.dim; ++s) {
    const double e = pair_energy(space.occupations(s), w);
    if (e != 0.0) trip.emplace_back(static_cast<int>(s), static_cast<int>(s), e);
  }
  RSpMat m(space.dim, space.dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// ------------------------------------------------------------- SectorBasis

namespace {

std::string occ_key(const std::vector<std::uint8_t>& occ) {
  return std::string(occ.begin(), occ.end());
}

void enumerate(int mode, int left, int cap, std::vector<std::uint8_t>& cur,
               std::vector<std::vector<std::uint8_t>>& out) {
  if (mode < 0) {
    if (left == 0) out.push_back(cur);
    return;
  }
  // Remaining capacity below this mode bounds the choice here.
  const int below = mode * cap;
  for (int k = std::max(0, left - below); k <= std::min(cap, left); ++k) {
    cur[mode] = static_cast<std::uint8_t>(k);
    enumerate(mode - 1, left - k, cap, cur, out);
  }
  cur[mode] = 0;
}

}  // namespace

SectorBasis::SectorBasis(int n, Statistics stats, int cap, int N)
    : n_(n), N_(N), cap_(stats == Statistics::Fermion ? 1 : cap), stats_(stats) {
  if (n < 1 || N < 0) throw Error("sector basis: invalid size");
  if (cap_ > 255) throw Error("sector basis: cap too large");
  std::vector<std::uint8_t> cur(n, 0);
  enumerate(n - 1, N, cap_, cur, states_);
  lookup_.reserve(states_.size() * 2);
  for (std::size_t k = 0; k < states_.size(); ++k)
    lookup_.emplace(occ_key(states_[k]), static_cast<long>(k));
}

long SectorBasis::find(const std::vector<std::uint8_t>& occ) const {
  auto it = lookup_.find(occ_key(occ));
  return it == lookup_.end() ? -1 : it->second;
}

double sector_dimension(int n, Statistics stats, int cap, int N) {
  const int c = stats == Statistics::Fermion ? 1 : cap;
  if (N < 0 || N > n * c) return 0.0;
  std::vector<double> ways(N + 1, 0.0);
  ways[0] = 1.0;
  for (int m = 0; m < n; ++m) {
    std::vector<double> next(N + 1, 0.0);
    for (int s = 0; s <= N; ++s)
      for (int k = 0; k <= c && s + k <= N; ++k) next[s + k] += ways[s];
    ways.swap(next);
  }
  return ways[N];
}

SpMat sector_onebody(const SectorBasis& basis, const CMat& h) {
  const int n = basis.modes();
  require_hermitian(h, n);
  const bool fermi = basis.stats() == Statistics::Fermion;
  std::vector<Eigen::Triplet<cplx>> trip;
  std::vector<int> occ(n);
  std::vector<std::uint8_t> key(n);
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const auto& o = basis.occupation(s);
    for (int j = 0; j < n; ++j) {
      if (o[j] == 0) continue;
      for (int i = 0; i < n; ++i) {
        if (h(i, j) == cplx(0, 0)) continue;
        for (int k = 0; k < n; ++k) occ[k] = o[k];
        const double amp = hop(occ, i, j, fermi, basis.cap());
        if (amp == 0.0) continue;
        for (int k = 0; k < n; ++k) key[k] = static_cast<std::uint8_t>(occ[k]);
        const long t = basis.find(key);
        trip.emplace_back(static_cast<int>(t), static_cast<int>(s), h(i, j) * amp);
      }
    }
  }
  SpMat m(basis.size(), basis.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

RVec sector_pair_diagonal(const SectorBasis& basis, const RMat& w) {
  require_symmetric(w, basis.modes());
  RVec d(basis.size());
  for (std::size_t s = 0; s < basis.size(); ++s) d(s) = pair_energy(basis.occupation(s), w);
  return d;
}

// --------------------------------------------------------------- FockState

bool FockState::commutes_with_number(double tol) const {
  for (std::int64_t i = 0; i < matrix.rows(); ++i)
    for (std::int64_t j = 0; j < matrix.cols(); ++j)
      if (std::abs(matrix(i, j)) > tol && space.particle_number(i) != space.particle_number(j))
        return false;
  return true;
}

void FockState::validate(double tol) const {
  if (matrix.rows() != space.dim || matrix.cols() != space.dim)
    throw Error("state: matrix size does not match the Fock space");
  const double tr = matrix.trace().real();
  if (std::abs(tr - 1.0) > tol) throw Error("state: trace differs from 1");
  if (hermiticity_error(matrix) > tol) throw Error("state: matrix is not Hermitian");
  const RVec ev = eigvalsh(0.5 * (matrix + matrix.adjoint()));
  if (ev.size() > 0 && ev(0) < -tol) throw Error("state: matrix is not positive");
  if (number_conserving && !commutes_with_number(tol))
    throw Error("state: flagged number-conserving but mixes sectors");
}

FockState make_state(const FockSpace& space, const CMat& matrix) {
  FockState g{space, matrix, true};
  g.number_conserving = g.commutes_with_number(1e-12);
  g.validate();
  return g;
}

FockState pure_state(const FockSpace& space, const CVec& psi) {
  const CVec v = psi / psi.norm();
  return make_state(space, v * v.adjoint());
}

double entropy(const CMat& g) {
  return entropy_from_eigenvalues(eigvalsh(0.5 * (g + g.adjoint())));
}

double entropy(const FockState& g) { return entropy(g.matrix); }

namespace {

// tr(G M) for sparse M.
cplx trace_product(const CMat& g, const RSpMat& m) {
  cplx s = 0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (RSpMat::InnerIterator it(m, k); it; ++it) s += g(it.col(), it.row()) * it.value();
  return s;
}

}  // namespace

CMat reduced_density(const FockSpace& space, const CMat& g, int k) {
  const int n = space.n;
  std::vector<RSpMat> ann(n), cre(n);
  for (int i = 0; i < n; ++i) {
    ann[i] = ladder(space, i, LadderKind::Annihilate);
    cre[i] = ladder(space, i, LadderKind::Create);
  }
  if (k == 1) {
    CMat gam(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gam(i, j) = trace_product(g, RSpMat(cre[j] * ann[i]));
    return gam;
  }
  if (k == 2) {
    CMat gam = CMat::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const RSpMat aa = ann[i] * ann[j];
        if (aa.nonZeros() == 0) continue;
        for (int kk = 0; kk < n; ++kk)
          for (int l = 0; l < n; ++l) {
            const RSpMat op = cre[l] * cre[kk] * aa;
            gam(i * n + j, kk * n + l) = trace_product(g, op);
          }
      }
    return gam;
  }
  throw Error("reduced_density: only k = 1 and k = 2 are supported");
}

CMat reduced_density(const FockState& g, int k) { return reduced_density(g.space, g.matrix, k); }

RSpMat split_isomorphism(const FockSpace& space, const std::vector<int>& first) {
  std::vector<char> in1(space.n, 0);
  for (int m : first) {
    if (m < 0 || m >= space.n || in1[m]) throw Error("split_isomorphism: invalid mode subset");
    in1[m] = 1;
  }
  std::vector<int> m1, m2;
  for (int i = 0; i < space.n; ++i) (in1[i] ? m1 : m2).push_back(i);
  std::int64_t d2 = 1;
  for (std::size_t i = 0; i < m2.size(); ++i) d2 *= space.radix();
  std::vector<Eigen::Triplet<double>> trip;
  for (std::int64_t s = 0; s < space.dim; ++s) {
    const auto occ = space.occupations(s);
    std::int64_t i1 = 0, i2 = 0, p = 1;
    for (int m : m1) {
      i1 += occ[m] * p;
      p *= space.radix();
    }
    p = 1;
    for (int m : m2) {
      i2 += occ[m] * p;
      p *= space.radix();
    }
    double sign = 1.0;
    if (space.fermionic()) {
      // Moving every H_1 creator left past the H_2 creators with lower index.
      int inv = 0, seen2 = 0;
      for (int i = 0; i < space.n; ++i) {
        if (!occ[i]) continue;
        if (in1[i])
          inv += seen2;
        else
          ++seen2;
      }
      if (inv & 1) sign = -1.0;
    }
    trip.emplace_back(static_cast<int>(i1 * d2 + i2), static_cast<int>(s), sign);
  }
  RSpMat u(space.dim, space.dim);
  u.setFromTriplets(trip.begin(), trip.end());
  return u;
}

CMat partial_trace(const CMat& m, std::int64_t d1, std::int64_t d2, int keep) {
  if (m.rows() != d1 * d2 || m.cols() != d1 * d2) throw Error("partial_trace: size mismatch");
  if (keep == 1) {
    CMat r = CMat::Zero(d1, d1);
    for (std::int64_t a = 0; a < d1; ++a)
      for (std::int64_t b = 0; b < d1; ++b)
        for (std::int64_t c = 0; c < d2; ++c) r(a, b) += m(a * d2 + c, b * d2 + c);
    return r;
  }
  CMat r = CMat::Zero(d2, d2);
  for (std::int64_t a = 0; a < d2; ++a)
    for (std::int64_t b = 0; b < d2; ++b)
      for (std::int64_t c = 0; c < d1; ++c) r(a, b) += m(c * d2 + a, c * d2 + b);
  return r;
}

}  // namespace coulab
