// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include "coulab/localization.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "coulab/linalg.hpp"
#include "coulab/rng.hpp"

namespace coulab {

namespace {

constexpr std::int64_t kDoubledDimCap = std::int64_t{1} << 18;

SpMat kron(const SpMat& a, const SpMat& b) {
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SpMat::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SpMat::InnerIterator ib(b, kb); ib; ++ib)
          trip.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                            ia.value() * ib.value());
  SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SpMat identity(std::int64_t d) {
  SpMat i(d, d);
  i.setIdentity();
  return i;
}

SpMat parity(const FockSpace& space) {
  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::int64_t b = 0; b < space.dim; ++b)
    trip.emplace_back(b, b, space.particle_number(b) % 2 ? -1.0 : 1.0);
  SpMat p(space.dim, space.dim);
  p.setFromTriplets(trip.begin(), trip.end());
  return p;
}

std::vector<int> union_of(std::initializer_list<const std::vector<int>*> parts) {
  std::vector<int> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  std::sort(out.begin(), out.end());
  return out;
}

void require_disjoint(const std::vector<int>& a, const std::vector<int>& b,
                      const std::vector<int>& c) {
  std::set<int> seen;
  for (const auto* p : {&a, &b, &c})
    for (int i : *p)
      if (!seen.insert(i).second) throw Error("ssa: index sets must be disjoint");
}

std::string subsets_label(const std::vector<int>& a, const std::vector<int>& b,
                          const std::vector<int>& c) {
  std::ostringstream os;
  auto put = [&](const std::vector<int>& v) {
    os << "{";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "}";
  };
  put(a);
  os << " ";
  put(b);
  os << " ";
  put(c);
  return os.str();
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Sorted K-subsets of {0, ..., n-1}.
void for_each_tuple(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> t(k);
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == k) {
      fn(t);
      return;
    }
    for (int i = start; i < n; ++i) {
      t[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
}

}  // namespace

CMat complement_weight(const CMat& q) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (q + q.adjoint()));
  const RVec ev = es.eigenvalues();
  if (ev.size() && (ev.minCoeff() < -1e-12 || ev.maxCoeff() > 1.0 + 1e-12))
    throw Error("localization weight must satisfy 0 <= q <= 1");
  const RVec r = ev.unaryExpr([](double l) { return std::sqrt(std::max(0.0, 1.0 - l * l)); });
  return es.eigenvectors() * r.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

SpMat doubled_creation(const FockSpace& space, int mode, bool second) {
  const SpMat a = ladder(space, mode, LadderKind::Create).cast<cplx>();
  if (!second) return kron(a, identity(space.dim));
  return kron(space.fermionic() ? parity(space) : identity(space.dim), a);
}

SpMat creation(const FockSpace& space, const CVec& f) {
  SpMat out(space.dim, space.dim);
  for (int j = 0; j < space.n; ++j)
    if (f(j) != cplx(0)) out += f(j) * ladder(space, j, LadderKind::Create).cast<cplx>();
  return out;
}

SpMat localization_isometry(const FockSpace& space, const CMat& q) {
  const int n = space.n;
  if (q.rows() != n || q.cols() != n) throw Error("localization_isometry: q has wrong size");
  if (space.dim > kDoubledDimCap / space.dim)
    throw Error("localization_isometry: dimension overflow");
  const CMat r = complement_weight(q);
  const std::int64_t d2 = space.dim * space.dim;

  std::vector<SpMat> cd(n), dd(n);
  for (int j = 0; j < n; ++j) {
    cd[j] = doubled_creation(space, j, false);
    dd[j] = doubled_creation(space, j, true);
  }
  // op_i = c^dagger(q e_i) + d^dagger(r e_i)
  std::vector<SpMat> op(n, SpMat(d2, d2));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (std::abs(q(j, i)) > 0) op[i] += q(j, i) * cd[j];
      if (std::abs(r(j, i)) > 0) op[i] += r(j, i) * dd[j];
    }

  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::int64_t b = 0; b < space.dim; ++b) {
    CVec v = CVec::Zero(d2);
    v(0) = 1.0;
    const auto occ = space.occupations(b);
    for (int i = n - 1; i >= 0; --i) {
      for (int k = 0; k < occ[i]; ++k) v = op[i] * v;
      if (occ[i] > 1) v /= std::sqrt(factorial(occ[i]));
    }
    for (std::int64_t k = 0; k < d2; ++k)
      if (std::abs(v(k)) > 1e-15) trip.emplace_back(k, b, v(k));
  }
  SpMat u(d2, space.dim);
  u.setFromTriplets(trip.begin(), trip.end());
  return u;
}

CMat localize_state(const FockSpace& space, const CMat& gamma, const SpMat& isometry) {
  const std::int64_t d = space.dim;
  if (gamma.rows() != d || isometry.rows() != d * d) throw Error("localize_state: size mismatch");
  // Gamma_q = sum_c U_c Gamma U_c^*, U_c(a, k) = U(a d + c, k)
  std::vector<std::vector<Eigen::Triplet<cplx>>> parts(d);
  for (int k = 0; k < isometry.outerSize(); ++k)
    for (SpMat::InnerIterator it(isometry, k); it; ++it)
      parts[it.row() % d].emplace_back(it.row() / d, it.col(), it.value());
  CMat out = CMat::Zero(d, d);
  for (std::int64_t c = 0; c < d; ++c) {
    if (parts[c].empty()) continue;
    SpMat uc(d, d);
    uc.setFromTriplets(parts[c].begin(), parts[c].end());
    const CMat tmp = uc * gamma;
    out += tmp * CMat(uc.adjoint());
  }
  return 0.5 * (out + out.adjoint());
}

CMat localize_state(const FockSpace& space, const CMat& gamma, const CMat& q) {
  return localize_state(space, gamma, localization_isometry(space, q));
}

CMat family_weight(const std::vector<CMat>& weights, const std::vector<int>& subset) {
  if (weights.empty()) throw Error("family_weight: empty family");
  const auto n = weights[0].rows();
  CMat total = CMat::Zero(n, n);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i] * weights[i];
    for (std::size_t j = i + 1; j < weights.size(); ++j)
      if ((weights[i] * weights[j] - weights[j] * weights[i]).cwiseAbs().maxCoeff() > 1e-10)
        throw Error("family_weight: weights do not commute");
  }
  if ((total - CMat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
    throw Error("family_weight: sum of squares is not the identity");
  CMat s = CMat::Zero(n, n);
  for (int i : subset) {
    if (i < 0 || i >= static_cast<int>(weights.size()))
      throw Error("family_weight: index out of range");
    s += weights[i] * weights[i];
  }
  if (subset.empty()) return s;
  return hermitian_function(0.5 * (s + s.adjoint()),
                            [](double l) { return std::sqrt(std::max(0.0, l)); });
}

std::vector<CMat> diagonal_weights(const std::vector<RVec>& thetas) {
  std::vector<CMat> out;
  for (const auto& t : thetas) out.push_back(t.cast<cplx>().asDiagonal());
  return out;
}

Report ssa_gap(const FockSpace& space, const CMat& gamma, const std::vector<CMat>& weights,
               const std::vector<int>& p1, const std::vector<int>& p2,
               const std::vector<int>& p3) {
  require_disjoint(p1, p2, p3);
  auto s = [&](const std::vector<int>& p) {
    return entropy(localize_state(space, gamma, family_weight(weights, p)));
  };
  const double s12 = s(union_of({&p1, &p2}));
  const double s23 = s(union_of({&p2, &p3}));
  const double s2 = s(p2);
  const double s123 = s(union_of({&p1, &p2, &p3}));
  Report r = make_report("ssa_quantum", s12 + s23, s2 + s123, 1e-9);
  r.config = "n=" + std::to_string(space.n) + " " + subsets_label(p1, p2, p3);
  return r;
}

std::vector<RVec> random_smooth_partition(int n, int parts, Rng& rng) {
  if (parts < 1) throw Error("random_smooth_partition: need at least one part");
  std::vector<RVec> f(parts, RVec(n));
  for (int p = 0; p < parts; ++p) {
    const double amp = rng.uniform(0.5, 2.0), phase = rng.uniform(0, 2 * kPi);
    const double center = rng.uniform(0, n);
    for (int x = 0; x < n; ++x)
      f[p](x) = std::exp(amp * std::cos(2 * kPi * (x - center) / n + phase));
  }
  RVec total = RVec::Zero(n);
  for (const auto& v : f) total += v;
  for (auto& v : f) v = (v.array() / total.array()).sqrt();
  return f;
}

CMat quasi_free_state(const FockSpace& space, const CMat& gamma1) {
  if (!space.fermionic()) throw Error("quasi_free_state: fermions only");
  Eigen::SelfAdjointEigenSolver<CMat> es(gamma1);
  if (es.eigenvalues().minCoeff() <= 0 || es.eigenvalues().maxCoeff() >= 1)
    throw Error("quasi_free_state: need 0 < gamma < 1");
  const CMat h = hermitian_function(gamma1, [](double g) { return std::log((1 - g) / g); });
  const CMat big = CMat(second_quantize_onebody(space, h));
  CMat g = hermitian_function(big, [](double e) { return std::exp(-e); });
  g /= g.trace().real();
  return g;
}

double wick_error(const FockSpace& space, const CMat& g) {
  const CMat g1 = reduced_density(space, g, 1);
  const CMat g2 = reduced_density(space, g, 2);
  const int n = space.n;
  double err = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const cplx w = g1(j, l) * g1(i, k) - g1(i, l) * g1(j, k);
          err = std::max(err, std::abs(g2(i * n + j, k * n + l) - w));
        }
  return err;
}

// ------------------------------------------------------------------- cq

double CQState::norm() const {
  double s = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k)
    for (const auto& [x, m] : rho[k]) s += std::pow(h, static_cast<double>(k)) * m.trace().real();
  return s;
}

void CQState::validate(double tol) const {
  if (rho.empty()) throw Error("cq state: no K = 0 component");
  for (std::size_t k = 0; k < rho.size(); ++k)
    for (const auto& [x, m] : rho[k]) {
      if (x.size() != k) throw Error("cq state: tuple size differs from K");
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0 || x[i] >= points) throw Error("cq state: point out of range");
        if (i && x[i] <= x[i - 1]) throw Error("cq state: tuples must be sorted and distinct");
      }
      if (m.rows() != space.dim) throw Error("cq state: operator size mismatch");
      if (hermiticity_error(m) > tol) throw Error("cq state: operator not hermitian");
      if (eigvalsh(0.5 * (m + m.adjoint())).minCoeff() < -tol)
        throw Error("cq state: operator not positive");
    }
  if (std::abs(norm() - 1.0) > tol) throw Error("cq state: not normalized");
}

double cq_entropy(const CQState& rho) {
  double s = 0.0;
  for (std::size_t k = 0; k < rho.rho.size(); ++k)
    for (const auto& [x, m] : rho.rho[k])
      s += std::pow(rho.h, static_cast<double>(k)) * entropy(m);
  return s;
}

CQState cq_localize(const CQState& rho, const CMat& q, const RVec& theta) {
  if (theta.size() != rho.points) throw Error("cq_localize: theta has wrong size");
  if (theta.size() && (theta.minCoeff() < -1e-12 || theta.maxCoeff() > 1 + 1e-12))
    throw Error("cq_localize: theta must lie in [0, 1]");
  const SpMat u = localization_isometry(rho.space, q);
  CQState out;
  out.space = rho.space;
  out.points = rho.points;
  out.h = rho.h;
  out.warning = rho.warning;
  out.rho.resize(rho.rho.size());
  for (std::size_t k = 0; k < rho.rho.size(); ++k)
    for (const auto& [z, m] : rho.rho[k]) {
      const CMat loc = localize_state(rho.space, m, u);
      // every sub-tuple X of Z keeps prod theta^2, the rest is absorbed
      for (unsigned mask = 0; mask < (1u << k); ++mask) {
        std::vector<int> x;
        double w = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
          const double t2 = theta(z[i]) * theta(z[i]);
          if (mask & (1u << i)) {
            x.push_back(z[i]);
            w *= t2;
          } else {
            w *= std::max(0.0, 1.0 - t2) * rho.h;
          }
        }
        auto& slot = out.rho[x.size()][x];
        if (slot.size() == 0) slot = CMat::Zero(rho.space.dim, rho.space.dim);
        if (w != 0.0) slot += w * loc;
      }
    }
  return out;
}

Report cq_ssa_gap(const CQState& rho, const std::vector<CMat>& q_family,
                  const std::vector<RVec>& theta_family, const std::vector<int>& p1,
                  const std::vector<int>& p2, const std::vector<int>& p3) {
  require_disjoint(p1, p2, p3);
  if (theta_family.size() != q_family.size())
    throw Error("cq_ssa_gap: q and theta families differ in size");
  RVec total = RVec::Zero(rho.points);
  for (const auto& t : theta_family) total += t.cwiseAbs2();
  if (rho.points && (total.array() - 1.0).abs().maxCoeff() > 1e-10)
    throw Error("cq_ssa_gap: theta family is not a partition of unity");
  auto s = [&](const std::vector<int>& p) {
    RVec t2 = RVec::Zero(rho.points);
    for (int i : p) t2 += theta_family[i].cwiseAbs2();
    const CMat q = p.empty() ? CMat::Zero(rho.space.n, rho.space.n) : family_weight(q_family, p);
    return cq_entropy(cq_localize(rho, q, t2.cwiseSqrt()));
  };
  const double s12 = s(union_of({&p1, &p2}));
  const double s23 = s(union_of({&p2, &p3}));
  const double s2 = s(p2);
  const double s123 = s(union_of({&p1, &p2, &p3}));
  Report r = make_report("ssa_cq", s12 + s23, s2 + s123, 1e-9);
  r.config = "points=" + std::to_string(rho.points) + " K<=" + std::to_string(rho.k_max()) +
             " " + subsets_label(p1, p2, p3);
  return r;
}

CQState random_cq_state(const FockSpace& space, int points, int k_max, Rng& rng) {
  if (k_max < 0 || k_max > points) throw Error("random_cq_state: bad k_max");
  CQState s;
  s.space = space;
  s.points = points;
  s.h = 1.0;
  s.rho.resize(k_max + 1);
  const int d = static_cast<int>(space.dim);
  for (int k = 0; k <= k_max; ++k)
    for_each_tuple(points, k, [&](const std::vector<int>& x) {
      s.rho[k][x] = rng.uniform(0.2, 1.0) * random_density(d, rng);
    });
  const double z = s.norm();
  for (auto& level : s.rho)
    for (auto& [x, m] : level) m /= z;
  return s;
}

CMat QuantizedCQ::dense() const {
  if (blocks.empty()) return CMat();
  const auto d = blocks[0].rows();
  CMat out = CMat::Zero(d * blocks.size(), d * blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) out.block(b * d, b * d, d, d) = blocks[b];
  return out;
}

QuantizedCQ quantize_cq(const CQState& rho) {
  QuantizedCQ out;
  out.grid_points = rho.points;
  double t = 0.0;
  for (std::size_t k = 0; k < rho.rho.size(); ++k)
    for (const auto& [x, m] : rho.rho[k]) {
      const double w = std::pow(rho.h, static_cast<double>(k));
      t += w * m.trace().real();
      out.occupations.push_back(x);
      out.blocks.push_back(w * m);
    }
  if (!(t > 0)) throw Error("quantize_cq: zero state");
  out.t = t;
  double mean_k = 0.0, s = 0.0;
  for (std::size_t b = 0; b < out.blocks.size(); ++b) {
    out.blocks[b] /= t;
    mean_k += out.occupations[b].size() * out.blocks[b].trace().real();
    s += entropy(out.blocks[b]);
  }
  out.mean_k = mean_k;
  out.entropy = s;
  out.corrected_entropy = s + mean_k * std::log(rho.h) - std::log(t);
  return out;
}

// -------------------------------------------------------------- fixture

namespace {

struct FixtureData {
  CMat sigma0;
  CMat gen;  // hermitian generator of the x-dependence
  RVec lambda;
  double g2_norm = 0.0;
};

FixtureData fixture_data(const SmoothCQFixture& f) {
  Rng rng(f.seed);
  const int d = 1 << f.quantum_modes;
  FixtureData fd;
  fd.sigma0 = random_density(d, rng);
  CMat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(rng.normal(), rng.normal());
  fd.gen = 0.5 * (a + a.adjoint());
  fd.lambda = RVec(d);
  for (int i = 0; i < d; ++i) fd.lambda(i) = rng.uniform(0.1, 1.0);
  fd.lambda /= fd.lambda.sum();
  // exact for the trigonometric polynomial below
  const int m = 16;
  const double L = f.cells;
  double s = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double x = (i + 0.5) * L / m, y = (j + 0.5) * L / m;
      const double sx = std::sin(kPi * x / L), sy = std::sin(kPi * y / L),
                   sd = std::sin(kPi * (x - y) / L);
      s += sd * sd * (0.2 + sx * sx) * (0.2 + sy * sy);
    }
  fd.g2_norm = s * (L / m) * (L / m);
  return fd;
}

double weight_of(int k, int k_max) {
  static const double w1[] = {0.4, 0.6};
  static const double w2[] = {0.3, 0.5, 0.2};
  if (k_max == 0) return 1.0;
  return k_max == 1 ? w1[k] : w2[k];
}

}  // namespace

namespace {

CMat fixture_density(const SmoothCQFixture& f, const FixtureData& fd,
                     const Eigen::SelfAdjointEigenSolver<CMat>& es,
                     const std::vector<double>& xs) {
  const int k = static_cast<int>(xs.size());
  if (k > f.k_max) throw Error("cq fixture: K above k_max");
  const double L = f.cells;
  const double p = weight_of(k, f.k_max);
  // sigma(x) = V(x) diag(lambda) V(x)^*, V(x) = exp(2 pi i x gen / L)
  auto sigma = [&](double x) {
    const CVec ph = (es.eigenvalues() * (2 * kPi * x / L))
                        .unaryExpr([](double t) { return std::exp(cplx(0, t)); })
                        .eval();
    const CMat v = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    return CMat(v * fd.lambda.cast<cplx>().asDiagonal() * v.adjoint());
  };
  if (k == 0) return p * fd.sigma0;
  if (k == 1) {
    const double s = std::sin(kPi * xs[0] / L);
    return p * (0.2 + s * s) / (0.7 * L) * sigma(xs[0]);
  }
  const double sx = std::sin(kPi * xs[0] / L), sy = std::sin(kPi * xs[1] / L),
               sd = std::sin(kPi * (xs[0] - xs[1]) / L);
  const double g = 2.0 * sd * sd * (0.2 + sx * sx) * (0.2 + sy * sy) / fd.g2_norm;
  return p * g * 0.5 * (sigma(xs[0]) + sigma(xs[1]));
}

}  // namespace

CMat SmoothCQFixture::density(const std::vector<double>& xs) const {
  if (k_max < 0 || k_max > 2) throw Error("cq fixture: k_max must be 0, 1 or 2");
  const FixtureData fd = fixture_data(*this);
  Eigen::SelfAdjointEigenSolver<CMat> es(fd.gen);
  return fixture_density(*this, fd, es, xs);
}

CQState SmoothCQFixture::discretize(int m) const {
  if (m < 1) throw Error("cq fixture: need at least one point per cell");
  if (k_max < 0 || k_max > 2) throw Error("cq fixture: k_max must be 0, 1 or 2");
  const FixtureData fd = fixture_data(*this);
  Eigen::SelfAdjointEigenSolver<CMat> es(fd.gen);
  CQState s;
  s.space = build_space(quantum_modes, Statistics::Fermion);
  s.points = cells * m;
  s.h = 1.0 / m;
  s.rho.resize(k_max + 1);
  for (int k = 0; k <= k_max; ++k)
    for_each_tuple(s.points, k, [&](const std::vector<int>& x) {
      std::vector<double> xs;
      for (int i : x) xs.push_back((i + 0.5) * s.h);
      s.rho[k][x] = fixture_density(*this, fd, es, xs);
    });
  return s;
}

}  // namespace coulab
