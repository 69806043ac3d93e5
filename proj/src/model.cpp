// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include "coulab/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "coulab/rng.hpp"

namespace coulab {

// ----------------------------------------------------------------- nuclei

double NucleiConfig::min_separation() const {
  double d = kInf;
  for (std::size_t i = 0; i < nuclei.size(); ++i)
    for (std::size_t j = i + 1; j < nuclei.size(); ++j)
      d = std::min(d, (nuclei[i].R - nuclei[j].R).norm());
  return d;
}

double NucleiConfig::repulsion() const {
  double e = 0;
  for (std::size_t i = 0; i < nuclei.size(); ++i)
    for (std::size_t j = i + 1; j < nuclei.size(); ++j) {
      const double zz = nuclei[i].z * nuclei[j].z;
      if (zz == 0.0) continue;
      const double r = (nuclei[i].R - nuclei[j].R).norm();
      if (r == 0.0) return kInf;
      e += zz / r;
    }
  return e;
}

double NucleiConfig::total_charge() const {
  double s = 0;
  for (const auto& n : nuclei) s += n.z;
  return s;
}

NucleiConfig perturbed_lattice(const LatticeSpec& spec, const Vec3& lo, const Vec3& hi) {
  if (spec.cell.empty() && spec.added.empty()) throw Error("perturbed_lattice: empty lattice");
  const Mat3 inv = spec.basis.inverse();
  if (!inv.allFinite()) throw Error("perturbed_lattice: singular basis");
  // Cell index range covering the window, padded for cell offsets.
  Vec3 kmin = Vec3::Constant(kInf), kmax = Vec3::Constant(-kInf);
  for (int c = 0; c < 8; ++c) {
    Vec3 corner((c & 1) ? hi(0) : lo(0), (c & 2) ? hi(1) : lo(1), (c & 4) ? hi(2) : lo(2));
    Vec3 k = inv * (corner - spec.origin);
    kmin = kmin.cwiseMin(k);
    kmax = kmax.cwiseMax(k);
  }
  NucleiConfig out;
  out.label = "lattice";
  auto in_window = [&](const Vec3& r) {
    for (int ax = 0; ax < 3; ++ax)
      if (r(ax) < lo(ax) || r(ax) >= hi(ax)) return false;
    return true;
  };
  for (int i = static_cast<int>(std::floor(kmin(0))) - 2; i <= static_cast<int>(std::ceil(kmax(0))) + 2; ++i)
    for (int j = static_cast<int>(std::floor(kmin(1))) - 2; j <= static_cast<int>(std::ceil(kmax(1))) + 2; ++j)
      for (int k = static_cast<int>(std::floor(kmin(2))) - 2; k <= static_cast<int>(std::ceil(kmax(2))) + 2; ++k)
        for (std::size_t a = 0; a < spec.cell.size(); ++a) {
          const Site cell{i, j, k};
          const bool gone = std::any_of(spec.removed.begin(), spec.removed.end(), [&](const auto& r) {
            return r.first == cell && r.second == static_cast<int>(a);
          });
          if (gone) continue;
          Nucleus n = spec.cell[a];
          n.R += spec.origin + spec.basis * Vec3(i, j, k);
          for (const auto& d : spec.deformations)
            if (d.cell == cell && d.atom == static_cast<int>(a)) {
              n.R += d.dR;
              n.z += d.dz;
            }
          if (n.z < 0) throw Error("perturbed_lattice: deformation produced a negative charge");
          if (in_window(n.R)) out.nuclei.push_back(n);
        }
  for (const auto& n : spec.added)
    if (in_window(n.R)) out.nuclei.push_back(n);
  for (std::size_t i = 0; i < out.nuclei.size(); ++i)
    for (std::size_t j = i + 1; j < out.nuclei.size(); ++j) {
      const double d = (out.nuclei[i].R - out.nuclei[j].R).norm();
      if (d == 0.0 || d < spec.min_separation) {
        std::ostringstream os;
        os << "perturbed_lattice: minimum separation violated (hyp_D3): distance " << d
           << " < " << spec.min_separation;
        throw Error(os.str());
      }
    }
  return out;
}

void check_regularization(const Domain& omega, const NucleiConfig& k) {
  const double a = omega.spacing();
  for (const auto& n : k.nuclei) {
    const int idx = omega.locate(n.R);
    if (idx >= 0 && (omega.position(idx) - n.R).norm() < a / 10.0)
      throw Error("regularization violated: nucleus within a/10 of a grid site");
  }
}

// --------------------------------------------------------- magnetic field

Vec3 MagneticField::potential(const Vec3& x) const {
  switch (kind) {
    case Kind::None:
      return Vec3::Zero();
    case Kind::Uniform:
      return 0.5 * B.cross(x);
    case Kind::Periodic: {
      const double k = 2 * kPi / period;
      return amplitude * Vec3(std::sin(k * x(1)), std::sin(k * x(2)), std::sin(k * x(0)));
    }
    case Kind::Random: {
      Vec3 a = Vec3::Zero();
      for (const auto& m : modes) a(m.component) += m.amp * std::sin(m.k.dot(x) + m.phase);
      return a;
    }
  }
  return Vec3::Zero();
}

Vec3 MagneticField::curl(const Vec3& x, double h) const {
  Mat3 d;  // d(i, j) = dA_j / dx_i
  for (int i = 0; i < 3; ++i) {
    const Vec3 e = Vec3::Unit(i) * h;
    d.row(i) = ((potential(x + e) - potential(x - e)) / (2 * h)).transpose();
  }
  return Vec3(d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0));
}

std::optional<Vec3> MagneticField::exact_field(const Vec3&) const {
  if (kind == Kind::None) return Vec3::Zero();
  if (kind == Kind::Uniform) return B;
  return std::nullopt;
}

MagneticField no_field() { return MagneticField{}; }

MagneticField uniform_field(const Vec3& B) {
  MagneticField f;
  f.kind = MagneticField::Kind::Uniform;
  f.B = B;
  return f;
}

MagneticField periodic_field(double amplitude, double period) {
  if (!(period > 0)) throw Error("periodic_field: period must be positive");
  MagneticField f;
  f.kind = MagneticField::Kind::Periodic;
  f.amplitude = amplitude;
  f.period = period;
  return f;
}

MagneticField random_bounded_field(std::uint64_t seed, double amplitude, int n_modes) {
  MagneticField f;
  f.kind = MagneticField::Kind::Random;
  f.amplitude = amplitude;
  Rng rng(seed);
  for (int c = 0; c < 3; ++c)
    for (int m = 0; m < n_modes; ++m) {
      Vec3 k(rng.normal(), rng.normal(), rng.normal());
      k(c) = 0;
      f.modes.push_back({c, 2.0 * k, amplitude * rng.uniform() / n_modes, 2 * kPi * rng.uniform()});
    }
  return f;
}

CMat kinetic_operator(const Domain& omega, const MagneticField& A, double lambda) {
  const int n = static_cast<int>(omega.size());
  const double a = omega.spacing();
  const double inv_a2 = 1.0 / (a * a);
  CMat t = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) t(i, i) = 2.0 * omega.dim() * inv_a2;
  for (int i = 0; i < n; ++i) {
    const Site& s = omega.site(i);
    for (int ax = 0; ax < omega.dim(); ++ax) {
      Site nb = s;
      nb[ax] += 1;
      const int j = omega.index_of(nb);
      if (j < 0) continue;
      const Vec3 x = omega.position(i), y = omega.position(j);
      const double phi = A.potential(0.5 * (x + y)).dot(y - x);
      const cplx hop = -std::polar(1.0, phi) * inv_a2;
      t(i, j) = hop;
      t(j, i) = std::conj(hop);
    }
  }
  return lambda * t;
}

double onsite_coulomb_alpha() {
  static const double alpha = [] {
    Rng rng(0xC0FFEEULL);
    const int n = 1000000;
    double s = 0;
    for (int i = 0; i < n; ++i) {
      Vec3 x(rng.uniform(), rng.uniform(), rng.uniform());
      Vec3 y(rng.uniform(), rng.uniform(), rng.uniform());
      const double r = (x - y).norm();
      if (r > 0) s += 1.0 / r;
    }
    return s / n;
  }();
  return alpha;
}

RMat coulomb_kernel(const Domain& omega) {
  const int n = static_cast<int>(omega.size());
  RMat w(n, n);
  const double onsite = onsite_coulomb_alpha() / omega.spacing();
  for (int i = 0; i < n; ++i) {
    w(i, i) = onsite;
    for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = 1.0 / (omega.position(i) - omega.position(j)).norm();
  }
  return w;
}

RVec nuclear_potential(const Domain& omega, const NucleiConfig& k) {
  check_regularization(omega, k);
  RVec v = RVec::Zero(static_cast<int>(omega.size()));
  for (std::size_t i = 0; i < omega.size(); ++i)
    for (const auto& n : k.nuclei)
      if (n.z != 0.0) v(i) -= n.z / (omega.position(i) - n.R).norm();
  return v;
}

// ------------------------------------------------------------ hamiltonian

int GrandHamiltonian::max_particles() const {
  return max_particles_override >= 0 ? max_particles_override : modes() * cap;
}

SectorBasis GrandHamiltonian::sector_basis(int N) const {
  return SectorBasis(modes(), stats, cap, N);
}

SpMat GrandHamiltonian::sector_matrix(const SectorBasis& basis) const {
  const RVec d = sector_pair_diagonal(basis, w);
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int i = 0; i < d.size(); ++i) trip.emplace_back(i, i, d(i) + constant);
  SpMat diag(d.size(), d.size());
  diag.setFromTriplets(trip.begin(), trip.end());
  return SpMat(sector_onebody(basis, h) + diag);
}

SpMat GrandHamiltonian::sector_matrix(int N) const { return sector_matrix(sector_basis(N)); }

FockSpace GrandHamiltonian::space() const { return build_space(modes(), stats, cap); }

SpMat GrandHamiltonian::full_matrix() const {
  const FockSpace sp = space();
  SpMat m = second_quantize_onebody(sp, h);
  m += second_quantize_twobody(sp, w).cast<cplx>();
  SpMat c(sp.dim, sp.dim);
  c.setIdentity();
  return SpMat(m + constant * c);
}

GrandHamiltonian coulomb_hamiltonian(const Domain& omega, const NucleiConfig& k,
                                     const MagneticField& A, double lambda) {
  GrandHamiltonian g;
  g.stats = Statistics::Fermion;
  g.cap = 1;
  g.h = kinetic_operator(omega, A, lambda);
  g.h.diagonal() += nuclear_potential(omega, k).cast<cplx>();
  g.w = coulomb_kernel(omega);
  g.constant = k.repulsion();
  return g;
}

EnergyResult ground_state_energy(const GrandHamiltonian& h, int n_max, double tol) {
  const int top = n_max < 0 ? h.max_particles() : std::min(n_max, h.max_particles());
  EnergyResult res;
  res.value = kInf;
  bool lanczos = false;
  for (int N = 0; N <= top; ++N) {
    const SectorBasis basis = h.sector_basis(N);
    if (basis.size() == 0) continue;
    const EigenPair ep = lowest_eigenpair(h.sector_matrix(basis), tol);
    lanczos = lanczos || ep.method == "lanczos";
    res.sector_minima.emplace_back(N, ep.value);
    res.max_residual = std::max(res.max_residual, ep.residual);
    if (ep.value < res.value) {
      res.value = ep.value;
      res.n_star = N;
      res.ground_vector = ep.vector;
    }
  }
  res.method = lanczos ? "lanczos" : "dense";
  return res;
}

namespace {

struct SectorSpectrum {
  int N;
  RVec values;
  CMat vectors;
};

std::vector<SectorSpectrum> all_spectra(const GrandHamiltonian& h, bool vectors) {
  std::vector<SectorSpectrum> out;
  for (int N = 0; N <= h.max_particles(); ++N) {
    const SectorBasis basis = h.sector_basis(N);
    if (basis.size() == 0) continue;
    if (basis.size() > 8192) throw Error("free_energy: sector dimension too large for exact spectra");
    const CMat m = CMat(h.sector_matrix(basis));
    Eigen::SelfAdjointEigenSolver<CMat> es(m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    out.push_back({N, es.eigenvalues(), vectors ? es.eigenvectors() : CMat()});
  }
  return out;
}

}  // namespace

double grand_log_partition(const GrandHamiltonian& h, double beta, double mu) {
  std::vector<double> xs;
  for (const auto& s : all_spectra(h, false))
    for (int k = 0; k < s.values.size(); ++k) xs.push_back(-beta * (s.values(k) - mu * s.N));
  return logsumexp(xs);
}

FreeEnergyResult free_energy(const GrandHamiltonian& h, double beta, double mu,
                             int gibbs_dim_limit) {
  if (!(beta > 0)) throw Error("free_energy: beta must be positive");
  const FockSpace sp = h.space();
  const bool want_gibbs = sp.dim <= gibbs_dim_limit;
  const auto spectra = all_spectra(h, want_gibbs);
  std::vector<double> xs;
  for (const auto& s : spectra)
    for (int k = 0; k < s.values.size(); ++k) xs.push_back(-beta * (s.values(k) - mu * s.N));
  FreeEnergyResult r;
  r.beta = beta;
  r.mu = {mu};
  r.log_z = logsumexp(xs);
  r.value = -r.log_z / beta;
  std::size_t idx = 0;
  for (const auto& s : spectra)
    for (int k = 0; k < s.values.size(); ++k) {
      const double p = std::exp(xs[idx++] - r.log_z);
      r.mean_n += p * s.N;
      r.mean_energy += p * s.values(k);
    }
  r.entropy = beta * (r.mean_energy - mu * r.mean_n - r.value);
  if (want_gibbs) {
    CMat g = CMat::Zero(sp.dim, sp.dim);
    for (const auto& s : spectra) {
      const SectorBasis basis = h.sector_basis(s.N);
      std::vector<std::int64_t> full(basis.size());
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const auto& o = basis.occupation(b);
        full[b] = sp.index_of(std::vector<int>(o.begin(), o.end()));
      }
      RVec p(s.values.size());
      for (int k = 0; k < p.size(); ++k) p(k) = std::exp(-beta * (s.values(k) - mu * s.N) - r.log_z);
      const CMat block = s.vectors * p.cast<cplx>().asDiagonal() * s.vectors.adjoint();
      for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j) g(full[i], full[j]) = block(i, j);
    }
    FockState st{sp, 0.5 * (g + g.adjoint()), true};
    r.gibbs = st;
  }
  return r;
}

double variational_free_energy(const GrandHamiltonian& h, double beta, double mu,
                               const CMat& g) {
  const FockSpace sp = h.space();
  const SpMat hm = h.full_matrix() - mu * number_operator(sp).cast<cplx>();
  cplx e = 0;
  for (int k = 0; k < hm.outerSize(); ++k)
    for (SpMat::InnerIterator it(hm, k); it; ++it) e += it.value() * g(it.col(), it.row());
  return e.real() - entropy(g) / beta;
}

// -------------------------------------------------------- Hartree-Fock

namespace {

RMat offdiag_kernel(const GrandHamiltonian& h) {
  RMat w = h.w;
  w.diagonal().setZero();
  return w;
}

CMat mean_field(const GrandHamiltonian& h, const RMat& w0, const CMat& gamma) {
  const RVec rho = gamma.diagonal().real();
  CMat f = h.h;
  f.diagonal() += (w0 * rho).cast<cplx>();
  f -= w0.cast<cplx>().cwiseProduct(gamma);
  return 0.5 * (f + f.adjoint());
}

CMat occupation_map(const CMat& f, double mu, std::optional<double> beta) {
  Eigen::SelfAdjointEigenSolver<CMat> es(f);
  RVec occ(es.eigenvalues().size());
  for (int i = 0; i < occ.size(); ++i) {
    const double e = es.eigenvalues()(i);
    if (beta) {
      const double x = *beta * (e - mu);
      occ(i) = x > 0 ? std::exp(-x) / (1 + std::exp(-x)) : 1.0 / (1 + std::exp(x));
    } else {
      occ(i) = e < mu ? 1.0 : 0.0;
    }
  }
  return es.eigenvectors() * occ.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fermionic_entropy(const CMat& gamma) {
  const RVec ev = eigvalsh(0.5 * (gamma + gamma.adjoint()));
  double s = 0;
  for (int i = 0; i < ev.size(); ++i) {
    const double p = std::clamp(ev(i), 0.0, 1.0);
    if (p > 1e-14) s -= p * std::log(p);
    if (1 - p > 1e-14) s -= (1 - p) * std::log(1 - p);
  }
  return s;
}

double hf_energy(const GrandHamiltonian& h, const CMat& gamma) {
  if (h.stats != Statistics::Fermion) throw Error("hf_energy: fermionic Hamiltonian required");
  const RMat w0 = offdiag_kernel(h);
  const RVec rho = gamma.diagonal().real();
  double e = (h.h.cwiseProduct(gamma.transpose())).sum().real();
  e += 0.5 * rho.dot(w0 * rho);
  e -= 0.5 * (w0.array() * gamma.cwiseAbs2().array()).sum();
  return e + h.constant;
}

HFResult hf_minimize(const GrandHamiltonian& h, double mu, std::optional<double> beta,
                     int max_iter, double tol, double step) {
  if (beta && !(*beta > 0)) throw Error("hf_minimize: beta must be positive");
  const RMat w0 = offdiag_kernel(h);
  auto value_of = [&](const CMat& g, double e) {
    double v = e - mu * g.trace().real();
    if (beta) v -= fermionic_entropy(g) / *beta;
    return v;
  };
  CMat gamma = occupation_map(0.5 * (h.h + h.h.adjoint()), mu, beta);
  HFResult best;
  best.gamma = gamma;
  best.energy = hf_energy(h, gamma);
  best.value = value_of(gamma, best.energy);
  for (int it = 1; it <= max_iter; ++it) {
    const CMat target = occupation_map(mean_field(h, w0, gamma), mu, beta);
    CMat next = (1 - step) * gamma + step * target;
    next = 0.5 * (next + next.adjoint());
    const double diff = (next - gamma).norm();
    gamma = next;
    const double e = hf_energy(h, gamma);
    const double v = value_of(gamma, e);
    if (v < best.value) {
      best.gamma = gamma;
      best.energy = e;
      best.value = v;
    }
    best.iterations = it;
    if (diff < tol) {
      best.converged = true;
      break;
    }
  }
  return best;
}

// ------------------------------------------------------- charge concavity

ConcavityScan charge_concavity_scan(const Domain& omega, const std::vector<Vec3>& positions,
                                    double z_max, int grid_steps, const MagneticField& A) {
  const int k = static_cast<int>(positions.size());
  if (k < 1 || k > 3) throw Error("charge_concavity_scan: need 1 to 3 nuclei");
  if (grid_steps < 3 || grid_steps > 9) throw Error("charge_concavity_scan: grid_steps must be in [3, 9]");
  ConcavityScan sc;
  sc.k = k;
  sc.steps = grid_steps;
  sc.z_max = z_max;
  int total = 1;
  for (int i = 0; i < k; ++i) total *= grid_steps;
  sc.values.resize(total);
  auto decode = [&](int flat) {
    std::vector<int> idx(k);
    for (int i = k - 1; i >= 0; --i) {
      idx[i] = flat % grid_steps;
      flat /= grid_steps;
    }
    return idx;
  };
  for (int flat = 0; flat < total; ++flat) {
    const auto idx = decode(flat);
    NucleiConfig cfg;
    for (int i = 0; i < k; ++i) cfg.nuclei.push_back({positions[i], z_max * idx[i] / (grid_steps - 1)});
    sc.values[flat] = ground_state_energy(coulomb_hamiltonian(omega, cfg, A)).value;
  }
  int stride = 1;
  std::vector<int> strides(k);
  for (int i = k - 1; i >= 0; --i) {
    strides[i] = stride;
    stride *= grid_steps;
  }
  for (int flat = 0; flat < total; ++flat) {
    const auto idx = decode(flat);
    for (int ax = 0; ax < k; ++ax) {
      if (idx[ax] == 0 || idx[ax] == grid_steps - 1) continue;
      const double mid = sc.values[flat];
      const double avg = 0.5 * (sc.values[flat - strides[ax]] + sc.values[flat + strides[ax]]);
      sc.max_concavity_violation = std::max(sc.max_concavity_violation, avg - mid);
    }
  }
  sc.grid_min = *std::min_element(sc.values.begin(), sc.values.end());
  sc.corner_min = kInf;
  for (int c = 0; c < (1 << k); ++c) {
    int flat = 0;
    for (int i = 0; i < k; ++i) flat += ((c >> i) & 1 ? grid_steps - 1 : 0) * strides[i];
    sc.corner_min = std::min(sc.corner_min, sc.values[flat]);
  }
  sc.concave = sc.max_concavity_violation <= 1e-9;
  sc.corner = sc.corner_min - sc.grid_min <= 1e-9;
  return sc;
}

// ------------------------------------------------------- two species

double TwoSpeciesHamiltonian::sector_dimension(int n_el, int n_nuc) const {
  return coulab::sector_dimension(modes(), Statistics::Fermion, 1, n_el) *
         coulab::sector_dimension(modes(), Statistics::Boson, nuc_cap, n_nuc);
}

SpMat TwoSpeciesHamiltonian::sector_matrix(int n_el, int n_nuc) const {
  const int n = modes();
  const SectorBasis be(n, Statistics::Fermion, 1, n_el);
  const SectorBasis bp(n, Statistics::Boson, nuc_cap, n_nuc);
  const long de = static_cast<long>(be.size()), dp = static_cast<long>(bp.size());
  if (static_cast<double>(de) * dp > 4e6) throw Error("two_species: sector dimension overflow");
  const SpMat he = sector_onebody(be, h_el);
  const SpMat hp = sector_onebody(bp, h_nuc);
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int c = 0; c < he.outerSize(); ++c)
    for (SpMat::InnerIterator it(he, c); it; ++it)
      for (long ip = 0; ip < dp; ++ip) trip.emplace_back(it.row() * dp + ip, it.col() * dp + ip, it.value());
  for (int c = 0; c < hp.outerSize(); ++c)
    for (SpMat::InnerIterator it(hp, c); it; ++it)
      for (long ie = 0; ie < de; ++ie) trip.emplace_back(ie * dp + it.row(), ie * dp + it.col(), it.value());
  const RVec ee = sector_pair_diagonal(be, w);
  const RVec pp = sector_pair_diagonal(bp, w);
  for (long ie = 0; ie < de; ++ie) {
    const auto& oe = be.occupation(ie);
    for (long ip = 0; ip < dp; ++ip) {
      const auto& op = bp.occupation(ip);
      double cross = 0;
      for (int x = 0; x < n; ++x) {
        if (!oe[x]) continue;
        for (int y = 0; y < n; ++y)
          if (op[y]) cross += w(x, y) * oe[x] * op[y];
      }
      trip.emplace_back(ie * dp + ip, ie * dp + ip, ee(ie) + z * z * pp(ip) - z * cross);
    }
  }
  SpMat m(de * dp, de * dp);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

TwoSpeciesHamiltonian two_species_hamiltonian(const Domain& omega, double z, double M,
                                              const MagneticField& A, int nuc_cap) {
  if (!(M > 0)) throw Error("two_species_hamiltonian: mass must be positive");
  TwoSpeciesHamiltonian h;
  h.h_el = kinetic_operator(omega, A, 1.0);
  h.h_nuc = kinetic_operator(omega, A, 1.0 / M);
  h.w = coulomb_kernel(omega);
  h.z = z;
  h.nuc_cap = nuc_cap;
  return h;
}

namespace {

int default_max_nuc(const TwoSpeciesHamiltonian& h, int max_nuc) {
  return max_nuc < 0 ? std::min(h.modes() * h.nuc_cap, 3) : max_nuc;
}

}  // namespace

TwoSpeciesEnergy two_species_ground_energy(const TwoSpeciesHamiltonian& h, int max_el,
                                           int max_nuc) {
  const int me = max_el < 0 ? h.modes() : std::min(max_el, h.modes());
  const int mp = default_max_nuc(h, max_nuc);
  TwoSpeciesEnergy r;
  r.value = kInf;
  for (int ne = 0; ne <= me; ++ne)
    for (int np = 0; np <= mp; ++np) {
      if (h.sector_dimension(ne, np) == 0) continue;
      const double e = lowest_eigenpair(h.sector_matrix(ne, np)).value;
      r.sector_minima.emplace_back(ne, np, e);
      if (e < r.value) {
        r.value = e;
        r.n_el = ne;
        r.n_nuc = np;
      }
    }
  return r;
}

FreeEnergyResult two_species_free_energy(const TwoSpeciesHamiltonian& h, double beta,
                                         double mu_el, double mu_nuc, int max_el, int max_nuc) {
  if (!(beta > 0)) throw Error("free_energy: beta must be positive");
  const int me = max_el < 0 ? h.modes() : std::min(max_el, h.modes());
  const int mp = default_max_nuc(h, max_nuc);
  std::vector<double> xs, ns, es;
  for (int ne = 0; ne <= me; ++ne)
    for (int np = 0; np <= mp; ++np) {
      const double d = h.sector_dimension(ne, np);
      if (d == 0) continue;
      if (d > 8192) throw Error("two_species_free_energy: sector dimension too large");
      const RVec ev = eigvalsh(CMat(h.sector_matrix(ne, np)));
      for (int k = 0; k < ev.size(); ++k) {
        xs.push_back(-beta * (ev(k) - mu_el * ne - mu_nuc * np));
        ns.push_back(ne);
        es.push_back(ev(k));
      }
    }
  FreeEnergyResult r;
  r.beta = beta;
  r.mu = {mu_el, mu_nuc};
  r.log_z = logsumexp(xs);
  r.value = -r.log_z / beta;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double p = std::exp(xs[i] - r.log_z);
    r.mean_n += p * ns[i];
    r.mean_energy += p * es[i];
  }
  return r;
}

// ------------------------------------------------------- movable nuclei

namespace {

void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

MovableResult movable_nuclei_energy(const Domain& omega, double z,
                                    const std::vector<Vec3>& candidates, int k_max,
                                    int charge_points) {
  if (k_max < 0) throw Error("movable_nuclei_energy: k_max must be nonnegative");
  if (charge_points < 2) throw Error("movable_nuclei_energy: need at least 2 charge points");
  const int nc = static_cast<int>(candidates.size());
  MovableResult res;
  res.best.value = kInf;
  for (int k = 0; k <= std::min(k_max, nc); ++k)
    for_each_subset(nc, k, [&](const std::vector<int>& idx) {
      NucleiConfig cfg;
      for (int i : idx) cfg.nuclei.push_back({candidates[i], z});
      const EnergyResult e = ground_state_energy(coulomb_hamiltonian(omega, cfg, no_field()));
      if (e.value < res.best.value) {
        res.best = e;
        res.best_positions.clear();
        for (int i : idx) res.best_positions.push_back(candidates[i]);
      }
    });
  const int kk = std::min(k_max, nc);
  res.charge_relaxed = kInf;
  for_each_subset(nc, kk, [&](const std::vector<int>& idx) {
    int total = 1;
    for (int i = 0; i < kk; ++i) total *= charge_points;
    for (int flat = 0; flat < total; ++flat) {
      NucleiConfig cfg;
      int f = flat;
      for (int i = 0; i < kk; ++i) {
        cfg.nuclei.push_back({candidates[idx[i]], z * (f % charge_points) / (charge_points - 1.0)});
        f /= charge_points;
      }
      res.charge_relaxed = std::min(
          res.charge_relaxed, ground_state_energy(coulomb_hamiltonian(omega, cfg, no_field())).value);
    }
  });
  res.relaxed_equal = std::abs(res.charge_relaxed - res.best.value) <= 1e-9;
  return res;
}

namespace {

// Gauss-Legendre nodes and weights on [0, len] via Golub-Welsch.
std::pair<RVec, RVec> gauss_legendre(int m, double len) {
  RMat j = RMat::Zero(m, m);
  for (int i = 1; i < m; ++i) j(i, i - 1) = j(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<RMat> es(j);
  RVec x = (es.eigenvalues().array() + 1.0) * 0.5 * len;
  RVec w = 2.0 * es.eigenvectors().row(0).array().square().transpose() * 0.5 * len;
  return {x, w};
}

}  // namespace

ClassicalFreeEnergy classical_nuclei_free_energy(const Domain& omega, double z, double beta,
                                                 double mu1, double mu2, int k_max,
                                                 const std::vector<Vec3>& grid, double h,
                                                 int charge_points) {
  if (!(beta > 0)) throw Error("classical_nuclei_free_energy: beta must be positive");
  if (!(h > 0)) throw Error("classical_nuclei_free_energy: cell volume must be positive");
  const int ng = static_cast<int>(grid.size());
  const auto [qx, qw] = gauss_legendre(charge_points, z);
  std::vector<double> terms, terms_under, top, top_under;
  for (int k = 0; k <= std::min(k_max, ng); ++k) {
    const double pre = k * std::log(h) + beta * mu2 * k;
    for_each_subset(ng, k, [&](const std::vector<int>& idx) {
      NucleiConfig cfg;
      for (int i : idx) cfg.nuclei.push_back({grid[i], z});
      const double t = pre + grand_log_partition(coulomb_hamiltonian(omega, cfg, no_field()), beta, mu1);
      terms.push_back(t);
      if (k == k_max) top.push_back(t);
      int total = 1;
      for (int i = 0; i < k; ++i) total *= charge_points;
      for (int flat = 0; flat < total; ++flat) {
        NucleiConfig c2;
        double lw = 0;
        int f = flat;
        for (int i = 0; i < k; ++i) {
          c2.nuclei.push_back({grid[idx[i]], qx(f % charge_points)});
          lw += std::log(qw(f % charge_points));
          f /= charge_points;
        }
        const double tu = pre + lw + grand_log_partition(coulomb_hamiltonian(omega, c2, no_field()), beta, mu1);
        terms_under.push_back(tu);
        if (k == k_max) top_under.push_back(tu);
      }
    });
  }
  ClassicalFreeEnergy r;
  r.log_z = logsumexp(terms);
  r.log_z_under = logsumexp(terms_under);
  r.value = -r.log_z / beta;
  r.value_under = -r.log_z_under / beta;
  if (k_max >= 1 && !top.empty()) {
    r.top_term_fraction = std::max(std::exp(logsumexp(top) - r.log_z),
                                   std::exp(logsumexp(top_under) - r.log_z_under));
    r.truncation_warning = r.top_term_fraction > 1e-6;
  }
  return r;
}

}  // namespace coulab
