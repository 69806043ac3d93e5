// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include "coulab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "coulab/fock.hpp"
#include "coulab/linalg.hpp"
#include "coulab/model.hpp"
#include "coulab/rng.hpp"

namespace coulab {

namespace {

struct Moments {
  double sum = 0.0;
  double sum2 = 0.0;
  long n = 0;
  void add(double x) {
    sum += x;
    sum2 += x * x;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double sigma() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum2 / n - m * m) * n / (n - 1.0));
    return std::sqrt(var / n);
  }
};

std::string describe(const ChargeConfig& cfg) {
  std::ostringstream os;
  os << "N=" << cfg.size() << " sum_q2=" << format_double(cfg.sum_q2());
  return os.str();
}

}  // namespace

double ChargeConfig::sum_q2() const {
  double s = 0.0;
  for (double v : q) s += v * v;
  return s;
}

double ChargeConfig::coulomb_energy() const {
  double e = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) e += q[i] * q[j] / (x[i] - x[j]).norm();
  return e;
}

ChargeConfig random_charge_config(Rng& rng, int n, double box, double q_max) {
  ChargeConfig c;
  for (int i = 0; i < n; ++i) {
    c.x.emplace_back(rng.uniform(0, box), rng.uniform(0, box), rng.uniform(0, box));
    c.q.push_back(rng.uniform(-q_max, q_max));
  }
  return c;
}

// ------------------------------------------------------------- Lieb-Yau

Report lieb_yau_gap(const std::vector<Vec3>& electrons, const std::vector<Vec3>& nuclei,
                    double z, bool baxter) {
  if (electrons.empty() || nuclei.empty()) throw Error("lieb_yau_gap: need N, K >= 1");
  if (z <= 0) throw Error("lieb_yau_gap: z must be positive");
  Report r;
  r.name = baxter ? "baxter" : "lieb_yau";
  std::ostringstream cfg;
  cfg << "N=" << electrons.size() << " K=" << nuclei.size() << " z=" << format_double(z);
  r.config = cfg.str();

  const std::size_t n = electrons.size(), k = nuclei.size();
  bool coincident = false;
  double lhs = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (electrons[i] - electrons[j]).norm();
      if (d == 0.0) coincident = true;
      lhs += 1.0 / d;
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t m = 0; m < k; ++m) {
      const double d = (electrons[i] - nuclei[m]).norm();
      if (d == 0.0) coincident = true;
      lhs -= z / d;
    }
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t l = m + 1; l < k; ++l) {
      const double d = (nuclei[m] - nuclei[l]).norm();
      if (d == 0.0) coincident = true;
      lhs += z * z / d;
    }
  if (coincident) {
    r.lhs = kInf;
    r.rhs = 0.0;
    r.note = "coincident points";
    r.finalize();
    return r;
  }

  auto delta = [&](const Vec3& x) {
    double d = kInf;
    for (const auto& R : nuclei) {
      const double t = (x - R).norm();
      if (t > 0.0) d = std::min(d, t);
    }
    return d;
  };
  const double c = baxter ? 1.0 + 2.0 * z : z + std::sqrt(2.0 * z) + 0.5;
  double rhs = 0.0;
  for (const auto& x : electrons) rhs -= c / delta(x);
  if (!baxter)
    for (const auto& R : nuclei) rhs += z * z / 4.0 / delta(R);  // 1/inf = 0
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = 1e-12;
  r.finalize();
  return r;
}

// -------------------------------------------------------- Graf-Schenker

std::vector<GsSample> graf_schenker_samples(const ChargeConfig& cfg,
                                            const std::vector<double>& ells, int samples,
                                            std::uint64_t seed) {
  if (samples < 2) throw Error("graf_schenker: need at least 2 samples");
  const Tiling& tiling = default_tiling();
  const double z2 = cfg.sum_q2();
  const std::size_t n = cfg.size();
  std::vector<GsSample> out;
  for (std::size_t s = 0; s < ells.size(); ++s) {
    const double ell = ells[s];
    if (!(ell > 0)) throw Error("graf_schenker: ell must be positive");
    const auto group = sample_group(splitmix64(seed + s), samples, ell);
    Moments m;
    std::vector<TileId> ids(n);
    for (const auto& g : group) {
      for (std::size_t i = 0; i < n; ++i) ids[i] = tiling.locate(g, ell, cfg.x[i]);
      // D sample = -(split pair energy)
      double split = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (!(ids[i] == ids[j])) split += cfg.q[i] * cfg.q[j] / (cfg.x[i] - cfg.x[j]).norm();
      m.add(-split);
    }
    GsSample g;
    g.ell = ell;
    g.deficit = m.mean();
    g.error = m.sigma();
    g.scaled = z2 > 0 ? ell * g.deficit / z2 : 0.0;
    g.scaled_error = z2 > 0 ? ell * g.error / z2 : 0.0;
    out.push_back(g);
  }
  return out;
}

std::vector<Report> graf_schenker_deficit(const std::vector<ChargeConfig>& cfgs,
                                          const std::vector<double>& ells, int samples,
                                          std::uint64_t seed) {
  if (ells.empty()) throw Error("graf_schenker: empty ell list");
  std::vector<std::vector<GsSample>> all;
  for (std::size_t c = 0; c < cfgs.size(); ++c)
    all.push_back(graf_schenker_samples(cfgs[c], ells, samples, splitmix64(seed ^ (c + 1))));
  double fit = -kInf, fit_err = 0.0;
  for (const auto& a : all)
    if (a[0].scaled > fit) {
      fit = a[0].scaled;
      fit_err = a[0].scaled_error;
    }
  fit = std::max(fit, 0.0);
  std::vector<Report> out;
  for (std::size_t c = 0; c < cfgs.size(); ++c)
    for (const auto& s : all[c]) {
      Report r;
      r.name = "graf_schenker";
      r.config = "cfg" + std::to_string(c) + " " + describe(cfgs[c]);
      r.scale = s.ell;
      r.lhs = fit;
      r.rhs = s.scaled;
      r.mc_error = std::hypot(s.scaled_error, fit_err);
      r.fitted_constant = fit;
      r.note = "D=" + format_double(s.deficit) + " sigma=" + format_double(s.error);
      r.finalize();
      out.push_back(r);
    }
  return out;
}

// ------------------------------------------------- smooth Graf-Schenker

double gs_w(double r) { return 1.0 / (r * (1.0 + r)); }

double yukawa(double nu, double r) { return std::exp(-nu * r) / r; }

double gs_w_quadrature(double r) {
  if (!(r > 0)) throw Error("gs_w_quadrature: r must be positive");
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([r](double nu) { return std::exp(-nu) * yukawa(nu, r); },
                              1e-14);
}

SmoothGsSample smooth_gs_sample(const ChargeConfig& cfg, double ell, double r_j, int samples,
                                std::uint64_t seed) {
  if (samples < 2) throw Error("smooth_gs: need at least 2 samples");
  const Tiling& tiling = default_tiling();
  const Mollifier j(r_j, 10);
  const std::size_t n = cfg.size();
  const auto group = sample_group(seed, samples, ell);
  Moments smooth, sharp;
  for (const auto& g : group) {
    std::vector<std::vector<std::pair<TileId, double>>> w(n);
    std::vector<TileId> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = tile_weights(tiling, g, ell, j, cfg.x[i]);
      ids[i] = tiling.locate(g, ell, cfg.x[i]);
    }
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i + 1; k < n; ++k) {
        const double c = cfg.q[i] * cfg.q[k] / (cfg.x[i] - cfg.x[k]).norm();
        if (ids[i] == ids[k]) b += c;
        // both lists are sorted by tile id
        double overlap = 0.0;
        auto p = w[i].begin(), q = w[k].begin();
        while (p != w[i].end() && q != w[k].end()) {
          if (p->first == q->first) {
            overlap += p->second * q->second;
            ++p;
            ++q;
          } else if (p->first < q->first) {
            ++p;
          } else {
            ++q;
          }
        }
        a += c * overlap;
      }
    smooth.add(a);
    sharp.add(b);
  }
  SmoothGsSample s;
  s.ell = ell;
  s.lhs = cfg.coulomb_energy();
  s.smoothed = smooth.mean();
  s.smoothed_error = smooth.sigma();
  s.sharp = sharp.mean();
  double wt = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) wt += cfg.q[i] * cfg.q[k] * gs_w((cfg.x[i] - cfg.x[k]).norm());
  s.w_term = wt;
  // lhs >= (1 - C/ell) A + (C/ell) W - (C/ell) Z  <=>  lhs - A >= -(C/ell) B
  const double b = s.smoothed - wt + cfg.sum_q2();
  const double deficit = s.smoothed - s.lhs;
  if (deficit <= 0)
    s.c_needed = 0.0;
  else
    s.c_needed = b > 0 ? deficit * ell / b : kInf;
  return s;
}

std::vector<Report> smooth_gs_check(const std::vector<ChargeConfig>& cfgs,
                                    const std::vector<double>& ells, double r_j, int samples,
                                    std::uint64_t seed) {
  if (ells.empty()) throw Error("smooth_gs: empty ell list");
  std::vector<std::vector<SmoothGsSample>> all(cfgs.size());
  std::vector<std::vector<double>> errs(cfgs.size());
  for (std::size_t c = 0; c < cfgs.size(); ++c)
    for (std::size_t s = 0; s < ells.size(); ++s) {
      auto v = smooth_gs_sample(cfgs[c], ells[s], r_j, samples,
                                splitmix64(seed ^ ((c + 1) * 1000003ULL + s)));
      const double b = v.smoothed - v.w_term + cfgs[c].sum_q2();
      // first-order propagation of the A error into C_needed
      const double e = b > 0 ? ells[s] * v.smoothed_error *
                                   std::abs(v.lhs - v.w_term + cfgs[c].sum_q2()) / (b * b)
                             : 0.0;
      all[c].push_back(v);
      errs[c].push_back(e);
    }
  double fit = 0.0, fit_err = 0.0;
  for (std::size_t c = 0; c < cfgs.size(); ++c)
    if (all[c][0].c_needed > fit) {
      fit = all[c][0].c_needed;
      fit_err = errs[c][0];
    }
  std::vector<Report> out;
  for (std::size_t c = 0; c < cfgs.size(); ++c)
    for (std::size_t s = 0; s < ells.size(); ++s) {
      const auto& v = all[c][s];
      Report r;
      r.name = "smooth_graf_schenker";
      r.config = "cfg" + std::to_string(c) + " " + describe(cfgs[c]);
      r.scale = v.ell;
      r.lhs = fit;
      r.rhs = v.c_needed;
      r.mc_error = std::hypot(errs[c][s], fit_err);
      r.fitted_constant = fit;
      r.note = "A=" + format_double(v.smoothed) + " sharp=" + format_double(v.sharp) +
               " W=" + format_double(v.w_term);
      r.finalize();
      out.push_back(r);
    }
  return out;
}

Report coulomb_yukawa_bound(const ChargeConfig& cfg, double nu) {
  if (nu < 0) throw Error("coulomb_yukawa_bound: nu must be >= 0");
  Report r;
  r.name = "coulomb_yukawa";
  r.config = describe(cfg) + " nu=" + format_double(nu);
  double rhs = -0.5 * nu * cfg.sum_q2();
  for (std::size_t i = 0; i < cfg.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.size(); ++j)
      rhs += cfg.q[i] * cfg.q[j] * yukawa(nu, (cfg.x[i] - cfg.x[j]).norm());
  r.lhs = cfg.coulomb_energy();
  r.rhs = rhs;
  r.finalize();
  return r;
}

// ------------------------------------------------------- Lieb-Thirring

Report lieb_thirring_potential(const Domain& omega, const RVec& v) {
  if (v.size() != static_cast<Eigen::Index>(omega.size()))
    throw Error("lieb_thirring: potential size mismatch");
  CMat h = kinetic_operator(omega, no_field());
  for (Eigen::Index i = 0; i < v.size(); ++i) h(i, i) += v(i);
  const RVec ev = eigvalsh(h);
  double neg = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) < 0) neg -= ev(i);
  const double ad = std::pow(omega.spacing(), omega.dim());
  const double p = 1.0 + omega.dim() / 2.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) < 0) den += ad * std::pow(-v(i), p);
  Report r;
  r.name = "lieb_thirring_potential";
  r.config = omega.label();
  r.lhs = den > 0 ? neg / den : 0.0;
  r.rhs = 0.0;
  r.note = "trace_neg=" + format_double(neg);
  r.finalize();
  return r;
}

Report lieb_thirring_slater(const Domain& omega, int k) {
  const int n = static_cast<int>(omega.size());
  if (k < 1 || k > n) throw Error("lieb_thirring_slater: k out of range");
  const CMat t = kinetic_operator(omega, no_field());
  Eigen::SelfAdjointEigenSolver<CMat> es(t);
  const double ad = std::pow(omega.spacing(), omega.dim());
  double kin = 0.0;
  RVec rho = RVec::Zero(n);
  for (int m = 0; m < k; ++m) {
    kin += es.eigenvalues()(m);
    rho += es.eigenvectors().col(m).cwiseAbs2() / ad;
  }
  const double p = 1.0 + 2.0 / omega.dim();
  double den = 0.0;
  for (int i = 0; i < n; ++i) den += ad * std::pow(rho(i), p);
  Report r;
  r.name = "lieb_thirring_slater";
  r.config = omega.label() + " k=" + std::to_string(k);
  r.lhs = kin / den;
  r.rhs = 0.0;
  r.finalize();
  return r;
}

bool lieb_thirring_family(std::vector<Report>& family) {
  if (family.size() < 2) throw Error("lieb_thirring_family: need at least two members");
  double fit = 0.0;
  for (std::size_t i = 0; i + 1 < family.size(); ++i) fit = std::max(fit, family[i].lhs);
  bool ok = true;
  for (auto& r : family) {
    const double ratio = r.lhs;
    r.fitted_constant = fit;
    r.lhs = fit;
    r.rhs = ratio;
    r.tolerance = 1e-9 * std::max(1.0, fit);
    r.finalize();
    ok = ok && r.pass;
  }
  return ok;
}

// ------------------------------------------------------------- Li-Yau

Report li_yau_gap(const std::vector<double>& sides, const std::function<double(double)>& f) {
  const int n = static_cast<int>(sides.size());
  if (n != 1 && n != 3) throw Error("li_yau_gap: only intervals and 3-d boxes");
  double vol = 1.0;
  for (double l : sides) {
    if (!(l > 0)) throw Error("li_yau_gap: sides must be positive");
    vol *= l;
  }
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  const double radial = integrator.integrate(
      [&](double p) { return f(p * p) * std::pow(p, n - 1); }, 1e-14, &err);
  if (!std::isfinite(radial)) throw Error("li_yau_gap: divergent integral");
  const double sphere = n == 1 ? 2.0 : 4.0 * kPi;
  const double lhs = vol * std::pow(2.0 * kPi, -n) * sphere * radial;

  const long max_index = 1000000;
  auto lam = [&](int axis, long k) { return std::pow(kPi * k / sides[axis], 2); };
  double rhs = 0.0;
  if (n == 1) {
    for (long k = 1;; ++k) {
      if (k > max_index) throw Error("li_yau_gap: divergent eigenvalue sum");
      const double v = f(lam(0, k));
      if (v < 1e-16) break;
      rhs += v;
    }
  } else {
    const double b1 = lam(1, 1), b2 = lam(2, 1);
    for (long i = 1;; ++i) {
      if (i > max_index) throw Error("li_yau_gap: divergent eigenvalue sum");
      const double li = lam(0, i);
      if (f(li + b1 + b2) < 1e-16) break;
      for (long j = 1;; ++j) {
        const double lj = lam(1, j);
        if (f(li + lj + b2) < 1e-16) break;
        for (long k = 1;; ++k) {
          const double v = f(li + lj + lam(2, k));
          if (v < 1e-16) break;
          rhs += v;
        }
      }
    }
  }
  Report r;
  r.name = "li_yau";
  r.config = n == 1 ? "interval L=" + format_double(sides[0])
                    : "box " + format_double(sides[0]) + "x" + format_double(sides[1]) + "x" +
                          format_double(sides[2]);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = 1e-9;
  r.note = "quadrature_error=" + format_double(err);
  r.finalize();
  return r;
}

// ------------------------------------------------ repelling particles

Report repelling_bound_check(const Domain& omega, int n, double eps) {
  if (n < 1 || n > 4) throw Error("repelling_bound_check: need 1 <= N <= 4");
  if (eps < 0) throw Error("repelling_bound_check: eps must be >= 0");
  const int m = static_cast<int>(omega.size());
  const CMat t = kinetic_operator(omega, no_field());
  const SectorBasis basis(m, Statistics::Boson, n, n);
  const double u0 = onsite_coulomb_alpha() / omega.spacing();
  std::vector<Vec3> pos(m);
  for (int i = 0; i < m; ++i) pos[i] = omega.position(i);

  SpMat h = sector_onebody(basis, t);
  std::vector<Eigen::Triplet<cplx>> diag;
  diag.reserve(basis.size());
  std::vector<int> occupied;
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const auto& occ = basis.occupation(s);
    occupied.clear();
    for (int i = 0; i < m; ++i)
      if (occ[i]) occupied.push_back(i);
    double e = 0.0;
    for (int x : occupied) {
      double mx = occ[x] >= 2 ? u0 : 0.0;  // max over the empty set is 0
      for (int y : occupied)
        if (y != x) mx = std::max(mx, 1.0 / (pos[x] - pos[y]).norm());
      e += occ[x] * mx;
    }
    diag.emplace_back(static_cast<int>(s), static_cast<int>(s), cplx(eps * e, 0.0));
  }
  SpMat d(h.rows(), h.cols());
  d.setFromTriplets(diag.begin(), diag.end());
  h = h + d;
  const EigenPair ep = lowest_eigenpair(h);

  const double vol = omega.volume();
  const double dens = n / vol;
  const double scale = n * std::min(dens, std::cbrt(dens));
  Report r;
  r.name = "repelling";
  r.config = omega.label() + " N=" + std::to_string(n) + " eps=" + format_double(eps);
  r.scale = n;
  r.lhs = ep.value;
  r.rhs = 0.0;
  r.fitted_constant = ep.value / scale;
  r.note = "c_obs=" + format_double(r.fitted_constant) + " method=" + ep.method;
  r.finalize();
  return r;
}

std::vector<Report> repelling_bound_suite(const Domain& omega, const std::vector<int>& n_list,
                                          double eps) {
  std::vector<Report> out;
  double c_min = kInf;
  for (int n : n_list) {
    out.push_back(repelling_bound_check(omega, n, eps));
    c_min = std::min(c_min, out.back().fitted_constant);
  }
  Report r;
  r.name = "repelling_min_c";
  r.config = omega.label();
  r.lhs = c_min;
  r.rhs = 0.0;
  r.fitted_constant = c_min;
  r.tolerance = 0.0;
  r.finalize();
  r.pass = r.pass && c_min > 0;
  out.push_back(r);
  return out;
}

// ------------------------------------------------------------ dipole

Report dipole_bound_check(const Vec3& R, const Vec3& D, const std::vector<Vec3>& samples) {
  const double d = D.norm();
  if (!(d > 0)) throw Error("dipole_bound_check: |D| must be positive");
  double worst = 0.0;
  long skipped = 0;
  for (const auto& x : samples) {
    const double a = (x - R).norm(), b = (x - R - D).norm();
    if (a <= 1e-6 || b <= 1e-6) {
      ++skipped;
      continue;
    }
    worst = std::max(worst, std::abs(a - b) / d);
  }
  Report r;
  r.name = "dipole";
  r.config = "samples=" + std::to_string(samples.size());
  r.lhs = 1.0;
  r.rhs = worst;
  r.fitted_constant = worst;
  r.tolerance = 1e-9;
  r.note = "skipped=" + std::to_string(skipped);
  r.finalize();
  return r;
}

// --------------------------------------------------------------- IMS

CMat ims_residual_matrix(const CMat& t, const std::vector<RVec>& thetas) {
  const Eigen::Index n = t.rows();
  RVec total = RVec::Zero(n);
  for (const auto& th : thetas) {
    if (th.size() != n) throw Error("ims: partition size mismatch");
    total += th.cwiseAbs2();
  }
  if ((total.array() - 1.0).abs().maxCoeff() > 1e-9)
    throw Error("ims: partition of unity violated");
  CMat acc = -t;
  for (const auto& th : thetas) acc += th.asDiagonal() * t * th.asDiagonal();
  return acc;
}

std::vector<RVec> tiling_partition(const Domain& omega, const GroupElement& g, double ell,
                                   double r_j) {
  const Tiling& tiling = default_tiling();
  const Mollifier j(r_j);
  std::map<TileId, int> cols;
  std::vector<std::vector<std::pair<int, double>>> rows(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i)
    for (const auto& [id, w] : tile_weights(tiling, g, ell, j, omega.position(i))) {
      auto it = cols.emplace(id, static_cast<int>(cols.size())).first;
      rows[i].emplace_back(it->second, std::sqrt(w));
    }
  std::vector<RVec> out(cols.size(), RVec::Zero(omega.size()));
  for (std::size_t i = 0; i < omega.size(); ++i)
    for (const auto& [c, v] : rows[i]) out[c](i) = v;
  return out;
}

std::vector<Report> ims_residual(const Domain& omega, const std::vector<double>& ells,
                                 double r_j, int group_samples, std::uint64_t seed) {
  if (ells.empty()) throw Error("ims: empty ell list");
  if (group_samples < 1) throw Error("ims: need at least one group sample");
  const auto offsets = omega.neighbor_offsets();
  const double a2 = omega.spacing() * omega.spacing();
  const Tiling& tiling = default_tiling();
  const Mollifier j(r_j);
  const int n = static_cast<int>(omega.size());

  std::vector<double> per_volume, norms;
  for (std::size_t s = 0; s < ells.size(); ++s) {
    const double ell = ells[s];
    const auto group = sample_group(splitmix64(seed + s), group_samples, ell);
    double e_sum = 0.0, norm_max = 0.0;
    for (const auto& g : group) {
      std::vector<std::vector<std::pair<TileId, double>>> w(n);
      for (int i = 0; i < n; ++i) {
        w[i] = tile_weights(tiling, g, ell, j, omega.position(i));
        double tot = 0.0;
        for (auto& p : w[i]) {
          tot += p.second;
          p.second = std::sqrt(p.second);
        }
        if (std::abs(tot - 1.0) > 1e-9) throw Error("ims: partition of unity violated");
      }
      // R_xy = T_xy (k(x,y) - 1) on nearest-neighbour edges, zero elsewhere.
      std::vector<Eigen::Triplet<double>> trip;
      double sum = 0.0;
      for (int x = 0; x < n; ++x)
        for (const auto& off : offsets) {
          const Site& sx = omega.site(x);
          const int y = omega.index_of({sx[0] + off[0], sx[1] + off[1], sx[2] + off[2]});
          if (y < 0) continue;
          double k = 0.0;
          auto p = w[x].begin(), q = w[y].begin();
          while (p != w[x].end() && q != w[y].end()) {
            if (p->first == q->first) {
              k += p->second * q->second;
              ++p;
              ++q;
            } else if (p->first < q->first) {
              ++p;
            } else {
              ++q;
            }
          }
          const double rxy = -(k - 1.0) / a2;
          if (rxy != 0.0) trip.emplace_back(x, y, rxy);
          sum += std::abs(rxy);
        }
      e_sum += sum / n;
      RSpMat rm(n, n);
      rm.setFromTriplets(trip.begin(), trip.end());
      // power iteration on R^2 for the spectral norm
      RVec v = RVec::Ones(n) / std::sqrt(static_cast<double>(n));
      double lam = 0.0;
      for (int it = 0; it < 300 && rm.nonZeros() > 0; ++it) {
        RVec u = rm * (rm * v);
        const double nu = u.norm();
        if (nu == 0.0) break;
        const double next = std::sqrt(nu);
        v = u / nu;
        if (std::abs(next - lam) <= 1e-10 * next) {
          lam = next;
          break;
        }
        lam = next;
      }
      norm_max = std::max(norm_max, lam);
    }
    per_volume.push_back(e_sum / group_samples);
    norms.push_back(norm_max);
  }
  double lo = kInf;
  for (std::size_t s = 0; s < ells.size(); ++s) lo = std::min(lo, ells[s] * per_volume[s]);
  std::vector<Report> out;
  for (std::size_t s = 0; s < ells.size(); ++s) {
    Report r;
    r.name = "ims";
    r.config = omega.label() + " r_j=" + format_double(r_j);
    r.scale = ells[s];
    r.fitted_constant = ells[0] * per_volume[0];
    // factor-2 window around the smallest scaled value
    r.lhs = 2.0 * lo;
    r.rhs = ells[s] * per_volume[s];
    r.tolerance = 1e-12;
    r.note = "per_volume=" + format_double(per_volume[s]) +
             " spectral_norm=" + format_double(norms[s]);
    r.finalize();
    out.push_back(r);
  }
  return out;
}

}  // namespace coulab
