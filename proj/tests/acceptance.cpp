// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, then a summary.
// Exits 0 once every criterion has been evaluated; pass --strict to make the
// exit code the number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "coulab/fock.hpp"
#include "coulab/inequalities.hpp"
#include "coulab/linalg.hpp"
#include "coulab/localization.hpp"
#include "coulab/model.hpp"
#include "coulab/rng.hpp"
#include "coulab/scan.hpp"

using namespace coulab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Vec3 random_point(Rng& rng, double box) {
  return Vec3(rng.uniform(0, box), rng.uniform(0, box), rng.uniform(0, box));
}

CMat random_weight(int n, Rng& rng) {
  const CMat u = random_unitary(n, rng);
  RVec s(n);
  for (int i = 0; i < n; ++i) s(i) = rng.uniform();
  return u * s.cast<cplx>().asDiagonal() * u.adjoint();
}

CMat doubled(const FockSpace& s, const CVec& f, bool second) {
  CMat out = CMat::Zero(s.dim * s.dim, s.dim * s.dim);
  for (int j = 0; j < s.n; ++j) out += f(j) * CMat(doubled_creation(s, j, second));
  return out;
}

// ------------------------------------------------------------------ 1

Outcome lieb_yau_suite() {
  const auto t0 = Clock::now();
  Rng rng(2026);
  double worst = kInf;
  for (int t = 0; t < 1000; ++t) {
    const int n = rng.integer(1, 8), k = rng.integer(1, 8);
    const double z = rng.uniform(0.05, 3.0);
    std::vector<Vec3> e, nuc;
    for (int i = 0; i < n; ++i) e.push_back(random_point(rng, 4.0));
    for (int i = 0; i < k; ++i) nuc.push_back(random_point(rng, 4.0));
    worst = std::min(worst, lieb_yau_gap(e, nuc, z).gap);
  }
  const double dt = seconds_since(t0);
  return {worst >= -1e-12 && dt < 10, "min gap " + fmt(worst) + ", " + fmt(dt) + " s"};
}

// ------------------------------------------------------------------ 2

Outcome graf_schenker_suite() {
  const auto t0 = Clock::now();
  Rng rng(2026);
  std::vector<ChargeConfig> cfgs;
  for (int c = 0; c < 20; ++c) cfgs.push_back(random_charge_config(rng, rng.integer(2, 8), 2.0, 3.0));
  const auto reps = graf_schenker_deficit(cfgs, {4.0, 8.0, 16.0}, 10000, 7);
  const double dt = seconds_since(t0);
  int fails = 0;
  double worst = -kInf;
  for (const auto& r : reps) {
    fails += !r.pass;
    if (r.mc_error > 0) worst = std::max(worst, (r.rhs - r.lhs) / r.mc_error);
  }
  return {fails == 0 && dt < 120,
          std::to_string(fails) + "/" + std::to_string(reps.size()) + " reports above C + 3 sigma, C=" +
              fmt(reps.front().fitted_constant) + ", worst excess " + fmt(worst) + " sigma, " + fmt(dt) +
              " s"};
}

// ------------------------------------------------------------------ 3

Outcome quantum_ssa_suite() {
  const FockSpace s = build_space(6, Statistics::Fermion);
  double worst = kInf;
  for (int t = 0; t < 100; ++t) {
    Rng rng = Rng::substream(33, t);
    const CMat g = random_density(static_cast<int>(s.dim), rng);
    const auto w = diagonal_weights(random_smooth_partition(6, 3, rng));
    worst = std::min(worst, ssa_gap(s, g, w, {0}, {1}, {2}).gap);
  }
  // products of diagonal states over the indicator blocks {0,1} | {2,3} | {4,5}
  double product_dev = 0;
  std::vector<RVec> th(3, RVec::Zero(6));
  for (int m = 0; m < 3; ++m) th[m](2 * m) = th[m](2 * m + 1) = 1;
  const auto ind = diagonal_weights(th);
  for (int t = 0; t < 10; ++t) {
    Rng rng = Rng::substream(34, t);
    std::vector<RVec> p(3, RVec(4));
    for (auto& v : p) {
      for (int i = 0; i < 4; ++i) v(i) = rng.uniform(0.05, 1);
      v /= v.sum();
    }
    CMat g = CMat::Zero(s.dim, s.dim);
    for (std::int64_t b = 0; b < s.dim; ++b) {
      const auto o = s.occupations(b);
      double w = 1;
      for (int m = 0; m < 3; ++m) w *= p[m](o[2 * m] + 2 * o[2 * m + 1]);
      g(b, b) = w;
    }
    product_dev = std::max(product_dev, std::abs(ssa_gap(s, g, ind, {0}, {1}, {2}).gap));
  }
  return {worst >= -1e-9 && product_dev <= 1e-9,
          "min random gap " + fmt(worst) + ", max product |gap| " + fmt(product_dev)};
}

// ------------------------------------------------------------------ 4

Outcome cq_suite() {
  const FockSpace s = build_space(4, Statistics::Fermion);
  double worst = kInf;
  for (int t = 0; t < 50; ++t) {
    Rng rng = Rng::substream(44, t);
    const CQState rho = random_cq_state(s, 3, 2, rng);
    const auto q = diagonal_weights(random_smooth_partition(4, 3, rng));
    const auto th = random_smooth_partition(3, 3, rng);
    worst = std::min(worst, cq_ssa_gap(rho, q, th, {0}, {1}, {2}).gap);
  }
  double err = 0;
  for (int k_max : {1, 2}) {
    SmoothCQFixture fx;
    fx.k_max = k_max;
    const double reference = cq_entropy(fx.discretize(64));
    err = std::max(err, std::abs(quantize_cq(fx.discretize(8)).corrected_entropy - reference));
  }
  return {worst >= -1e-9 && err <= 1e-3,
          "min gap " + fmt(worst) + ", corrected entropy error at 8 points per cell " + fmt(err)};
}

// ------------------------------------------------------------------ 5

Outcome localization_suite() {
  const FockSpace s = build_space(3, Statistics::Fermion);
  const FockSpace s4 = build_space(4, Statistics::Fermion);
  double iso = 0, inter = 0, g1 = 0, restr = 0, wick = 0;
  for (int t = 0; t < 50; ++t) {
    Rng rng = Rng::substream(55, t);
    const CMat q = random_weight(3, rng), r = complement_weight(q);
    const CMat u = CMat(localization_isometry(s, q));
    iso = std::max(iso, (u.adjoint() * u - CMat::Identity(s.dim, s.dim)).norm());

    CVec f(3);
    for (int i = 0; i < 3; ++i) f(i) = cplx(rng.normal(), rng.normal());
    const CMat ad = CMat(creation(s, f)), aq = CMat(creation(s, q * f)), ar = CMat(creation(s, r * f));
    const CMat cq = doubled(s, q * f, false), dr = doubled(s, r * f, true);
    const CMat c = doubled(s, f, false), d = doubled(s, f, true);
    inter = std::max({inter, (u * ad - (cq + dr) * u).norm(),
                      (u * ad.adjoint() - (cq + dr).adjoint() * u).norm(),
                      (u * aq.adjoint() - c.adjoint() * u).norm(), (u * ar.adjoint() - d.adjoint() * u).norm(),
                      (aq * u.adjoint() - u.adjoint() * c).norm(), (ar * u.adjoint() - u.adjoint() * d).norm()});

    const CMat g = random_density(static_cast<int>(s.dim), rng);
    g1 = std::max(g1, (reduced_density(s, localize_state(s, g, q), 1) -
                       q * reduced_density(s, g, 1) * q)
                          .norm());

    // projector onto a random mode subset against split + partial trace
    std::vector<int> first;
    CMat p = CMat::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
      if (rng.uniform() < 0.5) {
        first.push_back(i);
        p(i, i) = 1;
      }
    if (first.empty()) {
      first.push_back(0);
      p(0, 0) = 1;
    }
    const CMat g4 = random_density(16, rng);
    const CMat loc = localize_state(s4, g4, p);
    const CMat sp = CMat(split_isomorphism(s4, first));
    const std::int64_t d1 = std::int64_t{1} << first.size();
    const CMat red = partial_trace(sp * g4 * sp.adjoint(), d1, 16 / d1, 1);
    const FockSpace sub = build_space(static_cast<int>(first.size()), Statistics::Fermion);
    for (std::int64_t a = 0; a < d1; ++a)
      for (std::int64_t b = 0; b < d1; ++b) {
        std::vector<int> oa(4, 0), ob(4, 0);
        for (std::size_t i = 0; i < first.size(); ++i) {
          oa[first[i]] = sub.occupation(a, static_cast<int>(i));
          ob[first[i]] = sub.occupation(b, static_cast<int>(i));
        }
        restr = std::max(restr, std::abs(loc(s4.index_of(oa), s4.index_of(ob)) - red(a, b)));
      }

    const CMat v = random_unitary(4, rng);
    RVec occ(4);
    for (int i = 0; i < 4; ++i) occ(i) = rng.uniform(0.05, 0.95);
    const CMat qf = quasi_free_state(s4, v * occ.cast<cplx>().asDiagonal() * v.adjoint());
    wick = std::max(wick, wick_error(s4, localize_state(s4, qf, random_weight(4, rng))));
  }
  const bool ok = iso <= 1e-12 && inter <= 1e-12 && g1 <= 1e-10 && restr <= 1e-12 && wick <= 1e-9;
  return {ok, "isometry " + fmt(iso) + ", intertwining " + fmt(inter) + ", gamma1 " + fmt(g1) +
                  ", restriction " + fmt(restr) + ", wick " + fmt(wick)};
}

// ------------------------------------------------------------------ 6

Outcome li_yau_suite() {
  const Report one = li_yau_gap({kPi}, [](double t) { return std::exp(-t); });
  double rhs1 = 0;
  for (int k = 1; k < 30; ++k) rhs1 += std::exp(-double(k) * k);
  const double lhs1 = std::sqrt(kPi) / 2;
  const double s = 4.0;
  const Report box = li_yau_gap({1, 2, 3}, [s](double t) { return std::exp(-t / s); });
  const double lhs3 = 6.0 * std::pow(kPi * s, 1.5) / std::pow(2 * kPi, 3);
  double rhs3 = 0;
  for (int i = 1; i < 40; ++i)
    for (int j = 1; j < 40; ++j)
      for (int k = 1; k < 40; ++k) rhs3 += std::exp(-kPi * kPi * (i * i + j * j / 4.0 + k * k / 9.0) / s);
  const double dev = std::max({std::abs(one.lhs - lhs1), std::abs(one.rhs - rhs1), std::abs(box.lhs - lhs3),
                               std::abs(box.rhs - rhs3)});
  return {one.gap > 0 && box.gap > 0 && dev <= 1e-10,
          "gaps " + fmt(one.gap) + " and " + fmt(box.gap) + ", oracle deviation " + fmt(dev)};
}

// ------------------------------------------------------------------ 7

Outcome magnetic_suite() {
  const Domain d = build_domain(cube_shape(4.0), 1.0);
  const double base = eigvalsh(kinetic_operator(d, no_field())).minCoeff();
  double worst = kInf;
  for (int t = 0; t < 20; ++t)
    worst = std::min(worst, eigvalsh(kinetic_operator(d, random_bounded_field(700 + t, 1.5))).minCoeff() - base);

  const Domain small = build_domain(cube_shape(2.0), 1.0);
  NucleiConfig k;
  k.nuclei.push_back({Vec3(0.5, 0.5, 0.5), 1.0});
  const GrandHamiltonian h = coulomb_hamiltonian(small, k, random_bounded_field(5, 0.8));
  const FockSpace sp = h.space();
  const CMat H = CMat(second_quantize_onebody(sp, h.h)) + CMat(second_quantize_twobody(sp, h.w).cast<cplx>()) +
                 h.constant * CMat::Identity(sp.dim, sp.dim);
  const double beta = 0.5;
  const RVec ev = eigvalsh(H);
  const double e0 = ev.minCoeff();
  double tr = 0;
  for (int i = 0; i < ev.size(); ++i) tr += std::exp(-beta * (ev(i) - e0));
  double rel = -kInf;
  for (int t = 0; t < 20; ++t) {
    Rng rng = Rng::substream(77, t);
    // the eigenbasis attains equality; the other bases are Haar random
    const CMat u = t == 0 ? CMat(Eigen::SelfAdjointEigenSolver<CMat>(H).eigenvectors())
                          : random_unitary(static_cast<int>(sp.dim), rng);
    const CMat hu = u.adjoint() * H * u;
    double sum = 0;
    for (int i = 0; i < hu.rows(); ++i) sum += std::exp(-beta * (hu(i, i).real() - e0));
    rel = std::max(rel, (sum - tr) / tr);
  }
  return {worst >= -1e-10 && rel <= 1e-10,
          "min spectral shift " + fmt(worst) + ", max relative Peierls excess " + fmt(rel) + " over 20 bases"};
}

// ------------------------------------------------------------------ 8

Outcome charge_suite() {
  const Domain d = build_domain(cube_shape(2.0), 1.0);
  int fails = 0;
  double worst = 0;
  for (int t = 0; t < 10; ++t) {
    Rng rng = Rng::substream(88, t);
    const int kk = rng.integer(1, 2);
    std::vector<Vec3> pos;
    for (int i = 0; i < kk; ++i) {
      Vec3 x;
      do {
        x = Vec3(rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5));
      } while ((x.array() - x.array().round()).abs().maxCoeff() < 0.15);
      pos.push_back(x);
    }
    const double z = rng.uniform(0.5, 2.0);
    const ConcavityScan c = charge_concavity_scan(d, pos, z, 9);
    worst = std::max(worst, c.max_concavity_violation);
    const MovableResult m = movable_nuclei_energy(d, z, pos, kk);
    fails += !(c.concave && c.corner && m.relaxed_equal);
  }
  return {fails == 0, std::to_string(fails) + "/10 instances failing, max concavity violation " + fmt(worst)};
}

// ------------------------------------------------------------------ 9

Outcome stability_suite() {
  std::string detail;
  bool ok = true;
  for (ScanModel model : {ScanModel::Crystal, ScanModel::QuantumNuclei, ScanModel::Movable}) {
    ScanSpec s;
    s.model = model;
    s.sides = {2, 3, 4};
    if (model == ScanModel::QuantumNuclei) {
      s.sites_per_cell = 1;
      s.nuc_cap = 1;
    }
    const ScanResult r = run_scan(s);
    const bool pass = r.reports[0].pass && r.reports[1].pass;
    ok = ok && pass;
    detail += to_string(model) + " e " + fmt(r.variation_e) + " f " + fmt(r.variation_f) + "; ";
  }
  detail.resize(detail.size() - 2);
  return {ok, "floor variation " + detail};
}

// ------------------------------------------------------------------ 10

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism_suite() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "coulab_acceptance";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "gs.json") << R"({"random": {"count": 4}, "ells": [4, 8], "samples": 500})";
    std::ofstream(dir / "scan.json") << R"({"model": "movable", "sides": [1, 2]})";
    std::ofstream(dir / "ssa.json") << R"({"trials": 5})";
  }
  const std::vector<std::string> runs{
      "verify lieb-yau --seed 5",
      "verify graf-schenker --config " + (dir / "gs.json").string() + " --seed 11 --format json",
      "ssa quantum --config " + (dir / "ssa.json").string() + " --seed 3",
      "scan --config " + (dir / "scan.json").string(),
      "verify ims --seed 1",
  };
  int differ = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::string out[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path p = dir / ("run" + std::to_string(i) + "_" + std::to_string(k));
      const std::string cmd =
          std::string(COULAB_CLI_PATH) + " " + runs[i] + " --out " + p.string() + " 2>/dev/null";
      const int rc = std::system(cmd.c_str());
      out[k] = std::to_string(rc) + "\n" + slurp(p.string());
    }
    differ += out[0] != out[1] || out[0].size() < 8;
  }
  return {differ == 0, std::to_string(runs.size() - differ) + "/" + std::to_string(runs.size()) +
                           " CLI runs byte-identical on rerun"};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"lieb-yau suite", lieb_yau_suite},
      {"graf-schenker uniformity", graf_schenker_suite},
      {"quantum strong subadditivity", quantum_ssa_suite},
      {"classical-quantum strong subadditivity", cq_suite},
      {"localization algebra", localization_suite},
      {"li-yau", li_yau_suite},
      {"diamagnetic and peierls", magnetic_suite},
      {"charge concavity and corners", charge_suite},
      {"stability floors", stability_suite},
      {"determinism", determinism_suite},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria pass" << std::endl;
  return strict ? failed : 0;
}
