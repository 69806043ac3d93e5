// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "coulab/model.hpp"
#include "coulab/scan.hpp"

using namespace coulab;

TEST_CASE("floor variation") {
  CHECK(floor_variation({}) == 0.0);
  CHECK(floor_variation({-1.0}) == 0.0);
  CHECK(floor_variation({-1.0, -1.1}) == doctest::Approx(0.1));
  // the running minimum does not move when the last value is larger
  CHECK(floor_variation({-1.0, -1.2, -0.5}) == 0.0);
}

TEST_CASE("scan geometry") {
  ScanSpec s;
  const Domain d = s.domain(3);
  CHECK(d.size() == 6);
  CHECK(d.dim() == 1);
  const NucleiConfig k = s.nuclei(3, false);
  REQUIRE(k.size() == 3);
  CHECK(k.nuclei[0].R(0) == doctest::Approx(0.5));
  CHECK(k.nuclei[2].R(0) == doctest::Approx(4.5));
  CHECK_NOTHROW(check_regularization(d, k));
  s.added.push_back({Vec3(0, 0.6, 0), 1.0});
  CHECK(s.nuclei(3, true).size() == 4);

  ScanSpec bad;
  bad.sides = {3, 2};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.sides = {};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("crystal scan") {
  ScanSpec s;
  s.sides = {1, 2, 3};
  const ScanResult r = run_scan(s);
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) {
    CHECK_FALSE(row.skipped);
    CHECK(std::isfinite(row.e));
    CHECK(row.free_energy <= row.energy + 1e-9);
    CHECK(row.e == doctest::Approx(row.energy / row.volume));
  }
  // direct evaluation of the smallest size
  const GrandHamiltonian h = coulomb_hamiltonian(s.domain(1), s.nuclei(1, false), no_field());
  CHECK(r.rows[0].energy == doctest::Approx(ground_state_energy(h).value).epsilon(1e-9));
  CHECK(r.reports.size() == 2);
  CHECK(std::isfinite(r.floor_e));
}

TEST_CASE("budget gate") {
  ScanSpec s;
  s.sides = {1, 20};
  s.max_dim = 1000;
  const ScanResult r = run_scan(s);
  CHECK(r.partial);
  CHECK(r.rows[1].skipped);
  CHECK_FALSE(r.reports[0].pass);
  CHECK(scan_cost(s, 20) == doctest::Approx(std::pow(2.0, 40)));
}

TEST_CASE("other models run") {
  ScanSpec q;
  q.model = ScanModel::QuantumNuclei;
  q.sites_per_cell = 1;
  q.nuc_cap = 1;
  q.sides = {2, 3};
  const ScanResult rq = run_scan(q);
  for (const auto& row : rq.rows) CHECK(std::isfinite(row.energy));

  ScanSpec m;
  m.model = ScanModel::Movable;
  m.sides = {1, 2};
  const ScanResult rm = run_scan(m);
  for (const auto& row : rm.rows) {
    CHECK(row.energy <= 0.0);
    CHECK(std::isfinite(row.free_energy));
  }
}

TEST_CASE("perturbation comparison") {
  ScanSpec s;
  s.sides = {2, 3, 4};
  const PerturbationComparison none = perturbation_compare(s);
  for (double r : none.ratio) CHECK(r == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(none.report.pass);
  s.added.push_back({Vec3(0, 0.6, 0), 1.0});
  const PerturbationComparison pc = perturbation_compare(s);
  CHECK(pc.ratio.size() == 3);
  for (double r : pc.ratio) CHECK(r > 0.0);
  CHECK(pc.report.pass);
  ScanSpec q;
  q.model = ScanModel::Movable;
  CHECK_THROWS_AS(perturbation_compare(q), Error);
}
