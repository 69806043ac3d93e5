// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include "doctest.h"

#include "coulab/geometry.hpp"
#include "coulab/rng.hpp"

using namespace coulab;

namespace {

// Barycentric membership, independent of the tiling's own locate().
bool in_tetrahedron(const Tetrahedron& t, const Vec3& x, double tol = 1e-12) {
  Mat3 m;
  for (int i = 0; i < 3; ++i) m.col(i) = t.v[i + 1] - t.v[0];
  const Vec3 b = m.colPivHouseholderQr().solve(x - t.v[0]);
  return b.minCoeff() > -tol && b.sum() < 1 + tol;
}

Domain two_cubes_with_neck() {
  std::vector<Site> s;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        s.push_back({i, j, k});
        s.push_back({i + 5, j, k});
      }
  s.push_back({4, 0, 0});
  return Domain(1.0, 3, s, "neck");
}

}  // namespace

TEST_CASE("cube and ball discretization") {
  const Domain c = build_domain(cube_shape(3.0), 1.0);
  CHECK(c.size() == 27);
  CHECK(c.volume() == doctest::Approx(27.0));
  CHECK(c.boundary().size() == 26);
  const Domain big = build_domain(cube_shape(6.0), 1.0);
  CHECK(big.volume() / c.volume() == doctest::Approx(8.0).epsilon(1e-12));
  CHECK_THROWS_AS(build_domain(ball_shape(0.4), 1.0), Error);
  const Domain b = build_domain(ball_shape(3.0), 1.0);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.position(i).norm() <= 2.5 + 1e-12);
}

TEST_CASE("site lookup") {
  const Domain c = build_domain(cube_shape(4.0), 0.5);
  CHECK(c.size() == 512);
  for (std::size_t i = 0; i < c.size(); i += 37) {
    CHECK(c.index_of(c.site(i)) == static_cast<int>(i));
    CHECK(c.locate(c.position(i) + Vec3(0.2, -0.2, 0.1)) == static_cast<int>(i));
  }
  CHECK(c.locate(Vec3(-3, 0, 0)) == -1);
}

TEST_CASE("cone property") {
  const Domain cube = build_domain(cube_shape(8.0), 1.0);
  CHECK(cone_check(cube, 0.25, 200, 1).pass);
  CHECK(cone_check(two_cubes_with_neck(), 0.9, 0, 1).pass);  // vacuous
  const ConeResult neck = cone_check(two_cubes_with_neck(), 0.9, 2000, 1);
  CHECK_FALSE(neck.pass);
  CHECK(neck.points_checked > 0);
}

TEST_CASE("boundary layer profile") {
  const Domain c = build_domain(cube_shape(10.0), 1.0);
  const auto prof = regularity_profile(c, {0.0, 0.1, 0.25, 10.0});
  CHECK(prof.eta_samples[0].second == doctest::Approx(0.488));
  CHECK(prof.eta_samples[1].second == doctest::Approx(0.488));
  // distance < 2.5 to the boundary shell: all but the central 4^3 block
  CHECK(prof.eta_samples[2].second == doctest::Approx((1000.0 - 64.0) / 1000.0));
  CHECK(prof.eta_samples[3].second == doctest::Approx(1.0));
  CHECK(prof.bounding_box_volume >= c.volume());
  CHECK_THROWS_AS(regularity_profile(c, {0.3, 0.1}), Error);
}

TEST_CASE("24-piece tiling of the unit cube") {
  const Tiling& t = default_tiling();
  REQUIRE(t.pieces.size() == 24);
  for (int p = 0; p < 24; ++p) {
    CHECK(t.pieces[p].volume() == doctest::Approx(1.0 / 24).epsilon(1e-14));
    CHECK((t.rotations[p].transpose() * t.rotations[p] - Mat3::Identity()).norm() < 1e-14);
    CHECK(t.rotations[p].determinant() == doctest::Approx(1.0));
    for (int i = 0; i < 4; ++i)
      CHECK((t.pieces[p].v[i] - t.rotations[p] * t.base.v[i]).norm() < 1e-15);
  }
  std::set<std::vector<long>> distinct;
  for (const auto& r : t.rotations) {
    std::vector<long> key;
    for (int i = 0; i < 9; ++i) key.push_back(std::lround(r.data()[i]));
    distinct.insert(key);
  }
  CHECK(distinct.size() == 24);

  // multiplicity histogram over uniform points of the cube
  Rng rng(5);
  int bad = 0;
  const int n = 100000;
  for (int s = 0; s < n; ++s) {
    const Vec3 x(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    int hits = 0;
    for (const auto& piece : t.pieces) hits += in_tetrahedron(piece, x, -1e-12);
    bad += hits != 1;
  }
  CHECK(bad < n / 1000);
  CHECK_THROWS_AS(unit_cube_tiling(Vec3(0.3, 0.3, 0.3)), Error);
}

TEST_CASE("tile location agrees with barycentric membership") {
  const Tiling& t = default_tiling();
  const auto gs = sample_group(11, 200, 3.0);
  Rng rng(12);
  int bad = 0;
  for (const auto& g : gs) {
    const Vec3 x(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    const double ell = 3.0;
    const TileId id = t.locate(g, ell, x);
    const Tetrahedron tet = t.tile(g, ell, id);
    if (!in_tetrahedron(tet, x, 1e-9)) ++bad;
    // depth never exceeds the inradius 3V / (surface area)
    double area = 0;
    for (int f = 0; f < 4; ++f) {
      const Vec3& a = tet.v[(f + 1) % 4];
      area += 0.5 * (tet.v[(f + 2) % 4] - a).cross(tet.v[(f + 3) % 4] - a).norm();
    }
    const double depth = t.depth(g, ell, x);
    CHECK(depth >= 0.0);
    CHECK(depth <= 3 * tet.volume() / area + 1e-12);
  }
  CHECK(bad == 0);
}

TEST_CASE("group samples") {
  const auto a = sample_group(3, 4000);
  const auto b = sample_group(3, 4000);
  Mat3 mean = Mat3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i].rotation.transpose() * a[i].rotation - Mat3::Identity()).norm() < 1e-12);
    CHECK(a[i].rotation == b[i].rotation);
    CHECK(a[i].translation == b[i].translation);
    mean += a[i].rotation;
  }
  mean /= static_cast<double>(a.size());
  // Haar entries have variance 1/3
  const double sigma = std::sqrt(1.0 / 3.0 / a.size());
  CHECK(mean.cwiseAbs().maxCoeff() < 4 * sigma);

  // g x0 for x0 = 0 is R s, so R^T (g 0) is uniform on the unit cell: chi^2 on 8 octants
  std::array<int, 8> counts{};
  for (const auto& g : a) {
    const Vec3 s = g.rotation.transpose() * g.apply(Vec3::Zero());
    counts[(s(0) > 0.5) + 2 * (s(1) > 0.5) + 4 * (s(2) > 0.5)]++;
  }
  double chi2 = 0;
  for (int c : counts) chi2 += (c - 500.0) * (c - 500.0) / 500.0;
  CHECK(chi2 < 18.48);  // 1% critical value, 7 dof
}

TEST_CASE("smoothed indicators") {
  const Tiling& t = default_tiling();
  const GroupElement g = sample_group(21, 1)[0];
  const double ell = 4.0, r = 0.1;
  const TileId mu = t.locate(g, ell, g.apply(Vec3(0.3, 0.2, 0.1)));
  const SmoothedIndicator th(g, ell, mu, r);
  const Tetrahedron tet = t.tile(g, ell, mu);
  CHECK(th(tet.barycenter()) == doctest::Approx(1.0).epsilon(1e-9));
  // a point 2r outside the tile along the outward direction from the barycenter
  const Vec3 c = tet.barycenter();
  Vec3 far = c;
  for (double s = 1.0; s < 10.0; s += 0.01) {
    far = c + s * (tet.v[0] - c);
    if (point_tetrahedron_distance(far, tet) >= 2 * r) break;
  }
  CHECK(th(far) == 0.0);
  CHECK(th.integral_squared() == doctest::Approx(tet.volume()).epsilon(1e-6));
  CHECK(tet.volume() == doctest::Approx(ell * ell * ell / 24));

  // partition of unity at random points
  const Mollifier j(r);
  Rng rng(4);
  double worst = 0;
  for (int s = 0; s < 300; ++s) {
    const Vec3 x(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4));
    double sum = 0;
    for (const auto& [id, w] : tile_weights(t, g, ell, j, x)) sum += w;
    worst = std::max(worst, std::abs(sum - 1));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("inner approximation") {
  const Domain c = build_domain(cube_shape(12.0), 1.0);
  const Domain a1 = inner_approximation(c, 1.0, 0.1);
  const Domain a2 = inner_approximation(c, 2.0, 0.1);
  CHECK(a1.size() <= c.size());
  for (const auto& s : a1.sites()) CHECK(c.contains(s));
  CHECK(a2.size() <= a1.size());
  const Domain none = inner_approximation(c, 100.0, 0.1);
  CHECK(none.empty());
  CHECK(none.warning());
}
