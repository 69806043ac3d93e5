// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "coulab/fock.hpp"
#include "coulab/linalg.hpp"
#include "coulab/rng.hpp"

using namespace coulab;

namespace {

CMat dense(const RSpMat& m) { return CMat(m.cast<cplx>()); }
CMat dense(const SpMat& m) { return CMat(m); }

CMat random_hermitian(int n, Rng& rng) {
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(rng.normal(), rng.normal());
  return (a + a.adjoint()) / 2.0;
}

double entropy_oracle(const CMat& g) {
  Eigen::SelfAdjointEigenSolver<CMat> es(g);
  double s = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-14) s -= l * std::log(l);
  }
  return s;
}

}  // namespace

TEST_CASE("space dimensions and caps") {
  CHECK(build_space(2, Statistics::Fermion).dim == 4);
  CHECK(build_space(2, Statistics::Boson, 2).dim == 9);
  CHECK_THROWS_AS(build_space(20, Statistics::Fermion), Error);
  CHECK_THROWS_AS(build_space(30, Statistics::Boson, 4), Error);
  const FockSpace s = build_space(5, Statistics::Boson, 2);
  std::int64_t total = 0;
  for (int n = 0; n <= s.max_particles(); ++n) {
    total += static_cast<std::int64_t>(s.sector(n).size());
    CHECK(sector_dimension(5, Statistics::Boson, 2, n) == doctest::Approx(s.sector(n).size()));
  }
  CHECK(total == s.dim);
  for (std::int64_t b = 0; b < s.dim; ++b) CHECK(s.index_of(s.occupations(b)) == b);
}

TEST_CASE("canonical anticommutation relations") {
  const FockSpace s = build_space(4, Statistics::Fermion);
  const CMat id = CMat::Identity(s.dim, s.dim);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const CMat ai = dense(ladder(s, i, LadderKind::Annihilate));
      const CMat aj = dense(ladder(s, j, LadderKind::Annihilate));
      const CMat ajd = dense(ladder(s, j, LadderKind::Create));
      CHECK((ai * ajd + ajd * ai - (i == j ? id : CMat::Zero(s.dim, s.dim))).norm() < 1e-14);
      CHECK((ai * aj + aj * ai).norm() < 1e-14);
    }
  CVec vac = CVec::Zero(s.dim);
  vac(0) = 1;
  for (int i = 0; i < 4; ++i) CHECK((dense(ladder(s, i, LadderKind::Annihilate)) * vac).norm() == 0.0);
}

TEST_CASE("commutation relations below the boson cap") {
  const FockSpace s = build_space(2, Statistics::Boson, 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const CMat a = dense(ladder(s, i, LadderKind::Annihilate));
      const CMat ad = dense(ladder(s, j, LadderKind::Create));
      const CMat c = a * ad - ad * a;
      for (std::int64_t b = 0; b < s.dim; ++b) {
        const auto occ = s.occupations(b);
        if (occ[0] >= 3 || occ[1] >= 3) continue;
        for (std::int64_t b2 = 0; b2 < s.dim; ++b2)
          CHECK(std::abs(c(b2, b) - (i == j && b == b2 ? 1.0 : 0.0)) < 1e-14);
      }
    }
}

TEST_CASE("one-body second quantization") {
  Rng rng(7);
  const FockSpace s = build_space(4, Statistics::Fermion);
  CHECK((dense(second_quantize_onebody(s, CMat::Identity(4, 4))) - dense(number_operator(s))).norm() < 1e-14);
  CMat d = CMat::Zero(4, 4);
  const double eps[4] = {0.3, -1.0, 2.0, 0.7};
  for (int i = 0; i < 4; ++i) d(i, i) = eps[i];
  const CMat hd = dense(second_quantize_onebody(s, d));
  for (std::int64_t b = 0; b < s.dim; ++b) {
    double e = 0;
    for (int i = 0; i < 4; ++i) e += eps[i] * s.occupation(b, i);
    CHECK(std::abs(hd(b, b) - e) < 1e-14);
  }
  const CMat h = random_hermitian(4, rng);
  const CMat H = dense(second_quantize_onebody(s, h));
  const CMat N = dense(number_operator(s));
  CHECK((H * N - N * H).norm() < 1e-12);
  const auto one = s.sector(1);
  CMat block(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) block(a, b) = H(one[a], one[b]);
  CHECK((eigvalsh(block) - eigvalsh(h)).norm() < 1e-12);
  CHECK_THROWS_AS(second_quantize_onebody(s, CMat::Random(4, 4)), Error);

  // sector restriction matches the full-space operator
  const SectorBasis sb(4, Statistics::Fermion, 1, 2);
  const CMat hs = dense(sector_onebody(sb, h));
  const auto two = s.sector(2);
  for (std::size_t a = 0; a < sb.size(); ++a) {
    std::vector<int> occ(sb.occupation(a).begin(), sb.occupation(a).end());
    const auto ia = s.index_of(occ);
    for (std::size_t b = 0; b < sb.size(); ++b) {
      std::vector<int> occb(sb.occupation(b).begin(), sb.occupation(b).end());
      CHECK(std::abs(hs(a, b) - H(ia, s.index_of(occb))) < 1e-12);
    }
  }
  CHECK(two.size() == sb.size());
}

TEST_CASE("pair term") {
  RMat w(3, 3);
  w << 5, 1, 2, 1, 5, 3, 2, 3, 5;
  const FockSpace f = build_space(3, Statistics::Fermion);
  const CMat W = dense(second_quantize_twobody(f, w));
  CHECK(W(f.index_of({1, 0, 1}), f.index_of({1, 0, 1})).real() == doctest::Approx(2.0));
  CHECK(W(f.index_of({0, 1, 0}), f.index_of({0, 1, 0})).real() == 0.0);
  const FockSpace b = build_space(3, Statistics::Boson, 3);
  const CMat Wb = dense(second_quantize_twobody(b, w));
  CHECK(Wb(b.index_of({3, 0, 0}), b.index_of({3, 0, 0})).real() == doctest::Approx(15.0));
}

TEST_CASE("entropy") {
  Rng rng(9);
  const FockSpace s = build_space(2, Statistics::Fermion);
  CVec psi = CVec::Random(4);
  psi.normalize();
  CHECK(std::abs(entropy(pure_state(s, psi))) < 1e-10);
  CHECK(entropy(make_state(s, CMat::Identity(4, 4) / 4.0)) == doctest::Approx(std::log(4.0)));
  const CMat g1 = random_density(4, rng), g2 = random_density(3, rng);
  CMat prod(12, 12);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) prod.block(3 * i, 3 * j, 3, 3) = g1(i, j) * g2;
  CHECK(entropy(prod) == doctest::Approx(entropy(g1) + entropy(g2)).epsilon(1e-10));
  CHECK(entropy(g1) == doctest::Approx(entropy_oracle(g1)).epsilon(1e-12));

  // concavity
  for (int t = 0; t < 100; ++t) {
    const CMat a = random_density(8, rng), b = random_density(8, rng, 2);
    for (double x : {0.25, 0.5, 0.75})
      CHECK(entropy(CMat(x * a + (1 - x) * b)) >= x * entropy(a) + (1 - x) * entropy(b) - 1e-10);
  }
}

TEST_CASE("state validation") {
  const FockSpace s = build_space(2, Statistics::Fermion);
  CHECK_THROWS_AS(make_state(s, CMat::Identity(4, 4)), Error);
  CMat neg = CMat::Zero(4, 4);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(make_state(s, neg), Error);
  CMat coh = CMat::Identity(4, 4) / 4.0;
  coh(0, 1) = coh(1, 0) = 0.1;
  const FockState g = make_state(s, coh);
  CHECK_FALSE(g.commutes_with_number());
}

TEST_CASE("reduced density matrices") {
  Rng rng(3);
  const FockSpace s = build_space(4, Statistics::Fermion);
  CVec psi = CVec::Zero(s.dim);
  psi(s.index_of({1, 1, 0, 0})) = 1;
  const CMat g1 = reduced_density(pure_state(s, psi), 1);
  CMat proj = CMat::Zero(4, 4);
  proj(0, 0) = proj(1, 1) = 1;
  CHECK((g1 - proj).norm() < 1e-14);
  CVec vac = CVec::Zero(s.dim);
  vac(0) = 1;
  CHECK(reduced_density(pure_state(s, vac), 1).norm() == 0.0);

  CVec two = CVec::Zero(s.dim);
  for (auto b : s.sector(2)) two(b) = cplx(rng.normal(), rng.normal());
  two.normalize();
  const FockState g = pure_state(s, two);
  CHECK(reduced_density(g, 1).trace().real() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(reduced_density(g, 2).trace().real() == doctest::Approx(2.0).epsilon(1e-12));

  // contraction oracle: gamma(i, j) = <a_j^dagger a_i>
  const CMat G = random_density(static_cast<int>(s.dim), rng);
  const CMat r1 = reduced_density(s, G, 1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const CMat op = dense(ladder(s, j, LadderKind::Create)) * dense(ladder(s, i, LadderKind::Annihilate));
      CHECK(std::abs(r1(i, j) - (G * op).trace()) < 1e-12);
    }
  CHECK(r1.trace().real() == doctest::Approx((G * dense(number_operator(s))).trace().real()));
}

TEST_CASE("split isomorphism") {
  Rng rng(2);
  const FockSpace s = build_space(4, Statistics::Fermion);
  const std::vector<int> first{0, 2};
  const CMat u = dense(split_isomorphism(s, first));
  CHECK((u.adjoint() * u - CMat::Identity(16, 16)).norm() < 1e-12);
  // a^dagger(e_0)|0> -> (a^dagger e_0 |0>) (x) |0>, index 1 * 4 + 0
  CVec e0 = CVec::Zero(16);
  e0(s.index_of({1, 0, 0, 0})) = 1;
  const CVec img = u * e0;
  CHECK(std::abs(img(4) - 1.0) < 1e-14);

  // a state supported on the first factor survives the partial trace
  const CMat g1 = random_density(4, rng);
  CMat full = CMat::Zero(16, 16);
  const FockSpace sub = build_space(2, Statistics::Fermion);
  for (std::int64_t a = 0; a < 4; ++a)
    for (std::int64_t b = 0; b < 4; ++b) {
      const auto oa = sub.occupations(a), ob = sub.occupations(b);
      full(s.index_of({oa[0], 0, oa[1], 0}), s.index_of({ob[0], 0, ob[1], 0})) = g1(a, b);
    }
  const CMat back = partial_trace(u * full * u.adjoint(), 4, 4, 1);
  CHECK((back - g1).norm() < 1e-12);
}
