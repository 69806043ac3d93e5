// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include "coulab/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "coulab/rng.hpp"

namespace coulab {

// ---------------------------------------------------------------- Domain

Domain::Domain(double spacing, int dim, std::vector<Site> sites,
               std::string label)
    : a_(spacing), dim_(dim), label_(std::move(label)), sites_(std::move(sites)) {
  if (!(spacing > 0)) throw Error("domain: spacing must be positive");
  if (dim < 1 || dim > 3) throw Error("domain: dim must be 1, 2 or 3");
  for (auto& s : sites_)
    for (int ax = dim_; ax < 3; ++ax)
      if (s[ax] != 0) throw Error("domain: site outside the active axes");
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  lookup_.reserve(sites_.size() * 2);
  for (std::size_t i = 0; i < sites_.size(); ++i)
    lookup_.emplace(key(sites_[i]), static_cast<int>(i));
  is_boundary_.assign(sites_.size(), 0);
  const auto offs = neighbor_offsets();
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    for (const auto& o : offs) {
      Site nb{sites_[i][0] + o[0], sites_[i][1] + o[1], sites_[i][2] + o[2]};
      if (!contains(nb)) {
        is_boundary_[i] = 1;
        boundary_.push_back(static_cast<int>(i));
        break;
      }
    }
  }
}

std::uint64_t Domain::key(const Site& s) {
  constexpr std::int64_t off = 1 << 20;
  auto u = [](int v) { return static_cast<std::uint64_t>(v + off) & 0x1fffffULL; };
  return (u(s[0]) << 42) | (u(s[1]) << 21) | u(s[2]);
}

Vec3 Domain::position(std::size_t i) const {
  const auto& s = sites_[i];
  return Vec3(s[0], s[1], s[2]) * a_;
}

int Domain::index_of(const Site& s) const {
  auto it = lookup_.find(key(s));
  return it == lookup_.end() ? -1 : it->second;
}

int Domain::locate(const Vec3& x) const {
  Site s{static_cast<int>(std::lround(x(0) / a_)),
         static_cast<int>(std::lround(x(1) / a_)),
         static_cast<int>(std::lround(x(2) / a_))};
  return index_of(s);
}

std::vector<Site> Domain::neighbor_offsets() const {
  std::vector<Site> out;
  for (int ax = 0; ax < dim_; ++ax)
    for (int sgn : {-1, 1}) {
      Site o{0, 0, 0};
      o[ax] = sgn;
      out.push_back(o);
    }
  return out;
}

double Domain::volume() const {
  return std::pow(a_, dim_) * static_cast<double>(sites_.size());
}

ShapeSpec cube_shape(double side, int dim) {
  ShapeSpec s;
  s.kind = ShapeKind::Cube;
  s.side = side;
  s.dim = dim;
  return s;
}

ShapeSpec ball_shape(double radius, const Vec3& center) {
  ShapeSpec s;
  s.kind = ShapeKind::Ball;
  s.radius = radius;
  s.center = center;
  return s;
}

Domain build_domain(const ShapeSpec& spec, double a) {
  if (!(a > 0)) throw Error("build_domain: spacing must be positive");
  const int dim = spec.dim;
  if (dim < 1 || dim > 3) throw Error("build_domain: dim must be 1, 2 or 3");
  std::vector<Site> sites;
  std::string label = spec.label;
  switch (spec.kind) {
    case ShapeKind::Cube:
    case ShapeKind::Box: {
      std::array<int, 3> m{1, 1, 1};
      for (int ax = 0; ax < dim; ++ax) {
        const double len = spec.kind == ShapeKind::Cube ? spec.side : spec.extent(ax);
        m[ax] = static_cast<int>(std::lround(len / a));
      }
      if (m[0] < 1 || m[1] < 1 || m[2] < 1) throw Error("degenerate domain");
      for (int i = 0; i < m[0]; ++i)
        for (int j = 0; j < m[1]; ++j)
          for (int k = 0; k < m[2]; ++k) sites.push_back({i, j, k});
      if (label.empty()) label = spec.kind == ShapeKind::Cube ? "cube" : "box";
      break;
    }
    case ShapeKind::Ball: {
      const double rr = spec.radius - 0.5 * a;
      if (rr < 0) throw Error("degenerate domain");
      std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
      for (int ax = 0; ax < dim; ++ax) {
        lo[ax] = static_cast<int>(std::floor((spec.center(ax) - spec.radius) / a)) - 1;
        hi[ax] = static_cast<int>(std::ceil((spec.center(ax) + spec.radius) / a)) + 1;
      }
      for (int i = lo[0]; i <= hi[0]; ++i)
        for (int j = lo[1]; j <= hi[1]; ++j)
          for (int k = lo[2]; k <= hi[2]; ++k) {
            Vec3 x(i * a, j * a, k * a);
            Vec3 c = spec.center;
            for (int ax = dim; ax < 3; ++ax) c(ax) = 0;
            if ((x - c).norm() <= rr + 1e-12 * a) sites.push_back({i, j, k});
          }
      if (label.empty()) label = "ball";
      break;
    }
    case ShapeKind::Custom:
      sites = spec.sites;
      if (label.empty()) label = "custom";
      break;
  }
  if (sites.empty()) throw Error("degenerate domain");
  return Domain(a, dim, std::move(sites), label);
}

// ------------------------------------------------------------- cone check

namespace {

Vec3 project_active(Vec3 v, int dim) {
  for (int ax = dim; ax < 3; ++ax) v(ax) = 0;
  return v;
}

std::vector<Vec3> cone_directions(int dim, Rng& rng) {
  std::vector<Vec3> dirs;
  const int lim = 1;
  for (int i = -lim; i <= lim; ++i)
    for (int j = (dim >= 2 ? -lim : 0); j <= (dim >= 2 ? lim : 0); ++j)
      for (int k = (dim >= 3 ? -lim : 0); k <= (dim >= 3 ? lim : 0); ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        dirs.push_back(Vec3(i, j, k).normalized());
      }
  if (dim > 1) {
    for (int r = 0; r < 50; ++r) {
      Vec3 v = project_active(Vec3(rng.normal(), rng.normal(), rng.normal()), dim);
      if (v.norm() < 1e-12) continue;
      dirs.push_back(v.normalized());
    }
  }
  return dirs;
}

// Sample points of the cone with apex x, axis d, radius eps.
std::vector<Vec3> cone_points(const Vec3& x, const Vec3& d, double eps, int dim) {
  std::vector<Vec3> rays{d};
  const double alpha = 0.999 * std::acos(std::max(-1.0, 1.0 - eps * eps));
  if (dim >= 2) {
    Vec3 e1, e2;
    if (dim == 2) {
      e1 = Vec3(-d(1), d(0), 0).normalized();
      rays.push_back(std::cos(alpha) * d + std::sin(alpha) * e1);
      rays.push_back(std::cos(alpha) * d - std::sin(alpha) * e1);
    } else {
      Vec3 t = std::abs(d(0)) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
      e1 = d.cross(t).normalized();
      e2 = d.cross(e1);
      for (int k = 0; k < 8; ++k) {
        const double phi = 2.0 * kPi * k / 8.0;
        rays.push_back(std::cos(alpha) * d +
                       std::sin(alpha) * (std::cos(phi) * e1 + std::sin(phi) * e2));
      }
    }
  }
  std::vector<Vec3> pts;
  for (const auto& u : rays)
    for (double f : {0.25, 0.5, 0.75, 1.0}) pts.push_back(x + (f * eps * (1 - 1e-9)) * u);
  return pts;
}

}  // namespace

ConeResult cone_check(const Domain& omega, double eps, int n_samples,
                      std::uint64_t seed) {
  if (omega.empty()) throw Error("degenerate domain");
  if (!(eps > 0 && eps < 1)) throw Error("cone_check: eps must lie in (0,1)");
  ConeResult res;
  if (n_samples <= 0 || omega.boundary().empty()) return res;
  Rng rng(seed);
  const auto dirs = cone_directions(omega.dim(), rng);
  const auto offs = omega.neighbor_offsets();
  const double a = omega.spacing();
  const int dim = omega.dim();
  for (int s = 0; s < n_samples; ++s) {
    const auto& bnd = omega.boundary();
    const int b = bnd[rng.integer(0, static_cast<int>(bnd.size()) - 1)];
    Vec3 x = omega.position(b);
    if (s % 2 == 1) {
      std::vector<Site> missing;
      const auto& st = omega.site(b);
      for (const auto& o : offs) {
        Site nb{st[0] + o[0], st[1] + o[1], st[2] + o[2]};
        if (!omega.contains(nb)) missing.push_back(o);
      }
      const auto& o = missing[rng.integer(0, static_cast<int>(missing.size()) - 1)];
      x += a * Vec3(o[0], o[1], o[2]);
    }
    for (int ax = 0; ax < dim; ++ax) x(ax) += a * rng.uniform(-0.5, 0.5);
    const bool inside = omega.locate(x) >= 0;
    bool ok = false;
    for (const auto& d : dirs) {
      bool all = true;
      for (const auto& y : cone_points(x, d, eps, dim)) {
        if ((omega.locate(y) >= 0) != inside) {
          all = false;
          break;
        }
      }
      if (all) {
        ok = true;
        break;
      }
    }
    ++res.points_checked;
    if (!ok) {
      res.pass = false;
      res.witness = x;
      res.witness_in_complement = !inside;
      return res;
    }
  }
  return res;
}

RegularityProfile regularity_profile(const Domain& omega,
                                     const std::vector<double>& t_grid) {
  if (omega.empty()) throw Error("degenerate domain");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0) throw Error("regularity_profile: t must be nonnegative");
    if (i > 0 && t_grid[i] < t_grid[i - 1])
      throw Error("regularity_profile: t_grid must be sorted");
  }
  RegularityProfile prof;
  const double a = omega.spacing();
  const std::size_t n = omega.size();
  const auto& bnd = omega.boundary();
  // Squared lattice distance to the nearest boundary site.
  std::vector<long> d2(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (omega.is_boundary(i)) continue;
    long best = std::numeric_limits<long>::max();
    const auto& s = omega.site(i);
    for (int b : bnd) {
      const auto& t = omega.site(b);
      long dx = s[0] - t[0], dy = s[1] - t[1], dz = s[2] - t[2];
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    d2[i] = best;
  }
  const double scale = std::pow(omega.volume(), 1.0 / omega.dim());
  for (double t : t_grid) {
    const double thr = t * scale / a;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (omega.is_boundary(i) || std::sqrt(static_cast<double>(d2[i])) < thr) ++cnt;
    prof.eta_samples.emplace_back(t, static_cast<double>(cnt) / n);
  }
  for (int k = 19; k >= 1; --k) {
    const double eps = k / 20.0;
    if (cone_check(omega, eps, 200, 7).pass) {
      prof.cone_epsilon = eps;
      break;
    }
  }
  double diam2 = 0;
  for (std::size_t i = 0; i < bnd.size(); ++i)
    for (std::size_t j = i + 1; j < bnd.size(); ++j)
      diam2 = std::max(diam2, (omega.position(bnd[i]) - omega.position(bnd[j])).squaredNorm());
  prof.diam_ratio = std::sqrt(diam2) / scale;
  Site lo = omega.site(0), hi = omega.site(0);
  for (const auto& s : omega.sites())
    for (int ax = 0; ax < 3; ++ax) {
      lo[ax] = std::min(lo[ax], s[ax]);
      hi[ax] = std::max(hi[ax], s[ax]);
    }
  prof.bounding_box_volume = 1.0;
  for (int ax = 0; ax < omega.dim(); ++ax)
    prof.bounding_box_volume *= (hi[ax] - lo[ax] + 1) * a;
  return prof;
}

// ---------------------------------------------------------------- tiling

double Tetrahedron::volume() const {
  Mat3 m;
  m.col(0) = v[1] - v[0];
  m.col(1) = v[2] - v[0];
  m.col(2) = v[3] - v[0];
  return std::abs(m.determinant()) / 6.0;
}

Vec3 Tetrahedron::barycenter() const { return (v[0] + v[1] + v[2] + v[3]) / 4.0; }

std::size_t TileIdHash::operator()(const TileId& t) const {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(t.piece));
  for (int c : t.cell) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
  return static_cast<std::size_t>(h);
}

namespace {

// Piece index from (dominant axis, its sign, second axis slot, its sign).
int piece_index(int a, bool neg_a, int b_slot, bool neg_b) {
  return ((a * 2 + (neg_a ? 1 : 0)) * 2 + b_slot) * 2 + (neg_b ? 1 : 0);
}

bool inside_base(const Vec3& q, double tol) {
  return q(1) - q(2) > tol && q(1) + q(2) > tol && q(0) - q(1) > tol && 0.5 - q(0) > tol;
}

}  // namespace

Vec3 default_tiling_shift() { return Vec3(-0.375, -0.25, 0.0); }

Tiling unit_cube_tiling(const Vec3& v) {
  Tiling t;
  t.base.v = {Vec3(0, 0, 0), Vec3(0.5, 0, 0), Vec3(0.5, 0.5, 0.5), Vec3(0.5, 0.5, -0.5)};
  if (!v.allFinite() || !inside_base(-v, 1e-12))
    throw Error("unit_cube_tiling: shift must place 0 inside the base tetrahedron");
  t.shift = v;
  t.rotations.resize(24);
  t.pieces.resize(24);
  for (int a = 0; a < 3; ++a)
    for (int na = 0; na < 2; ++na)
      for (int slot = 0; slot < 2; ++slot)
        for (int nb = 0; nb < 2; ++nb) {
          const int b = slot == 0 ? (a == 0 ? 1 : 0) : (a == 2 ? 1 : 2);
          Vec3 ea = Vec3::Unit(a) * (na ? -1.0 : 1.0);
          Vec3 eb = Vec3::Unit(b) * (nb ? -1.0 : 1.0);
          Mat3 w;
          w.col(0) = ea;
          w.col(1) = eb;
          w.col(2) = ea.cross(eb);
          const int p = piece_index(a, na, slot, nb);
          t.rotations[p] = w;
          for (int i = 0; i < 4; ++i) t.pieces[p].v[i] = w * t.base.v[i];
        }
  return t;
}

const Tiling& default_tiling() {
  static const Tiling t = unit_cube_tiling(default_tiling_shift());
  return t;
}

namespace {

struct LocalPoint {
  TileId id;
  Vec3 q;  // coordinates in the base frame
};

LocalPoint local_point(const Tiling& tiling, const GroupElement& g, double ell,
                       const Vec3& x) {
  Vec3 y = g.apply_inverse(x) / ell - tiling.shift;
  LocalPoint lp;
  Vec3 p;
  for (int ax = 0; ax < 3; ++ax) {
    const double k = std::floor(y(ax) + 0.5);
    lp.id.cell[ax] = static_cast<int>(k);
    p(ax) = y(ax) - k;
  }
  int a = 0;
  for (int ax = 1; ax < 3; ++ax)
    if (std::abs(p(ax)) > std::abs(p(a))) a = ax;
  const int b0 = a == 0 ? 1 : 0;
  const int b1 = a == 2 ? 1 : 2;
  const int slot = std::abs(p(b1)) > std::abs(p(b0)) ? 1 : 0;
  const int b = slot == 0 ? b0 : b1;
  lp.id.piece = piece_index(a, p(a) < 0, slot, p(b) < 0);
  lp.q = tiling.rotations[lp.id.piece].transpose() * p;
  return lp;
}

}  // namespace

TileId Tiling::locate(const GroupElement& g, double ell, const Vec3& x) const {
  return local_point(*this, g, ell, x).id;
}

double Tiling::depth(const GroupElement& g, double ell, const Vec3& x) const {
  const Vec3 q = local_point(*this, g, ell, x).q;
  const double r2 = std::sqrt(0.5);
  double d = std::min({(q(1) - q(2)) * r2, (q(1) + q(2)) * r2, (q(0) - q(1)) * r2, 0.5 - q(0)});
  return std::max(0.0, d) * ell;
}

Tetrahedron Tiling::tile(const GroupElement& g, double ell, const TileId& t) const {
  Tetrahedron out;
  const Vec3 k(t.cell[0], t.cell[1], t.cell[2]);
  for (int i = 0; i < 4; ++i)
    out.v[i] = g.apply(ell * (rotations[t.piece] * base.v[i] + k + shift));
  return out;
}

std::vector<GroupElement> sample_group(std::uint64_t seed, int n, double cell_scale) {
  if (n < 1) throw Error("sample_group: n must be at least 1");
  Rng rng(seed);
  std::vector<GroupElement> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
    const double s1 = std::sqrt(1 - u1), s2 = std::sqrt(u1);
    Eigen::Quaterniond q(s2 * std::cos(2 * kPi * u3), s1 * std::sin(2 * kPi * u2),
                         s1 * std::cos(2 * kPi * u2), s2 * std::sin(2 * kPi * u3));
    GroupElement g;
    g.rotation = q.normalized().toRotationMatrix();
    Vec3 s(rng.uniform(), rng.uniform(), rng.uniform());
    g.translation = g.rotation * (cell_scale * s);
    out.push_back(g);
  }
  return out;
}

// ------------------------------------------------------ smoothed indicator

Mollifier::Mollifier(double r, int grid) : radius(r) {
  if (!(r > 0)) throw Error("mollifier: radius must be positive");
  double total = 0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j)
      for (int k = 0; k < grid; ++k) {
        Vec3 y(-1 + (2 * i + 1.0) / grid, -1 + (2 * j + 1.0) / grid, -1 + (2 * k + 1.0) / grid);
        const double s = y.squaredNorm();
        if (s >= 1) continue;
        const double w = std::pow(1 - s, 4);
        nodes.push_back(r * y);
        weights.push_back(w);
        total += w;
      }
  for (auto& w : weights) w /= total;
}

std::vector<std::pair<TileId, double>> tile_weights(const Tiling& tiling,
                                                    const GroupElement& g,
                                                    double ell,
                                                    const Mollifier& j,
                                                    const Vec3& x) {
  std::vector<std::pair<TileId, double>> out;
  if (tiling.depth(g, ell, x) > j.radius) {
    out.emplace_back(tiling.locate(g, ell, x), 1.0);
    return out;
  }
  for (std::size_t q = 0; q < j.nodes.size(); ++q) {
    const TileId t = tiling.locate(g, ell, x - j.nodes[q]);
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == t; });
    if (it == out.end())
      out.emplace_back(t, j.weights[q]);
    else
      it->second += j.weights[q];
  }
  std::sort(out.begin(), out.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  return out;
}

SmoothedIndicator::SmoothedIndicator(const GroupElement& g, double ell,
                                     const TileId& mu, double r_j)
    : g_(g), ell_(ell), mu_(mu), j_(r_j) {
  if (!(ell > 0)) throw Error("smoothed_indicator: scale must be positive");
}

double SmoothedIndicator::squared(const Vec3& x) const {
  const Tiling& t = default_tiling();
  if (t.depth(g_, ell_, x) > j_.radius) return t.locate(g_, ell_, x) == mu_ ? 1.0 : 0.0;
  double s = 0;
  for (std::size_t q = 0; q < j_.nodes.size(); ++q)
    if (t.locate(g_, ell_, x - j_.nodes[q]) == mu_) s += j_.weights[q];
  return std::min(1.0, s);
}

double SmoothedIndicator::operator()(const Vec3& x) const { return std::sqrt(squared(x)); }

double SmoothedIndicator::integral_squared() const {
  const Tetrahedron tet = default_tiling().tile(g_, ell_, mu_);
  double s = 0;
  for (std::size_t q = 0; q < j_.nodes.size(); ++q) {
    Tetrahedron sh = tet;
    for (auto& v : sh.v) v += j_.nodes[q];
    s += j_.weights[q] * sh.volume();
  }
  return s;
}

std::pair<double, double> SmoothedIndicator::integral_squared_mc(int samples,
                                                                 std::uint64_t seed) const {
  const Tetrahedron tet = default_tiling().tile(g_, ell_, mu_);
  Vec3 lo = tet.v[0], hi = tet.v[0];
  for (const auto& v : tet.v) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  lo.array() -= j_.radius;
  hi.array() += j_.radius;
  const double box = (hi - lo).prod();
  Rng rng(seed);
  double s = 0, s2 = 0;
  for (int i = 0; i < samples; ++i) {
    Vec3 x(rng.uniform(lo(0), hi(0)), rng.uniform(lo(1), hi(1)), rng.uniform(lo(2), hi(2)));
    const double f = squared(x);
    s += f;
    s2 += f * f;
  }
  const double mean = s / samples;
  const double var = std::max(0.0, s2 / samples - mean * mean);
  return {box * mean, box * std::sqrt(var / samples)};
}

SmoothedIndicator smoothed_indicator(const GroupElement& g, double ell,
                                     const TileId& mu, double r_j) {
  return SmoothedIndicator(g, ell, mu, r_j);
}

// ----------------------------------------------------- inner approximation

double point_tetrahedron_distance(const Vec3& p, const Tetrahedron& t) {
  // Closest point on triangle abc to p (Ericson, Real-Time Collision Detection).
  auto tri = [&p](const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return (p - a).norm();
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return (p - b).norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + ab * (d1 / (d1 - d3)))).norm();
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return (p - c).norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + ac * (d2 / (d2 - d6)))).norm();
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
      return (p - (b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6))))).norm();
    const double denom = 1.0 / (va + vb + vc);
    return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
  };
  Mat3 m;
  m.col(0) = t.v[1] - t.v[0];
  m.col(1) = t.v[2] - t.v[0];
  m.col(2) = t.v[3] - t.v[0];
  const Vec3 bc = m.fullPivLu().solve(p - t.v[0]);
  if (bc.minCoeff() >= 0 && bc.sum() <= 1) return 0.0;
  return std::min({tri(t.v[0], t.v[1], t.v[2]), tri(t.v[0], t.v[1], t.v[3]),
                   tri(t.v[0], t.v[2], t.v[3]), tri(t.v[1], t.v[2], t.v[3])});
}

Domain inner_approximation(const Domain& omega, double ell, double delta) {
  if (!(ell > 0) || !(delta > 0)) throw Error("inner_approximation: ell and delta must be positive");
  if (omega.dim() != 3) throw Error("inner_approximation: only 3-d domains are supported");
  const Tiling& tiling = default_tiling();
  const GroupElement id;
  const double a = omega.spacing();
  const double margin = delta + a * std::sqrt(3.0) / 2.0;
  std::unordered_map<TileId, bool, TileIdHash> accepted;
  auto accept = [&](const TileId& t) {
    auto it = accepted.find(t);
    if (it != accepted.end()) return it->second;
    const Tetrahedron tet = tiling.tile(id, ell, t);
    Vec3 lo = tet.v[0], hi = tet.v[0];
    for (const auto& v : tet.v) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    bool ok = true;
    const int i0 = static_cast<int>(std::ceil((lo(0) - margin) / a)), i1 = static_cast<int>(std::floor((hi(0) + margin) / a));
    const int j0 = static_cast<int>(std::ceil((lo(1) - margin) / a)), j1 = static_cast<int>(std::floor((hi(1) + margin) / a));
    const int k0 = static_cast<int>(std::ceil((lo(2) - margin) / a)), k1 = static_cast<int>(std::floor((hi(2) + margin) / a));
    for (int i = i0; ok && i <= i1; ++i)
      for (int j = j0; ok && j <= j1; ++j)
        for (int k = k0; ok && k <= k1; ++k) {
          if (omega.contains({i, j, k})) continue;
          if (point_tetrahedron_distance(Vec3(i, j, k) * a, tet) <= margin) ok = false;
        }
    accepted.emplace(t, ok);
    return ok;
  };
  std::vector<Site> kept;
  for (std::size_t i = 0; i < omega.size(); ++i)
    if (accept(tiling.locate(id, ell, omega.position(i)))) kept.push_back(omega.site(i));
  if (kept.empty()) {
    Domain d(a, 3, {}, omega.label() + "/inner");
    d.set_warning(true);
    return d;
  }
  return Domain(a, 3, std::move(kept), omega.label() + "/inner");
}

}  // namespace coulab
