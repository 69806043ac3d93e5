// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coulab/common.hpp"

namespace coulab {

using Site = std::array<int, 3>;

/// Finite set of sites of the lattice a*Z^dim. Axes beyond `dim` are pinned
/// to zero and never count as neighbor directions.
class Domain {
 public:
  Domain() = default;
  Domain(double spacing, int dim, std::vector<Site> sites, std::string label);

  double spacing() const { return a_; }
  int dim() const { return dim_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  /// Set when an operation legitimately produced an empty domain.
  bool warning() const { return warning_; }
  void set_warning(bool w) { warning_ = w; }

  const std::vector<Site>& sites() const { return sites_; }
  const Site& site(std::size_t i) const { return sites_[i]; }
  Vec3 position(std::size_t i) const;
  /// Index of a lattice site, or -1 when absent.
  int index_of(const Site& s) const;
  bool contains(const Site& s) const { return index_of(s) >= 0; }
  /// Index of the site whose cell contains x (nearest lattice point), or -1.
  int locate(const Vec3& x) const;

  const std::vector<int>& boundary() const { return boundary_; }
  bool is_boundary(std::size_t i) const { return is_boundary_[i] != 0; }
  /// Neighbor offsets along active axes (2*dim of them).
  std::vector<Site> neighbor_offsets() const;

  double volume() const;

 private:
  static std::uint64_t key(const Site& s);

  double a_ = 1.0;
  int dim_ = 3;
  std::string label_;
  std::vector<Site> sites_;
  std::vector<int> boundary_;
  std::vector<char> is_boundary_;
  std::unordered_map<std::uint64_t, int> lookup_;
  bool warning_ = false;
};

enum class ShapeKind { Cube, Box, Ball, Custom };

/// Shape descriptor. Lengths are physical; Custom sites are lattice indices.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::Cube;
  int dim = 3;
  double side = 1.0;              // Cube
  Vec3 extent = Vec3::Ones();     // Box, per axis
  Vec3 center = Vec3::Zero();     // Ball
  double radius = 1.0;            // Ball
  std::vector<Site> sites;        // Custom
  std::string label;
};

ShapeSpec cube_shape(double side, int dim = 3);
ShapeSpec ball_shape(double radius, const Vec3& center = Vec3::Zero());

/// Cubes and boxes get round(L/a) sites per axis starting at the origin; a
/// ball keeps sites x with |x - c| <= r - a/2.
Domain build_domain(const ShapeSpec& spec, double a);

struct ConeResult {
  bool pass = true;
  Vec3 witness = Vec3::Zero();
  bool witness_in_complement = false;
  int points_checked = 0;
};

/// Sampled eps-cone test. Points are drawn from boundary-site cells and the
/// adjacent complement cells; each needs a cone of radius eps and opening
/// cos = 1 - eps^2 lying in the same set (membership by nearest site).
ConeResult cone_check(const Domain& omega, double eps, int n_samples,
                      std::uint64_t seed);

struct RegularityProfile {
  std::vector<std::pair<double, double>> eta_samples;
  double cone_epsilon = 0.0;
  double diam_ratio = 0.0;
  /// Bounding-box volume, a crude stand-in for the smallest regular superset.
  double bounding_box_volume = 0.0;
};

RegularityProfile regularity_profile(const Domain& omega,
                                     const std::vector<double>& t_grid);

struct Tetrahedron {
  std::array<Vec3, 4> v;
  double volume() const;
  Vec3 barycenter() const;
};

/// Identifies a tile k + omega_p (base) + v of the unscaled tiling.
struct TileId {
  int piece = 0;
  Site cell{0, 0, 0};
  bool operator==(const TileId& o) const {
    return piece == o.piece && cell == o.cell;
  }
  bool operator<(const TileId& o) const {
    return cell != o.cell ? cell < o.cell : piece < o.piece;
  }
};

struct TileIdHash {
  std::size_t operator()(const TileId& t) const;
};

/// Rigid motion x -> R x + u.
struct GroupElement {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
  Vec3 apply_inverse(const Vec3& y) const {
    return rotation.transpose() * (y - translation);
  }
};

/// The 24-piece split of C = [-1/2,1/2]^3 by the planes x=+-y, y=+-z, x=+-z.
/// Piece p equals rotations[p] * base. Tiles of the scale-1 tiling are
/// rotations[p] * base + k + shift for k in Z^3.
struct Tiling {
  Tetrahedron base;
  std::vector<Tetrahedron> pieces;
  std::vector<Mat3> rotations;
  Vec3 shift = Vec3::Zero();
  double scale = 1.0;

  /// Tile of g(scale * tiling) containing x.
  TileId locate(const GroupElement& g, double ell, const Vec3& x) const;
  /// Distance from x to the boundary of its tile (0 if on it).
  double depth(const GroupElement& g, double ell, const Vec3& x) const;
  /// World-frame vertices of tile t in g(ell * tiling).
  Tetrahedron tile(const GroupElement& g, double ell, const TileId& t) const;
  /// Tile volume at scale ell.
  double tile_volume(double ell) const { return ell * ell * ell / 24.0; }
};

/// Base piece {|z| < y < x < 1/2}. Throws when 0 is not inside base + v.
Tiling unit_cube_tiling(const Vec3& v);
/// Shift -barycenter(base).
Vec3 default_tiling_shift();
const Tiling& default_tiling();

/// Haar rotations (uniform quaternions) and translations R*(cell_scale*s),
/// s uniform in [0,1)^3.
std::vector<GroupElement> sample_group(std::uint64_t seed, int n,
                                       double cell_scale = 1.0);

/// Polynomial bump c(1 - |y/r|^2)^4 discretized by a 16^3 midpoint grid on
/// [-r,r]^3, weights normalized to sum 1.
struct Mollifier {
  double radius = 0.0;
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  explicit Mollifier(double r, int grid = 16);
};

/// theta^2 values of all tiles meeting x: (1_tile * j)(x).
std::vector<std::pair<TileId, double>> tile_weights(const Tiling& tiling,
                                                    const GroupElement& g,
                                                    double ell,
                                                    const Mollifier& j,
                                                    const Vec3& x);

/// theta = (1_tile * j)^{1/2} for one tile.
class SmoothedIndicator {
 public:
  SmoothedIndicator(const GroupElement& g, double ell, const TileId& mu,
                    double r_j);
  double operator()(const Vec3& x) const;
  double squared(const Vec3& x) const;
  /// sum_q w_q |tile - y_q|, evaluated from the translated vertices.
  double integral_squared() const;
  /// Monte Carlo estimate of the same integral with its 1-sigma error.
  std::pair<double, double> integral_squared_mc(int samples,
                                                std::uint64_t seed) const;
  const TileId& tile_id() const { return mu_; }
  double radius() const { return j_.radius; }

 private:
  GroupElement g_;
  double ell_;
  TileId mu_;
  Mollifier j_;
};

SmoothedIndicator smoothed_indicator(const GroupElement& g, double ell,
                                     const TileId& mu, double r_j);

/// Union of tiles of ell*tiling (identity motion) whose delta-neighborhood
/// lies in the union of site cells, intersected with the grid. 3-d only.
Domain inner_approximation(const Domain& omega, double ell, double delta);

double point_tetrahedron_distance(const Vec3& p, const Tetrahedron& t);

}  // namespace coulab
