// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coulab/geometry.hpp"
#include "coulab/model.hpp"
#include "coulab/report.hpp"

namespace coulab {

enum class ScanModel { Crystal, QuantumNuclei, Movable };

ScanModel parse_scan_model(const std::string& s);
std::string to_string(ScanModel m);

/// Size sequence of chains of `sides[i]` cells with `sites_per_cell` sites
/// each (spacing a). Nuclei sit at the cell centers, half a spacing away from
/// the nearest site.
struct ScanSpec {
  ScanModel model = ScanModel::Crystal;
  std::vector<int> sides{2, 3, 4};
  int sites_per_cell = 2;
  double spacing = 1.0;
  double z = 1.0;
  double beta = 1.0;
  double mu = 0.0;      // electrons
  double mu_nuc = 0.0;  // nuclei (quantum and movable models)
  double mass = 10.0;   // quantum nuclei
  int nuc_cap = 2;
  int k_max = -1;          // movable: -1 means one per cell
  int charge_points = 3;   // movable: charge grid for the relaxed value
  double max_dim = 1 << 16;  // cost gate on the largest sector or full space
  std::uint64_t seed = 0;
  // Perturbation. Added nuclei are placed relative to the nucleus of the middle
  // cell (index side / 2); deformations use absolute cell indices.
  std::vector<Nucleus> added;
  std::vector<Deformation> deformations;
  double min_separation = 0.5;

  /// Throws on invalid parameters.
  void validate() const;
  Domain domain(int side) const;
  LatticeSpec lattice(int side, bool perturbed) const;
  NucleiConfig nuclei(int side, bool perturbed) const;
  std::vector<Vec3> candidates(int side) const;
};

struct ScanRow {
  int side = 0;
  double volume = 0.0;
  double energy = 0.0;
  double free_energy = 0.0;
  double e = 0.0;  // E / |Omega|
  double f = 0.0;  // F / |Omega|
  double n = 0.0;  // <N> / |Omega|
  double delta_e = 0.0;
  double delta_f = 0.0;
  double cost = 0.0;   // predicted dimension
  bool skipped = false;  // over budget
  std::string note;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  double floor_e = 0.0;
  double floor_f = 0.0;
  double variation_e = 0.0;  // relative change of the running-min floor over the last two sizes
  double variation_f = 0.0;
  bool partial = false;
  std::vector<Report> reports;
};

/// Predicted dimension for one size, checked against spec.max_dim before
/// anything is allocated.
double scan_cost(const ScanSpec& spec, int side);

ScanResult run_scan(const ScanSpec& spec, bool perturbed = false);

/// |E_{L'} - E_L| / |Omega| over the sizes; asserts that the ratio does not
/// increase between the two largest sizes when the perturbation is compactly
/// supported (added nuclei or deformations), otherwise reports only.
struct PerturbationComparison {
  std::vector<int> sides;
  std::vector<double> ratio;
  Report report;
};

PerturbationComparison perturbation_compare(const ScanSpec& spec);

/// Relative variation of the running minimum of xs over its last two entries.
double floor_variation(const std::vector<double>& xs);

}  // namespace coulab
