// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include "coulab/scan.hpp"

#include <algorithm>
#include <cmath>

namespace coulab {

ScanModel parse_scan_model(const std::string& s) {
  if (s == "crystal") return ScanModel::Crystal;
  if (s == "quantum-nuclei") return ScanModel::QuantumNuclei;
  if (s == "movable") return ScanModel::Movable;
  throw Error("unknown scan model: " + s);
}

std::string to_string(ScanModel m) {
  switch (m) {
    case ScanModel::Crystal:
      return "crystal";
    case ScanModel::QuantumNuclei:
      return "quantum-nuclei";
    case ScanModel::Movable:
      return "movable";
  }
  return "?";
}

void ScanSpec::validate() const {
  if (sides.empty()) throw Error("scan: empty size sequence");
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (sides[i] < 1) throw Error("scan: sides must be positive");
    if (i && sides[i] <= sides[i - 1]) throw Error("scan: sides must be strictly increasing");
  }
  if (sites_per_cell < 1) throw Error("scan: sites_per_cell must be positive");
  if (!(spacing > 0)) throw Error("scan: spacing must be positive");
  if (!(beta > 0)) throw Error("scan: beta must be positive");
  if (z < 0) throw Error("scan: z must be nonnegative");
  if (!(mass > 0)) throw Error("scan: mass must be positive");
  if (nuc_cap < 1) throw Error("scan: nuc_cap must be positive");
  if (charge_points < 2) throw Error("scan: charge_points must be at least 2");
  if (!(max_dim > 0)) throw Error("scan: max_dim must be positive");
}

Domain ScanSpec::domain(int side) const {
  std::vector<Site> sites;
  for (int i = 0; i < side * sites_per_cell; ++i) sites.push_back({i, 0, 0});
  return Domain(spacing, 1, sites, "chain" + std::to_string(side));
}

namespace {

double center_offset(int spc) { return spc % 2 == 0 ? spc / 2 - 0.5 : spc / 2.0; }

}  // namespace

LatticeSpec ScanSpec::lattice(int side, bool perturbed) const {
  LatticeSpec l;
  const double cell = sites_per_cell * spacing;
  // transverse periods far outside the window
  l.basis = Vec3(cell, 100.0, 100.0).asDiagonal();
  l.cell.push_back({Vec3(center_offset(sites_per_cell) * spacing, 0, 0), z});
  l.min_separation = min_separation;
  if (perturbed) {
    const Vec3 mid = l.cell[0].R + Vec3((side / 2) * cell, 0, 0);
    for (auto n : added) {
      n.R += mid;
      l.added.push_back(n);
    }
    l.deformations = deformations;
  }
  return l;
}

NucleiConfig ScanSpec::nuclei(int side, bool perturbed) const {
  const double len = side * sites_per_cell * spacing;
  NucleiConfig k = perturbed_lattice(lattice(side, perturbed), Vec3(0, -1, -1), Vec3(len, 1, 1));
  k.label = "chain" + std::to_string(side) + (perturbed ? "+perturbation" : "");
  return k;
}

std::vector<Vec3> ScanSpec::candidates(int side) const {
  std::vector<Vec3> out;
  for (const auto& n : nuclei(side, false).nuclei) out.push_back(n.R);
  return out;
}

double scan_cost(const ScanSpec& spec, int side) {
  const int n = side * spec.sites_per_cell;
  const double fermi = std::pow(2.0, n);
  if (spec.model == ScanModel::QuantumNuclei) return fermi * std::pow(spec.nuc_cap + 1.0, n);
  return fermi;
}

double floor_variation(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  std::vector<double> run(xs.size());
  run[0] = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) run[i] = std::min(run[i - 1], xs[i]);
  const double prev = run[run.size() - 2], last = run.back();
  if (prev == last) return 0.0;
  return std::abs(last - prev) / std::max(std::abs(prev), 1e-12);
}

ScanResult run_scan(const ScanSpec& spec, bool perturbed) {
  spec.validate();
  ScanResult res;
  for (int side : spec.sides) {
    ScanRow row;
    row.side = side;
    const Domain omega = spec.domain(side);
    row.volume = omega.volume();
    row.cost = scan_cost(spec, side);
    if (row.cost > spec.max_dim) {
      row.skipped = true;
      row.energy = row.free_energy = row.e = row.f = row.n = std::nan("");
      row.note = "over budget";
      res.partial = true;
      res.rows.push_back(row);
      continue;
    }
    switch (spec.model) {
      case ScanModel::Crystal: {
        const NucleiConfig k = spec.nuclei(side, perturbed);
        check_regularization(omega, k);
        const GrandHamiltonian h = coulomb_hamiltonian(omega, k, no_field());
        row.energy = ground_state_energy(h).value;
        const FreeEnergyResult fe = free_energy(h, spec.beta, spec.mu, 0);
        row.free_energy = fe.value;
        row.n = fe.mean_n / row.volume;
        row.note = "K=" + std::to_string(k.size());
        break;
      }
      case ScanModel::QuantumNuclei: {
        const TwoSpeciesHamiltonian h =
            two_species_hamiltonian(omega, spec.z, spec.mass, no_field(), spec.nuc_cap);
        const TwoSpeciesEnergy e = two_species_ground_energy(h);
        row.energy = e.value;
        const FreeEnergyResult fe = two_species_free_energy(h, spec.beta, spec.mu, spec.mu_nuc);
        row.free_energy = fe.value;
        row.n = fe.mean_n / row.volume;
        row.note = "Ne=" + std::to_string(e.n_el) + " Np=" + std::to_string(e.n_nuc);
        break;
      }
      case ScanModel::Movable: {
        const auto cand = spec.candidates(side);
        const int k_max = spec.k_max < 0 ? static_cast<int>(cand.size()) : spec.k_max;
        const MovableResult m =
            movable_nuclei_energy(omega, spec.z, cand, k_max, spec.charge_points);
        row.energy = m.best.value;
        const ClassicalFreeEnergy cf =
            classical_nuclei_free_energy(omega, spec.z, spec.beta, spec.mu, spec.mu_nuc, k_max,
                                         cand, spec.sites_per_cell * spec.spacing,
                                         spec.charge_points);
        row.free_energy = cf.value;
        row.n = std::nan("");
        row.note = "K*=" + std::to_string(m.best_positions.size());
        if (cf.truncation_warning) row.note += " truncation";
        break;
      }
    }
    row.e = row.energy / row.volume;
    row.f = row.free_energy / row.volume;
    if (!res.rows.empty() && !res.rows.back().skipped) {
      row.delta_e = std::abs(row.e - res.rows.back().e);
      row.delta_f = std::abs(row.f - res.rows.back().f);
    }
    res.rows.push_back(row);
  }

  std::vector<double> es, fs;
  for (const auto& r : res.rows)
    if (!r.skipped) {
      es.push_back(r.e);
      fs.push_back(r.f);
    }
  res.floor_e = es.empty() ? std::nan("") : *std::min_element(es.begin(), es.end());
  res.floor_f = fs.empty() ? std::nan("") : *std::min_element(fs.begin(), fs.end());
  res.variation_e = floor_variation(es);
  res.variation_f = floor_variation(fs);

  auto floor_report = [&](const std::string& what, double floor, double variation) {
    Report r;
    r.name = "stability_floor_" + what;
    r.config = to_string(spec.model);
    r.lhs = 0.2;
    r.rhs = variation;
    r.tolerance = 0.0;
    r.fitted_constant = floor;
    r.note = "floor=" + format_double(floor);
    r.finalize();
    r.pass = r.pass && std::isfinite(floor) && !res.partial;
    return r;
  };
  res.reports.push_back(floor_report("e", res.floor_e, res.variation_e));
  res.reports.push_back(floor_report("f", res.floor_f, res.variation_f));
  return res;
}

PerturbationComparison perturbation_compare(const ScanSpec& spec) {
  if (spec.model != ScanModel::Crystal) throw Error("perturbation_compare: crystal model only");
  spec.validate();
  const ScanResult base = run_scan(spec, false);
  const ScanResult pert = run_scan(spec, true);
  PerturbationComparison out;
  for (std::size_t i = 0; i < base.rows.size(); ++i) {
    out.sides.push_back(base.rows[i].side);
    out.ratio.push_back(std::abs(pert.rows[i].energy - base.rows[i].energy) / base.rows[i].volume);
  }
  Report& r = out.report;
  r.name = "perturbation_compare";
  r.config = "added=" + std::to_string(spec.added.size()) +
             " deformations=" + std::to_string(spec.deformations.size());
  const bool compact = !spec.added.empty() || !spec.deformations.empty();
  const std::size_t m = out.ratio.size();
  if (m >= 2) {
    r.scale = out.sides.back();
    r.lhs = out.ratio[m - 2];
    r.rhs = out.ratio[m - 1];
  }
  r.tolerance = 1e-12;
  r.finalize();
  if (!compact || m < 2) {
    r.pass = true;
    r.note = "reported only";
  }
  if (base.partial || pert.partial) {
    r.pass = false;
    r.note = "over budget";
  }
  return out;
}

}  // namespace coulab
