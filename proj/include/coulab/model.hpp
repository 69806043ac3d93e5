// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "coulab/common.hpp"
#include "coulab/fock.hpp"
#include "coulab/geometry.hpp"
#include "coulab/linalg.hpp"

namespace coulab {

// ----------------------------------------------------------------- nuclei

struct Nucleus {
  Vec3 R = Vec3::Zero();
  double z = 1.0;
};

struct NucleiConfig {
  std::vector<Nucleus> nuclei;
  std::string label;

  std::size_t size() const { return nuclei.size(); }
  /// Minimum pairwise distance (infinity for fewer than two nuclei).
  double min_separation() const;
  /// sum_{k<k'} z_k z_k' / |R_k - R_k'|.
  double repulsion() const;
  double total_charge() const;
};

/// Per-nucleus displacement and charge change of a periodic lattice.
struct Deformation {
  Site cell{0, 0, 0};
  int atom = 0;
  Vec3 dR = Vec3::Zero();
  double dz = 0.0;
};

/// Periodic lattice sum_{k} (basis * k + cell nuclei), deformed and with
/// defects, restricted to a window.
struct LatticeSpec {
  Mat3 basis = Mat3::Identity();  // columns generate the lattice
  std::vector<Nucleus> cell;      // positions relative to a cell origin
  Vec3 origin = Vec3::Zero();
  std::vector<Deformation> deformations;
  std::vector<Nucleus> added;
  std::vector<std::pair<Site, int>> removed;
  double min_separation = 0.0;  // required lower bound on |R - R'|
};

/// Nuclei of the lattice with positions in [lo, hi) (componentwise).
/// Throws "hyp_D3" style errors when two charged nuclei come closer than
/// spec.min_separation.
NucleiConfig perturbed_lattice(const LatticeSpec& spec, const Vec3& lo, const Vec3& hi);

/// Throws "regularization violated" if a nucleus sits within a/10 of a site.
void check_regularization(const Domain& omega, const NucleiConfig& k);

// --------------------------------------------------------- magnetic field

struct MagneticField {
  enum class Kind { None, Uniform, Periodic, Random };
  Kind kind = Kind::None;
  Vec3 B = Vec3::Zero();  // Uniform: A = B x x / 2
  double amplitude = 0.0;
  double period = 1.0;
  // Random: A_c(x) = sum_m amp_m sin(k_m . x + phase_m), k_m orthogonal to e_c,
  // so every gauge here is divergence free.
  struct Mode {
    int component;
    Vec3 k;
    double amp;
    double phase;
  };
  std::vector<Mode> modes;

  Vec3 potential(const Vec3& x) const;
  /// Central finite-difference curl with step h.
  Vec3 curl(const Vec3& x, double h = 1e-4) const;
  /// Analytic B where available (Uniform, None).
  std::optional<Vec3> exact_field(const Vec3& x) const;
};

MagneticField no_field();
MagneticField uniform_field(const Vec3& B);
/// A = amp (sin(2 pi y/L), sin(2 pi z/L), sin(2 pi x/L)), L-periodic.
MagneticField periodic_field(double amplitude, double period);
/// Random bounded potential with |A| <= sqrt(3) * amplitude.
MagneticField random_bounded_field(std::uint64_t seed, double amplitude, int n_modes = 4);

/// Discrete Dirichlet Laplacian with Peierls phases, scaled by lambda:
/// diagonal 2*dim/a^2, hopping -exp(i A((x+y)/2).(y-x))/a^2.
CMat kinetic_operator(const Domain& omega, const MagneticField& A, double lambda = 1.0);

/// Mean of 1/|x - y| for x, y uniform in the unit cube, by Monte Carlo with a
/// fixed seed (1e6 samples). The bosonic on-site value is alpha / a.
double onsite_coulomb_alpha();

/// Site Coulomb kernel: 1/|x-y| off the diagonal, alpha/a on it.
RMat coulomb_kernel(const Domain& omega);

/// -sum_k z_k / |x - R_k| per site.
RVec nuclear_potential(const Domain& omega, const NucleiConfig& k);

// ------------------------------------------------------------ hamiltonian

/// Grand-canonical Hamiltonian dGamma(h) + pair(w) + constant, block
/// diagonal in the particle number.
struct GrandHamiltonian {
  Statistics stats = Statistics::Fermion;
  int cap = 1;
  CMat h;
  RMat w;
  double constant = 0.0;
  int max_particles_override = -1;

  int modes() const { return static_cast<int>(h.rows()); }
  int max_particles() const;
  SectorBasis sector_basis(int N) const;
  SpMat sector_matrix(int N) const;
  SpMat sector_matrix(const SectorBasis& basis) const;
  /// Full-space operator (small spaces only).
  SpMat full_matrix() const;
  FockSpace space() const;
};

GrandHamiltonian coulomb_hamiltonian(const Domain& omega, const NucleiConfig& k,
                                     const MagneticField& A, double lambda = 1.0);

struct EnergyResult {
  double value = 0.0;
  std::vector<std::pair<int, double>> sector_minima;
  int n_star = 0;
  std::string method;
  double max_residual = 0.0;
  CVec ground_vector;  // in the n_star sector basis
};

/// Lowest eigenvalue per sector; ties resolved towards the smallest N.
EnergyResult ground_state_energy(const GrandHamiltonian& h, int n_max = -1,
                                 double tol = 1e-9);

struct FreeEnergyResult {
  double value = 0.0;
  double beta = 1.0;
  std::vector<double> mu;
  double log_z = 0.0;
  double mean_n = 0.0;
  double mean_energy = 0.0;
  double entropy = 0.0;
  std::optional<FockState> gibbs;
};

/// Exact -log tr exp(-beta (H - mu N)) / beta. The Gibbs state is stored when
/// the full dimension is at most gibbs_dim_limit.
FreeEnergyResult free_energy(const GrandHamiltonian& h, double beta, double mu,
                             int gibbs_dim_limit = 4096);

/// tr[(H - mu N) G] + tr[G log G] / beta for a full-space density matrix G.
double variational_free_energy(const GrandHamiltonian& h, double beta, double mu,
                               const CMat& g);

// -------------------------------------------------------- Hartree-Fock

struct HFResult {
  CMat gamma;
  double value = 0.0;   // E_HF - mu tr(gamma) - S/beta (S term only at finite beta)
  double energy = 0.0;  // E_HF(gamma)
  int iterations = 0;
  bool converged = false;
};

/// tr(h g) + direct - exchange + constant; the diagonal of w is ignored
/// since direct and exchange cancel there.
double hf_energy(const GrandHamiltonian& h, const CMat& gamma);

/// Damped fixed point (step 0.3) on the mean-field operator; aufbau below mu
/// when beta is absent, Fermi-Dirac otherwise.
HFResult hf_minimize(const GrandHamiltonian& h, double mu,
                     std::optional<double> beta = std::nullopt, int max_iter = 500,
                     double tol = 1e-8, double step = 0.3);

/// -tr[g log g + (1-g) log(1-g)].
double fermionic_entropy(const CMat& gamma);

// ------------------------------------------------------- charge concavity

struct ConcavityScan {
  int k = 0;
  int steps = 0;
  double z_max = 0.0;
  std::vector<double> values;  // row-major over the charge grid
  double max_concavity_violation = 0.0;
  double grid_min = 0.0;
  double corner_min = 0.0;
  bool concave = false;
  bool corner = false;
};

ConcavityScan charge_concavity_scan(const Domain& omega, const std::vector<Vec3>& positions,
                                    double z_max, int grid_steps,
                                    const MagneticField& A = no_field());

// ------------------------------------------------------- two species

/// Fermionic electrons and capped bosonic nuclei of charge z and kinetic
/// scale 1/M on the same sites.
struct TwoSpeciesHamiltonian {
  CMat h_el;
  CMat h_nuc;
  RMat w;  // site Coulomb kernel with on-site alpha/a
  double z = 1.0;
  int nuc_cap = 2;

  int modes() const { return static_cast<int>(h_el.rows()); }
  /// Basis index i_el * dim_nuc + i_nuc.
  SpMat sector_matrix(int n_el, int n_nuc) const;
  /// Product of the electron and nucleus sector sizes.
  double sector_dimension(int n_el, int n_nuc) const;
};

TwoSpeciesHamiltonian two_species_hamiltonian(const Domain& omega, double z, double M,
                                              const MagneticField& A, int nuc_cap = 2);

struct TwoSpeciesEnergy {
  double value = 0.0;
  int n_el = 0;
  int n_nuc = 0;
  std::vector<std::tuple<int, int, double>> sector_minima;
};

TwoSpeciesEnergy two_species_ground_energy(const TwoSpeciesHamiltonian& h, int max_el = -1,
                                           int max_nuc = -1);
/// -log sum exp(-beta (E - mu_el N_e - mu_nuc N_p)) / beta over all sectors.
FreeEnergyResult two_species_free_energy(const TwoSpeciesHamiltonian& h, double beta,
                                         double mu_el, double mu_nuc, int max_el = -1,
                                         int max_nuc = -1);

// ------------------------------------------------------- movable nuclei

struct MovableResult {
  EnergyResult best;
  std::vector<Vec3> best_positions;
  double charge_relaxed = 0.0;
  bool relaxed_equal = false;
};

/// Exhaustive minimum over subsets of the candidates of size <= k_max, plus
/// the charge-relaxed value over a charge grid on the largest subsets.
MovableResult movable_nuclei_energy(const Domain& omega, double z,
                                    const std::vector<Vec3>& candidates, int k_max,
                                    int charge_points = 3);

struct ClassicalFreeEnergy {
  double value = 0.0;        // F
  double value_under = 0.0;  // charge-integrated variant
  double log_z = 0.0;
  double log_z_under = 0.0;
  bool truncation_warning = false;
  double top_term_fraction = 0.0;
};

/// Classical nuclei on a grid of positions with cell volume h:
/// Z = sum_K (h^K / K!) sum over ordered tuples tr exp(-beta(H - mu1 N - mu2 K)).
/// Coincident tuples carry infinite repulsion and are skipped.
ClassicalFreeEnergy classical_nuclei_free_energy(const Domain& omega, double z, double beta,
                                                 double mu1, double mu2, int k_max,
                                                 const std::vector<Vec3>& grid, double h,
                                                 int charge_points = 4);

/// log tr exp(-beta (H - mu N)) from dense sector spectra.
double grand_log_partition(const GrandHamiltonian& h, double beta, double mu);

}  // namespace coulab
