// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "coulab/common.hpp"
#include "coulab/geometry.hpp"
#include "coulab/report.hpp"

namespace coulab {

/// Point charges. Where an inequality fixes the roles (electrons at charge
/// -1, nuclei at +z) the charges are implicit.
struct ChargeConfig {
  std::vector<Vec3> x;
  std::vector<double> q;
  std::size_t size() const { return x.size(); }
  double sum_q2() const;
  /// sum_{i<j} q_i q_j / |x_i - x_j|.
  double coulomb_energy() const;
};

class Rng;

/// n points uniform in [0, box)^3 with charges uniform in [-q_max, q_max].
ChargeConfig random_charge_config(Rng& rng, int n, double box, double q_max);

/// Electrons at `electrons`, nuclei of charge z at `nuclei`. With
/// baxter = true the constant is 1 + 2z and the nuclear term on the right is
/// dropped. delta over an empty set is +infinity, so those terms vanish.
Report lieb_yau_gap(const std::vector<Vec3>& electrons, const std::vector<Vec3>& nuclei,
                    double z, bool baxter = false);

struct GsSample {
  double ell;
  double deficit;   // D(ell)
  double error;     // 1 sigma
  double scaled;    // ell * D / sum z^2
  double scaled_error;
};

/// Monte Carlo D(ell) = average of the same-tile pair energy minus the full
/// pair energy, for each ell.
std::vector<GsSample> graf_schenker_samples(const ChargeConfig& cfg,
                                            const std::vector<double>& ells, int samples,
                                            std::uint64_t seed);

/// Reports (one per config and ell) checking ell*D/sum z^2 against the
/// constant fitted as the maximum over configs at the smallest ell.
std::vector<Report> graf_schenker_deficit(const std::vector<ChargeConfig>& cfgs,
                                          const std::vector<double>& ells, int samples,
                                          std::uint64_t seed);

struct SmoothGsSample {
  double ell;
  double lhs;          // sum_{i<j} z_i z_j / r
  double smoothed;     // averaged pair term with theta^2 weights
  double smoothed_error;
  double sharp;        // same samples, indicator weights
  double w_term;       // sum_{i<j} z_i z_j W(x_i - x_j)
  double c_needed;     // smallest C making the inequality hold
};

SmoothGsSample smooth_gs_sample(const ChargeConfig& cfg, double ell, double r_j, int samples,
                                std::uint64_t seed);

/// Fits C at the smallest ell over all configs and checks the others.
std::vector<Report> smooth_gs_check(const std::vector<ChargeConfig>& cfgs,
                                    const std::vector<double>& ells, double r_j, int samples,
                                    std::uint64_t seed);

/// W(x) = 1 / (|x| (1 + |x|)).
double gs_w(double r);
/// Y_nu(x) = exp(-nu |x|) / |x|.
double yukawa(double nu, double r);
/// int_0^inf exp(-nu) Y_nu(r) d nu by exp-sinh quadrature.
double gs_w_quadrature(double r);

Report coulomb_yukawa_bound(const ChargeConfig& cfg, double nu);

/// Form 1: tr(T + V)_- / (a^d sum V_-^{5/2}).
Report lieb_thirring_potential(const Domain& omega, const RVec& v);
/// Form 2 for the Slater state of the k lowest Dirichlet modes:
/// <sum T> / (a^d sum rho^{5/3}).
Report lieb_thirring_slater(const Domain& omega, int k);
/// Marks each report with the family rule: the value at the largest scale
/// does not exceed the maximum over the smaller ones. Returns the verdict.
bool lieb_thirring_family(std::vector<Report>& family);

/// Continuum Li-Yau check on an interval or box with exact Dirichlet spectrum.
/// lhs = |Omega| (2 pi)^{-n} int f(|p|^2) dp, rhs = sum_k f(lambda_k).
Report li_yau_gap(const std::vector<double>& sides, const std::function<double(double)>& f);

/// Bosonic sector ground energy of sum_i (T_i + eps max_{k != i} w(x_i, x_k)).
Report repelling_bound_check(const Domain& omega, int n, double eps);
std::vector<Report> repelling_bound_suite(const Domain& omega, const std::vector<int>& n_list,
                                          double eps);

/// ratio = | |x-R| - |x-R-D| | / |D| <= 1 at every sample not within 1e-6 of
/// a singular point. Skipped samples are counted in the note.
Report dipole_bound_check(const Vec3& R, const Vec3& D, const std::vector<Vec3>& samples);

/// sum_mu Theta_mu T Theta_mu - T. Throws when sum Theta^2 differs from 1 by
/// more than 1e-9.
CMat ims_residual_matrix(const CMat& t, const std::vector<RVec>& thetas);

/// Per-volume IMS error e(ell) = a^d sum_{xy} R_xy / |Omega| averaged over
/// group samples, with ell * e(ell) asserted within a factor 2 across scales.
/// The spectral norm of the residual is reported in `note`.
std::vector<Report> ims_residual(const Domain& omega, const std::vector<double>& ells,
                                 double r_j, int group_samples, std::uint64_t seed);

/// Localization functions Theta_mu on the domain sites for one motion.
std::vector<RVec> tiling_partition(const Domain& omega, const GroupElement& g, double ell,
                                   double r_j);

}  // namespace coulab
