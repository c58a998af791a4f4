#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyshoot/integrator.hpp"
#include "polyshoot/system_spec.hpp"

namespace polyshoot {

/// Composite Simpson rule on a nonuniform grid; an odd trailing interval is
/// closed with the three-point formula.
double simpson(const std::vector<double>& x, const std::vector<double>& y);

/// Surface area of the unit sphere in R^n.
double sphere_area(int n);

/// The Pohozaev coefficient bracket multiplying the energy:
///   scalar: k(2-n) + n(k-1) + 2(n-sigma)/(1+p)
///   pair:   k(2-n) + (n-sigma1)/(1+q) + (n-sigma2)/(1+p) + (k-1)n
/// Non-positive exactly on the critical and supercritical side.
double pohozaev_bracket(const RecognisedShape& shape);

struct PohozaevReport {
  /// Gradient pairings  int grad w_j . grad w_pair(j)  followed by the
  /// source pairings    int (-Lap w_j) w_pair(j),  j = 1..N.
  std::vector<double> energy_values;
  /// Largest pairwise relative spread of energy_values.
  double energy_spread = 0.0;

  double interior_combination = 0.0;
  double boundary_flux = 0.0;
  double extra_terms = 0.0;
  double residual = 0.0;

  double bracket = 0.0;
  /// Radius R where the trajectory stops and max |w_m(R)| there.
  double radius = 0.0;
  double boundary_values_max = 0.0;
  /// True when every chain component vanishes at R (Navier data), the setting
  /// in which the identities are exact.
  bool navier_data = false;
  bool flux_nonnegative = false;
  bool bracket_nonpositive = false;
};

/// Energy pairings only; valid for any reduced system.
PohozaevReport energy_identity(const Trajectory& traj, const SystemSpec& spec);

/// Energy pairings plus the full Pohozaev identity; needs a recognised scalar
/// or two-equation shape (InvalidSpec otherwise).
PohozaevReport pohozaev_residual(const Trajectory& traj, const SystemSpec& spec);

struct DecayFit {
  double fitted_rate = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double rms = 0.0;
  int points = 0;
};

/// Least-squares fit of log w_component against log r on [r_lo, r_hi]
/// (default: the last decade of the trajectory).
DecayFit decay_fit(const Trajectory& traj, std::optional<double> r_lo = std::nullopt,
                   std::optional<double> r_hi = std::nullopt, int component = 0);

}  // namespace polyshoot
