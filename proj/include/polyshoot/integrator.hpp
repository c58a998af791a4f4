#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "polyshoot/errors.hpp"
#include "polyshoot/system_spec.hpp"

namespace polyshoot {

struct IvpControls {
  double h0 = 1e-6;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double r_max = 1e3;
  double eps_wall = 1e-10;
  double eps_decay = 1e-6;
  std::int64_t max_steps = 1'000'000;
  /// Dense-output points stored inside every accepted step, for quadrature.
  int samples_per_step = 1;

  void validate() const;
};

/// Radial profile w(r) of the reduced system with its first derivatives.
struct Trajectory {
  std::vector<double> grid;
  std::vector<Eigen::VectorXd> values;
  std::vector<Eigen::VectorXd> derivs;
  Eigen::VectorXd alpha;

  /// Largest w'_m seen at any stored point while all components were positive.
  double max_slope = -std::numeric_limits<double>::infinity();
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;

  std::size_t size() const { return grid.size(); }
  int components() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }
};

struct WallHit {
  double r0 = 0.0;
  int hit_index = 0;
  Eigen::VectorXd state;
};

struct Decayed {
  /// Upper bound on lim w(r), valid while the solution stays positive.
  Eigen::VectorXd limit;
  double r_end = 0.0;
};

struct Truncated {
  double r_end = 0.0;
  Eigen::VectorXd state;
  Eigen::VectorXd tail_bound;
};

using Outcome = std::variant<WallHit, Decayed, Truncated>;

struct IntegrationResult {
  Trajectory trajectory;
  Outcome outcome;
};

/// Closed-form start at r = h0 from w(0) = alpha, w'(0) = 0, freezing each
/// source at its value on alpha:
///   w_m(h0)  = alpha_m - g h0^{2-sigma} / ((2-sigma)(n-sigma))
///   w'_m(h0) = -g h0^{1-sigma} / (n-sigma)
/// summed over the terms g r^{-sigma} of row m (chain links use sigma = 0).
template <typename Scalar>
std::pair<Vec<Scalar>, Vec<Scalar>> series_start(const ReducedSystem& rs, const Vec<Scalar>& alpha,
                                                 Scalar h0) {
  using std::pow;
  const int L = rs.size();
  if (alpha.size() != L) throw std::invalid_argument("alpha has the wrong length");
  for (int m = 0; m < L; ++m) {
    if (!(alpha[m] > Scalar(0))) {
      throw NonPositiveAlpha("alpha component " + std::to_string(m + 1) + " is not positive");
    }
  }
  const Scalar n = Scalar(rs.dimension());
  Vec<Scalar> w = alpha;
  Vec<Scalar> dw = Vec<Scalar>::Zero(L);
  auto add_term = [&](int m, Scalar g, Scalar sigma) {
    w[m] -= g * pow(h0, Scalar(2) - sigma) / ((Scalar(2) - sigma) * (n - sigma));
    dw[m] -= g * pow(h0, Scalar(1) - sigma) / (n - sigma);
  };
  for (int m = 0; m < L; ++m) {
    const ChainRow& rw = rs.row(m);
    if (const auto* link = std::get_if<ChainLink>(&rw)) {
      add_term(m, alpha[link->target], Scalar(0));
      continue;
    }
    for (const auto& mono : std::get<SourceTerm>(rw).monomials) {
      Scalar g = Scalar(mono.coef);
      for (const auto& [idx, p] : mono.factors) g *= pow(alpha[idx], Scalar(p));
      add_term(m, g, Scalar(mono.sigma));
    }
  }
  return {w, dw};
}

/// Radius beyond which decay may be declared: the largest, over chain rows, of
/// the radius at which the frozen-alpha source alone would exhaust alpha_m.
double decay_length_scale(const ReducedSystem& rs, const Eigen::VectorXd& alpha);

struct WallEvent {
  double r0 = 0.0;
  int index = -1;
};

/// Localises the first zero crossing inside [r_lo, r_hi] given the component
/// values along the step (state_at(r) returns the vector w(r)). Components
/// non-positive at r_hi are bisected to a bracket of width eps_wall; the
/// returned r0 is the positive side of the bracket. The smallest r0 wins and
/// exact ties go to the lower index.
template <class StateAt>
WallEvent locate_wall_event(StateAt&& state_at, double r_lo, double r_hi, double eps_wall) {
  const Eigen::VectorXd at_hi = state_at(r_hi);
  WallEvent best;
  for (int m = 0; m < at_hi.size(); ++m) {
    if (at_hi[m] > 0.0) continue;
    double lo = r_lo;
    double hi = r_hi;
    while (hi - lo > eps_wall) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (state_at(mid)[m] > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    if (best.index < 0 || lo < best.r0) best = {lo, m};
  }
  if (best.index < 0) throw std::logic_error("locate_wall_event: no sign change in bracket");
  return best;
}

/// Integrates -(r^{n-1} w_m')' = r^{n-1} f_m(r, w) outward from the series
/// start at h0 with adaptive Dormand-Prince steps. Stops at the first wall hit,
/// on decay, or at r_max.
IntegrationResult integrate(const ReducedSystem& rs, const Eigen::VectorXd& alpha,
                            const IvpControls& controls);

/// Number of integrate() calls made by this process.
std::int64_t integration_count();

}  // namespace polyshoot
