#pragma once

#include <optional>

#include <Eigen/Core>

#include "polyshoot/integrator.hpp"
#include "polyshoot/system_spec.hpp"

namespace polyshoot {

enum class TargetCase { BoundaryIdentity, WallHit, DecayLimit, Unresolved };

struct TargetResult {
  Eigen::VectorXd alpha;
  Eigen::VectorXd psi;
  TargetCase kase = TargetCase::BoundaryIdentity;
  std::optional<double> r0;
  std::optional<int> hit_index;
  std::optional<double> r_end;
  /// For unresolved runs: the component whose tail bound is already negative
  /// (it cannot stay positive forever), if any.
  std::optional<int> predicted_hit;
};

struct Shot {
  TargetResult target;
  /// Absent for boundary points, which are never integrated.
  std::optional<IntegrationResult> run;
};

/// The target map on the cone of the reduced system, with the run behind it.
Shot shoot(const ReducedSystem& rs, const Eigen::VectorXd& alpha, const IvpControls& controls);

/// psi(alpha): alpha itself on the boundary; w(r0) with the hit component set
/// to 0 on a wall hit; the limit estimate on decay; w(r_max) when unresolved.
TargetResult psi(const ReducedSystem& rs, const Eigen::VectorXd& alpha, const IvpControls& controls);

/// phi(alpha) = alpha + (a - sum alpha)/L (1, ..., 1), from B_a onto A_a.
Eigen::VectorXd phi(const Eigen::VectorXd& alpha, double mass);

/// phi^{-1}(beta) = beta - min(beta) (1, ..., 1), from A_a onto B_a.
Eigen::VectorXd phi_inverse(const Eigen::VectorXd& beta);

const char* to_string(TargetCase c);

}  // namespace polyshoot
