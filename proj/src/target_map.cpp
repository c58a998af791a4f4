#include "polyshoot/target_map.hpp"

#include <stdexcept>

namespace polyshoot {

Shot shoot(const ReducedSystem& rs, const Eigen::VectorXd& alpha, const IvpControls& controls) {
  if (alpha.size() != rs.size()) throw std::invalid_argument("alpha has the wrong length");
  if (!alpha.allFinite() || alpha.minCoeff() < 0.0) {
    throw NonPositiveAlpha("alpha must be finite and componentwise >= 0");
  }

  Shot shot;
  TargetResult& t = shot.target;
  t.alpha = alpha;
  if (alpha.minCoeff() == 0.0) {
    t.psi = alpha;
    t.kase = TargetCase::BoundaryIdentity;
    return shot;
  }

  shot.run = integrate(rs, alpha, controls);
  const auto& outcome = shot.run->outcome;
  if (const auto* hit = std::get_if<WallHit>(&outcome)) {
    t.kase = TargetCase::WallHit;
    t.psi = hit->state.cwiseMax(0.0);
    t.psi[hit->hit_index] = 0.0;
    t.r0 = hit->r0;
    t.hit_index = hit->hit_index;
  } else if (const auto* dec = std::get_if<Decayed>(&outcome)) {
    t.kase = TargetCase::DecayLimit;
    t.psi = dec->limit;
    t.r_end = dec->r_end;
  } else {
    const auto& tr = std::get<Truncated>(outcome);
    t.kase = TargetCase::Unresolved;
    t.psi = tr.state;
    t.r_end = tr.r_end;
    Eigen::Index idx = 0;
    if (tr.tail_bound.minCoeff(&idx) < 0.0) t.predicted_hit = static_cast<int>(idx);
  }
  return shot;
}

TargetResult psi(const ReducedSystem& rs, const Eigen::VectorXd& alpha, const IvpControls& controls) {
  return shoot(rs, alpha, controls).target;
}

Eigen::VectorXd phi(const Eigen::VectorXd& alpha, double mass) {
  const double total = alpha.sum();
  if (total > mass + 1e-12 * std::max(1.0, mass)) {
    throw MassExceeded("component sum exceeds the mass a");
  }
  const auto L = static_cast<double>(alpha.size());
  Eigen::VectorXd out = alpha.array() + (mass - total) / L;
  // Renormalise the rounding so the sum is a.
  out.array() += (mass - out.sum()) / L;
  return out;
}

Eigen::VectorXd phi_inverse(const Eigen::VectorXd& beta) {
  return beta.array() - beta.minCoeff();
}

const char* to_string(TargetCase c) {
  switch (c) {
    case TargetCase::BoundaryIdentity: return "boundary";
    case TargetCase::WallHit: return "wall_hit";
    case TargetCase::DecayLimit: return "decay";
    case TargetCase::Unresolved: return "unresolved";
  }
  return "?";
}

}  // namespace polyshoot
