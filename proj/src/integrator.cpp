#include "polyshoot/integrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "polyshoot/dopri.hpp"

namespace polyshoot {

namespace {

std::atomic<std::int64_t> g_integrations{0};

double ipow(double r, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= r;
  return out;
}

std::string at_radius(double r) {
  std::ostringstream os;
  os.precision(17);
  os << " at r = " << r;
  return os.str();
}

}  // namespace

void IvpControls::validate() const {
  if (!(h0 > 0.0)) throw InvalidControls("h0 must be positive");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvalidControls("tolerances must be positive");
  if (!(eps_wall > 0.0) || !(eps_decay > 0.0)) throw InvalidControls("eps_wall and eps_decay must be positive");
  if (!(r_max > h0)) throw InvalidControls("r_max must exceed h0");
  if (max_steps < 1) throw InvalidControls("max_steps must be positive");
  if (samples_per_step < 0) throw InvalidControls("samples_per_step must be non-negative");
}

double decay_length_scale(const ReducedSystem& rs, const Eigen::VectorXd& alpha) {
  const double n = rs.dimension();
  double scale = 0.0;
  for (int m = 0; m < rs.size(); ++m) {
    double fastest = std::numeric_limits<double>::infinity();
    auto consider = [&](double g, double sigma) {
      if (g > 0.0) {
        const double r = std::pow(alpha[m] * (2.0 - sigma) * (n - sigma) / g, 1.0 / (2.0 - sigma));
        fastest = std::min(fastest, r);
      }
    };
    const ChainRow& rw = rs.row(m);
    if (const auto* link = std::get_if<ChainLink>(&rw)) {
      consider(alpha[link->target], 0.0);
    } else {
      for (const auto& mono : std::get<SourceTerm>(rw).monomials) {
        double g = mono.coef;
        for (const auto& [idx, p] : mono.factors) g *= std::pow(alpha[idx], p);
        consider(g, mono.sigma);
      }
    }
    if (std::isfinite(fastest)) scale = std::max(scale, fastest);
  }
  return scale;
}

std::int64_t integration_count() { return g_integrations.load(); }

IntegrationResult integrate(const ReducedSystem& rs, const Eigen::VectorXd& alpha,
                            const IvpControls& c) {
  c.validate();
  ++g_integrations;

  const int L = rs.size();
  const int nm1 = rs.dimension() - 1;
  const double nm2 = rs.dimension() - 2.0;
  using State = Eigen::VectorXd;

  // State is (w, rho) with rho = r^{n-1} w', so rho' = -r^{n-1} f(r, w) <= 0.
  State src(L);
  auto rhs = [&](double r, const State& y, State& dy) {
    const double rn = ipow(r, nm1);
    dy.resize(2 * L);
    const State w = y.head(L);
    rs.rhs(r, w, src);
    dy.head(L) = y.tail(L) / rn;
    dy.tail(L) = -rn * src;
  };

  auto [w0, dw0] = series_start<double>(rs, alpha, c.h0);

  IntegrationResult result;
  Trajectory& traj = result.trajectory;
  traj.alpha = alpha;

  auto record = [&](double r, const State& y) {
    const State w = y.head(L);
    const State dw = y.tail(L) / ipow(r, nm1);
    if (w.minCoeff() > 0.0) traj.max_slope = std::max(traj.max_slope, dw.maxCoeff());
    traj.grid.push_back(r);
    traj.values.push_back(w);
    traj.derivs.push_back(dw);
  };
  auto tail_bound = [&](double r, const State& y) -> State {
    return y.head(L) + (r / nm2) * y.tail(L) / ipow(r, nm1);
  };

  double r = c.h0;
  State y(2 * L);
  y.head(L) = w0;
  y.tail(L) = ipow(r, nm1) * dw0;
  record(r, y);

  const double length = decay_length_scale(rs, alpha);
  DormandPrince54<double> stepper;
  State k1;
  rhs(r, y, k1);
  double h = c.h0;
  State atol(2 * L);
  std::int64_t attempts = 0;

  while (r < c.r_max) {
    if (++attempts > c.max_steps) {
      throw StepLimitExceeded("step limit " + std::to_string(c.max_steps) + " exceeded" + at_radius(r));
    }
    h = std::min({h, c.r_max - r, r});
    if (h < 1e-13 * r) throw StiffnessFailure("step size underflow" + at_radius(r));

    atol.head(L).setConstant(c.abs_tol);
    atol.tail(L).setConstant(c.abs_tol * ipow(r, nm1));
    auto step = stepper.attempt(rhs, r, y, k1, h, atol, c.rel_tol);
    if (!std::isfinite(step.error) || !step.y1.allFinite()) {
      ++traj.rejected_steps;
      h *= 0.25;
      continue;
    }
    if (step.error > 1.0) {
      ++traj.rejected_steps;
      h = stepper.shrink(h, step.error);
      continue;
    }
    ++traj.accepted_steps;
    const double r_new = (r + h >= c.r_max) ? c.r_max : r + h;
    auto sample_interior = [&](double r_end) {
      for (int s = 1; s <= c.samples_per_step; ++s) {
        const double rs_ = r + (r_end - r) * s / (c.samples_per_step + 1);
        record(rs_, step.interpolate(rs_));
      }
    };

    if (step.y1.head(L).minCoeff() <= 0.0) {
      auto values_at = [&](double rr) -> State { return step.interpolate(rr).head(L); };
      const WallEvent ev = locate_wall_event(values_at, r, r_new, c.eps_wall);
      sample_interior(ev.r0);
      const State y0 = step.interpolate(ev.r0);
      record(ev.r0, y0);
      result.outcome = WallHit{ev.r0, ev.index, y0.head(L)};
      return result;
    }

    sample_interior(r_new);
    record(r_new, step.y1);
    h = stepper.grow(h, step.error);
    r = r_new;
    y = step.y1;
    k1 = step.k7;

    if (r > 10.0 * length) {
      const State bound = tail_bound(r, y);
      if (bound.minCoeff() >= 0.0 && bound.maxCoeff() < c.eps_decay) {
        result.outcome = Decayed{bound, r};
        return result;
      }
    }
  }
  result.outcome = Truncated{r, y.head(L), tail_bound(r, y)};
  return result;
}

}  // namespace polyshoot
