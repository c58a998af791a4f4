#include "polyshoot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

namespace polyshoot {

double simpson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t N = x.size();
  if (N != y.size()) throw std::invalid_argument("simpson: size mismatch");
  if (N < 2) return 0.0;
  if (N == 2) return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);

  double total = 0.0;
  std::size_t i = 0;
  for (; i + 2 < N; i += 2) {
    const double h0 = x[i + 1] - x[i];
    const double h1 = x[i + 2] - x[i + 1];
    const double hs = h0 + h1;
    total += hs / 6.0 *
             ((2.0 - h1 / h0) * y[i] + hs * hs / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
  }
  if (i + 1 < N) {
    // Last interval [x_{N-2}, x_{N-1}] from the parabola through three points.
    const double h0 = x[N - 2] - x[N - 3];
    const double h1 = x[N - 1] - x[N - 2];
    total += y[N - 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1)) +
             y[N - 2] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0) -
             y[N - 3] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
  }
  return total;
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double pohozaev_bracket(const RecognisedShape& shape) {
  // Summed over a common denominator so the critical exponent cancels exactly.
  if (const auto* sc = std::get_if<ScalarShape>(&shape)) {
    const double n = sc->n;
    const double k = sc->k;
    return ((2.0 * k - n) * (1.0 + sc->p) + 2.0 * (n - sc->sigma)) / (1.0 + sc->p);
  }
  if (const auto* pr = std::get_if<PairShape>(&shape)) {
    const double n = pr->n;
    const double k = pr->k;
    const double p1 = 1.0 + pr->p;
    const double q1 = 1.0 + pr->q;
    return ((2.0 * k - n) * p1 * q1 + (n - pr->sigma1) * p1 + (n - pr->sigma2) * q1) / (p1 * q1);
  }
  throw InvalidSpec("no Pohozaev bracket for this shape");
}

namespace {

// Integrals over the ball B_R in radial form: omega * int_0^R g(r) r^{n-1} dr.
// The piece [0, h0] is closed with g frozen at h0.
class BallIntegrator {
 public:
  BallIntegrator(const Trajectory& traj, int n) : traj_(traj), n_(n), omega_(sphere_area(n)) {
    if (traj.size() < 3) throw QuadratureFailure("trajectory has fewer than three samples");
    for (std::size_t i = 1; i < traj.size(); ++i) {
      if (!(traj.grid[i] > traj.grid[i - 1])) throw QuadratureFailure("trajectory grid is not increasing");
    }
  }

  template <class G>
  double operator()(G&& g) const {
    std::vector<double> y(traj_.size());
    for (std::size_t i = 0; i < traj_.size(); ++i) {
      const double r = traj_.grid[i];
      y[i] = g(i) * std::pow(r, n_ - 1);
    }
    const double h0 = traj_.grid.front();
    const double cap = g(std::size_t{0}) * std::pow(h0, n_) / n_;
    const double value = omega_ * (cap + simpson(traj_.grid, y));
    if (!std::isfinite(value)) throw QuadratureFailure("non-finite volume integral");
    return value;
  }

  double omega() const { return omega_; }

 private:
  const Trajectory& traj_;
  int n_;
  double omega_;
};

double relative_spread(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  return scale > 0.0 ? (*hi - *lo) / scale : 0.0;
}

// pair(j) = N + 1 - j on the whole chain (0-based: N - 1 - m).
PohozaevReport energy_pairings(const Trajectory& traj, const ReducedSystem& rs, const BallIntegrator& ball) {
  const int N = rs.size();
  if (traj.components() != N) throw std::invalid_argument("trajectory does not match the system");

  PohozaevReport rep;
  for (int m = 0; m < N; ++m) {
    const int pm = N - 1 - m;
    rep.energy_values.push_back(ball([&](std::size_t i) { return traj.derivs[i][m] * traj.derivs[i][pm]; }));
  }
  for (int m = 0; m < N; ++m) {
    const int pm = N - 1 - m;
    rep.energy_values.push_back(ball([&](std::size_t i) {
      return rs.row_value(m, traj.grid[i], traj.values[i]) * traj.values[i][pm];
    }));
  }
  rep.energy_spread = relative_spread(rep.energy_values);

  const Eigen::VectorXd& wR = traj.values.back();
  rep.radius = traj.grid.back();
  rep.boundary_values_max = wR.cwiseAbs().maxCoeff();
  const double size = std::max(traj.alpha.cwiseAbs().maxCoeff(), traj.values.front().cwiseAbs().maxCoeff());
  rep.navier_data = rep.boundary_values_max <= 1e-6 * size;
  return rep;
}

}  // namespace

PohozaevReport energy_identity(const Trajectory& traj, const SystemSpec& spec) {
  const ReducedSystem rs = reduce(spec);
  const BallIntegrator ball(traj, spec.n);
  return energy_pairings(traj, rs, ball);
}

PohozaevReport pohozaev_residual(const Trajectory& traj, const SystemSpec& spec) {
  const RecognisedShape shape = recognise_shape(spec);
  if (std::holds_alternative<std::monostate>(shape)) {
    throw InvalidSpec("Pohozaev identity needs a single-monomial scalar equation or a two-equation system");
  }
  const ReducedSystem rs = reduce(spec);
  const BallIntegrator ball(traj, spec.n);
  PohozaevReport rep = energy_pairings(traj, rs, ball);

  const int N = rs.size();
  const double n = spec.n;
  const double R = traj.grid.back();
  const Eigen::VectorXd& dR = traj.derivs.back();
  // G_j and P_j, 1-based as in the identities.
  auto G = [&](int j) { return rep.energy_values[j - 1]; };
  auto P = [&](int j) { return rep.energy_values[N + j - 1]; };
  auto flux = [&](int j) { return ball.omega() * std::pow(R, n) * dR[j - 1] * dR[N - j]; };

  rep.bracket = pohozaev_bracket(shape);
  if (const auto* sc = std::get_if<ScalarShape>(&shape)) {
    const int k = sc->k;
    double interior = 0.0;
    for (int j = 1; j <= k; ++j) interior += (2.0 - n) * G(j);
    for (int j = 1; j <= k - 1; ++j) interior += n * P(j);
    interior += 2.0 * (n - sc->sigma) / (1.0 + sc->p) * P(k);
    rep.interior_combination = interior;
    for (int j = 1; j <= k; ++j) rep.boundary_flux += flux(j);
  } else {
    const auto& pr = std::get<PairShape>(shape);
    const int k = pr.k;
    double interior = 0.0;
    for (int j = 1; j <= k; ++j) interior += (2.0 - n) * G(j);
    for (int j = 1; j <= k - 1; ++j) interior += n * P(j);
    interior += (n - pr.sigma1) / (1.0 + pr.q) * P(k);
    interior += (n - pr.sigma2) / (1.0 + pr.p) * P(2 * k);
    rep.interior_combination = interior;
    for (int j = 1; j <= k; ++j) rep.boundary_flux += flux(j);

    // Cross terms: f_1 w_{k+1} (x.grad w_1)/w_1 and f_2 w_1 (x.grad w_{k+1})/w_{k+1}.
    const int u = 0;
    const int v = k;
    auto cross = [&](int row, int partner, int moved) {
      return ball([&](std::size_t i) {
        const double wm = traj.values[i][moved];
        if (!(wm > 0.0)) return 0.0;
        const double r = traj.grid[i];
        return rs.row_value(row, r, traj.values[i]) * traj.values[i][partner] * r * traj.derivs[i][moved] / wm;
      });
    };
    double extra = 0.0;
    if (pr.s != 0.0) extra -= pr.s / (1.0 + pr.q) * cross(k - 1, v, u);
    if (pr.t != 0.0) extra -= pr.t / (1.0 + pr.p) * cross(2 * k - 1, u, v);
    rep.extra_terms = extra;
  }

  const double scale = std::max({std::abs(rep.interior_combination), std::abs(rep.boundary_flux),
                                 std::abs(rep.extra_terms), std::numeric_limits<double>::min()});
  rep.residual = std::abs(rep.interior_combination - rep.boundary_flux - rep.extra_terms) / scale;
  rep.flux_nonnegative = rep.boundary_flux >= 0.0;
  rep.bracket_nonpositive = rep.bracket <= 1e-12;
  return rep;
}

DecayFit decay_fit(const Trajectory& traj, std::optional<double> r_lo, std::optional<double> r_hi, int component) {
  if (traj.size() == 0) throw WindowTooShort("empty trajectory");
  if (component < 0 || component >= traj.components()) throw std::invalid_argument("component out of range");
  DecayFit fit;
  fit.r_hi = r_hi.value_or(traj.grid.back());
  fit.r_lo = r_lo.value_or(fit.r_hi / 10.0);
  if (!(fit.r_lo < fit.r_hi) || fit.r_lo < traj.grid.front() || fit.r_hi > traj.grid.back()) {
    throw WindowTooShort("window must satisfy h0 <= r_lo < r_hi <= r_end");
  }
  if (fit.r_hi / fit.r_lo < 2.0) throw WindowTooShort("window spans less than a factor of 2 in r");

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double r = traj.grid[i];
    const double w = traj.values[i][component];
    if (r < fit.r_lo || r > fit.r_hi || !(w > 0.0)) continue;
    xs.push_back(std::log(r));
    ys.push_back(std::log(w));
  }
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 8) throw WindowTooShort("fewer than 8 positive samples in the window");

  Eigen::MatrixXd A(fit.points, 2);
  Eigen::VectorXd b(fit.points);
  for (int i = 0; i < fit.points; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = xs[i];
    b[i] = ys[i];
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  fit.fitted_rate = coef[1];
  fit.rms = std::sqrt((A * coef - b).squaredNorm() / fit.points);
  return fit;
}

}  // namespace polyshoot
