#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "polyshoot/integrator.hpp"

using namespace polyshoot;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

double interpolate(const Trajectory& t, double r, int m = 0) {
  auto it = std::lower_bound(t.grid.begin(), t.grid.end(), r);
  const std::size_t i = std::max<std::size_t>(1, it - t.grid.begin());
  // Cubic Hermite on [r_{i-1}, r_i].
  const double r0 = t.grid[i - 1], r1 = t.grid[i], h = r1 - r0, s = (r - r0) / h;
  const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
  const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
  return h00 * t.values[i - 1][m] + h10 * h * t.derivs[i - 1][m] + h01 * t.values[i][m] + h11 * h * t.derivs[i][m];
}

}  // namespace

TEST_CASE("series start: n=3, f=u^5, alpha=1") {
  const ReducedSystem rs = reduce(oracle::scalar(3, 1, 0, 5));
  for (double h0 : {1e-6, 1e-3, 0.1}) {
    const auto [w, dw] = series_start<double>(rs, vec({1.0}), h0);
    CHECK(w[0] == doctest::Approx(1.0 - h0 * h0 / 6.0).epsilon(1e-15));
    CHECK(dw[0] == doctest::Approx(-h0 / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("series start: n=3, f=u^2/r, alpha=1") {
  const ReducedSystem rs = reduce(oracle::scalar(3, 1, 1.0, 2));
  const double h0 = 1e-4;
  const auto [w, dw] = series_start<double>(rs, vec({1.0}), h0);
  CHECK(w[0] == doctest::Approx(1.0 - h0 / 2.0).epsilon(1e-15));
  CHECK(dw[0] == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("series start: vanishing source leaves alpha") {
  const ReducedSystem rs = reduce(oracle::scalar(3, 1, 0, 5, 1e-300));
  const auto [w, dw] = series_start<double>(rs, vec({1.0}), 1e-6);
  CHECK(w[0] == 1.0);
  CHECK(dw[0] == doctest::Approx(0.0));
}

TEST_CASE("series start: chain link uses the next level") {
  const ReducedSystem rs = reduce(oracle::scalar(5, 2, 0, 9));
  const double h0 = 1e-3;
  const auto [w, dw] = series_start<double>(rs, vec({1.0, 5.0}), h0);
  CHECK(w[0] == doctest::Approx(1.0 - 5.0 * h0 * h0 / 10.0).epsilon(1e-15));
  CHECK(dw[0] == doctest::Approx(-5.0 * h0 / 5.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(5.0 - h0 * h0 / 10.0).epsilon(1e-15));
}

TEST_CASE("series start rejects non-positive alpha") {
  const ReducedSystem rs = reduce(oracle::lane_emden(5, 5));
  CHECK_THROWS_AS(series_start<double>(rs, vec({1.0, 0.0}), 1e-6), NonPositiveAlpha);
}

TEST_CASE("wall event localisation") {
  auto linear = [](double r) { return vec({2.0 * (1.5 - r)}); };
  const WallEvent ev = locate_wall_event(linear, 1.0, 2.0, 1e-12);
  CHECK(ev.index == 0);
  CHECK(ev.r0 == doctest::Approx(1.5).epsilon(1e-11));
  CHECK(ev.r0 <= 1.5);

  auto two = [](double r) { return vec({1.7 - r, 1.4 - r}); };
  CHECK(locate_wall_event(two, 1.0, 2.0, 1e-12).index == 1);

  auto tie = [](double r) { return vec({1.5 - r, 1.5 - r}); };
  CHECK(locate_wall_event(tie, 1.0, 2.0, 1e-12).index == 0);
}

TEST_CASE("critical Lane-Emden profile") {
  const ReducedSystem rs = reduce(oracle::scalar(3, 1, 0, 5));
  const double a = std::pow(3.0, 0.25);
  const auto res = integrate(rs, vec({a}), IvpControls{});
  REQUIRE(std::holds_alternative<Decayed>(res.outcome));
  const Trajectory& t = res.trajectory;
  double err = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double u = oracle::critical_n3(t.grid[i]);
    err = std::max(err, std::abs(t.values[i][0] - u) / u);
  }
  CHECK(err < 1e-8);
}

TEST_CASE("trajectory invariants") {
  const ReducedSystem rs = reduce(oracle::scalar(3, 1, 0, 2));
  IvpControls c;
  const auto res = integrate(rs, vec({1.0}), c);
  const Trajectory& t = res.trajectory;
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.grid[i] > t.grid[i - 1]);
  const auto [w0, dw0] = series_start<double>(rs, vec({1.0}), c.h0);
  CHECK(t.grid.front() == c.h0);
  CHECK(t.values.front()[0] == w0[0]);
  CHECK(t.derivs.front()[0] == dw0[0]);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t.values[i][0] > 0.0);
    CHECK(t.derivs[i][0] <= 0.0);
  }
  CHECK(t.max_slope <= 0.0);
}

TEST_CASE("subcritical wall hit agrees with a fixed-step oracle") {
  const ReducedSystem rs = reduce(oracle::scalar(3, 1, 0, 2));
  const auto res = integrate(rs, vec({1.0}), IvpControls{});
  REQUIRE(std::holds_alternative<WallHit>(res.outcome));
  const auto& hit = std::get<WallHit>(res.outcome);
  const double r0_oracle = oracle::rk4_first_zero(3, 2.0, 1.0, 1e-4);
  CHECK(hit.hit_index == 0);
  CHECK(hit.r0 == doctest::Approx(r0_oracle).epsilon(1e-8));
  CHECK(hit.state[0] >= 0.0);
  CHECK(hit.state[0] < 1e-9);
}

TEST_CASE("scaling covariance") {
  for (double p : {2.0, 3.0}) {
    for (double sigma : {0.0, 0.5}) {
      const SystemSpec spec = oracle::scalar(3, 1, sigma, p);
      const ReducedSystem rs = reduce(spec);
      const double mu = (2.0 - sigma) / (p - 1.0);
      const auto base = integrate(rs, vec({1.0}), IvpControls{});
      REQUIRE(std::holds_alternative<WallHit>(base.outcome));
      const double r0 = std::get<WallHit>(base.outcome).r0;
      for (double c : {0.5, 2.0}) {
        const auto scaled = integrate(rs, vec({std::pow(c, mu)}), IvpControls{});
        REQUIRE(std::holds_alternative<WallHit>(scaled.outcome));
        CHECK(std::get<WallHit>(scaled.outcome).r0 == doctest::Approx(r0 / c).epsilon(1e-7));
      }
    }
  }
  // Decay is invariant too.
  const ReducedSystem crit = reduce(oracle::scalar(3, 1, 0, 5));
  for (double c : {0.5, 2.0}) {
    const auto res = integrate(crit, vec({std::pow(3.0, 0.25) * std::sqrt(c)}), IvpControls{});
    CHECK(std::holds_alternative<Decayed>(res.outcome));
  }
}

TEST_CASE("refinement convergence") {
  const ReducedSystem rs = reduce(oracle::scalar(3, 1, 0, 2));
  auto at = [&](double tol) {
    IvpControls c;
    c.rel_tol = tol;
    c.abs_tol = tol * 1e-2;
    c.h0 = 1e-6;
    const auto res = integrate(rs, vec({1.0}), c);
    return std::vector<double>{interpolate(res.trajectory, 1.0), interpolate(res.trajectory, 3.0)};
  };
  const auto ref = at(1e-12);
  const auto coarse = at(1e-6);
  const auto fine = at(1e-8);
  for (int i = 0; i < 2; ++i) {
    const double e_coarse = std::abs(coarse[i] - ref[i]);
    const double e_fine = std::abs(fine[i] - ref[i]);
    CHECK(e_fine < e_coarse);
    CHECK(e_fine < 1e-7);
  }
}

TEST_CASE("monotonicity on random specs") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> adist(0.2, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const ReducedSystem rs = reduce(oracle::random_spec(rng));
    Eigen::VectorXd alpha(rs.size());
    for (int m = 0; m < rs.size(); ++m) alpha[m] = adist(rng);
    const auto res = integrate(rs, alpha, IvpControls{});
    CHECK(res.trajectory.max_slope <= 1e-12);
    for (const auto& w : res.trajectory.values) CHECK(w.minCoeff() >= -1e-10);
  }
}

TEST_CASE("biharmonic chain follows the exact profile") {
  const ReducedSystem rs = reduce(oracle::scalar(5, 2, 0, 9));
  const auto res = integrate(rs, vec({oracle::biharmonic_u(0), oracle::biharmonic_lap(0)}), IvpControls{});
  const Trajectory& t = res.trajectory;
  double err0 = 0.0, err1 = 0.0;
  for (std::size_t i = 0; i < t.size() && t.grid[i] <= 30.0; ++i) {
    err0 = std::max(err0, std::abs(t.values[i][0] / oracle::biharmonic_u(t.grid[i]) - 1.0));
    err1 = std::max(err1, std::abs(t.values[i][1] / oracle::biharmonic_lap(t.grid[i]) - 1.0));
  }
  CHECK(err0 < 1e-5);
  CHECK(err1 < 1e-5);
}

TEST_CASE("supercritical p=7 decays slowly and is resolved with a long cutoff") {
  const ReducedSystem rs = reduce(oracle::scalar(3, 1, 0, 7));
  const auto short_run = integrate(rs, vec({1.0}), IvpControls{});
  CHECK(std::holds_alternative<Truncated>(short_run.outcome));
  CHECK(std::get<Truncated>(short_run.outcome).tail_bound.minCoeff() > 0.0);
  IvpControls c;
  c.r_max = 1e20;
  const auto long_run = integrate(rs, vec({1.0}), c);
  CHECK(std::holds_alternative<Decayed>(long_run.outcome));
}

TEST_CASE("errors") {
  const ReducedSystem rs = reduce(oracle::scalar(3, 1, 0, 2));
  IvpControls c;
  c.max_steps = 5;
  CHECK_THROWS_AS(integrate(rs, vec({1.0}), c), StepLimitExceeded);
  IvpControls bad;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(integrate(rs, vec({1.0}), bad), InvalidControls);
  CHECK_THROWS_AS(integrate(rs, vec({0.0}), IvpControls{}), NonPositiveAlpha);
}

TEST_CASE("integration counter") {
  const ReducedSystem rs = reduce(oracle::scalar(3, 1, 0, 2));
  const auto before = integration_count();
  integrate(rs, vec({1.0}), IvpControls{});
  CHECK(integration_count() == before + 1);
}
