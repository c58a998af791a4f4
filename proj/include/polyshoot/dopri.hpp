#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "polyshoot/system_spec.hpp"

namespace polyshoot {

/// Dormand-Prince 5(4) embedded pair with the 4th order continuous extension
/// and a PI step-size controller.
template <typename Scalar>
class DormandPrince54 {
 public:
  using State = Vec<Scalar>;

  /// One attempted step. When accepted, interpolate() is valid on [t0, t0 + h].
  struct Step {
    Scalar t0{0};
    Scalar h{0};
    State y1;
    State k7;
    Scalar error{0};
    std::array<State, 5> cont;

    State interpolate(Scalar t) const {
      const Scalar th = (t - t0) / h;
      const Scalar th1 = Scalar(1) - th;
      return cont[0] + th * (cont[1] + th1 * (cont[2] + th * (cont[3] + th1 * cont[4])));
    }
  };

  /// Error is the RMS of the local error weighted by atol_i + rtol * max(|y0_i|, |y1_i|);
  /// a step is acceptable when error <= 1.
  template <class F>
  Step attempt(F&& f, Scalar t, const State& y, const State& k1, Scalar h, const State& atol,
               Scalar rtol) const {
    constexpr Scalar a21 = Scalar(1) / 5;
    constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
    constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
    constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                     a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
    constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33,
                     a63 = Scalar(46732) / 5247, a64 = Scalar(49) / 176,
                     a65 = Scalar(-5103) / 18656;
    constexpr Scalar b1 = Scalar(35) / 384, b3 = Scalar(500) / 1113, b4 = Scalar(125) / 192,
                     b5 = Scalar(-2187) / 6784, b6 = Scalar(11) / 84;
    constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695, e4 = Scalar(71) / 1920,
                     e5 = Scalar(-17253) / 339200, e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;
    constexpr Scalar d1 = Scalar(-12715105075.0) / Scalar(11282082432.0),
                     d3 = Scalar(87487479700.0) / Scalar(32700410799.0),
                     d4 = Scalar(-10690763975.0) / Scalar(1880347072.0),
                     d5 = Scalar(701980252875.0) / Scalar(199316789632.0),
                     d6 = Scalar(-1453857185.0) / Scalar(822651844.0),
                     d7 = Scalar(69997945.0) / Scalar(29380423.0);

    State k2, k3, k4, k5, k6;
    f(t + h / 5, State(y + h * a21 * k1), k2);
    f(t + h * Scalar(3) / 10, State(y + h * (a31 * k1 + a32 * k2)), k3);
    f(t + h * Scalar(4) / 5, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)), k4);
    f(t + h * Scalar(8) / 9, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)), k5);
    f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)), k6);

    Step step;
    step.t0 = t;
    step.h = h;
    step.y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + h, step.y1, step.k7);

    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * step.k7);
    const State scale = atol.array() + rtol * y.cwiseAbs().cwiseMax(step.y1.cwiseAbs()).array();
    step.error = std::sqrt((err.array() / scale.array()).square().mean());

    step.cont[0] = y;
    step.cont[1] = step.y1 - y;
    step.cont[2] = h * k1 - step.cont[1];
    step.cont[3] = step.cont[1] - h * step.k7 - step.cont[2];
    step.cont[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * step.k7);
    return step;
  }

  /// Next step size after an accepted step (PI control).
  Scalar grow(Scalar h, Scalar error) {
    using std::pow;
    const Scalar fac11 = pow(std::max(error, Scalar(1e-16)), expo1_);
    Scalar fac = fac11 / pow(err_old_, beta_);
    fac = std::clamp(fac / safe_, Scalar(1) / fac_max_, Scalar(1) / fac_min_);
    err_old_ = std::max(error, Scalar(1e-4));
    return h / fac;
  }

  /// Next step size after a rejected step.
  Scalar shrink(Scalar h, Scalar error) const {
    using std::pow;
    const Scalar fac11 = pow(error, expo1_);
    return h / std::min(Scalar(1) / fac_min_, fac11 / safe_);
  }

 private:
  Scalar beta_ = Scalar(0.04);
  Scalar expo1_ = Scalar(0.2) - Scalar(0.04) * Scalar(0.75);
  Scalar safe_ = Scalar(0.9);
  Scalar fac_min_ = Scalar(0.2);
  Scalar fac_max_ = Scalar(10);
  Scalar err_old_ = Scalar(1e-4);
};

}  // namespace polyshoot
