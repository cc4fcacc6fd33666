#pragma once

#include <algorithm>

namespace bilayer {

// Time-dependent scalar data: constant, linear ramp to a plateau, or a
// rectangular pulse active on (t_on, t_off].
struct TimeFn {
  enum class Kind { constant, ramp, pulse };
  Kind kind = Kind::constant;
  double value = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;

  double operator()(double t) const {
    switch (kind) {
      case Kind::constant: return value;
      case Kind::ramp: return t1 > 0.0 ? value * std::min(1.0, t / t1) : value;
      case Kind::pulse: return (t > t0 && t <= t1) ? value : 0.0;
    }
    return 0.0;
  }

  static TimeFn constant_fn(double v) { return {Kind::constant, v, 0.0, 0.0}; }
  static TimeFn ramp_fn(double v, double duration) { return {Kind::ramp, v, 0.0, duration}; }
  static TimeFn pulse_fn(double v, double on, double off) { return {Kind::pulse, v, on, off}; }

  bool operator==(const TimeFn&) const = default;
};

}  // namespace bilayer
