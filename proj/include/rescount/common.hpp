#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rescount {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx iu{0.0, 1.0};  // imaginary unit

// All recoverable failures surface as exceptions of this type; callers that
// treat a condition as a flag (e.g. admissibility) never see it as a throw.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Volume of {|x| < r} in dimension d (d = 1 or 3 supported).
inline double ball_volume(int d, double r) {
  switch (d) {
    case 1: return 2.0 * r;
    case 3: return 4.0 / 3.0 * pi * r * r * r;
    default: throw error("ball_volume: unsupported dimension " + std::to_string(d));
  }
}

inline double sqr(double x) { return x * x; }

}  // namespace rescount
