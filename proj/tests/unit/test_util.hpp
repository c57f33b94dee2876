#pragma once

#include <functional>
#include <random>

#include "core/types.hpp"
#include "core/vswf.hpp"

namespace fmps::testing {

using Field = std::function<CVec3(const Vec3&)>;

/// Curl by a 4th-order central-difference stencil.
inline CVec3 fd_curl(const Field& f, const Vec3& x, double h) {
  auto deriv = [&](int axis) {
    Vec3 e = Vec3::Zero();
    e[axis] = h;
    return CVec3((-f(x + 2 * e) + 8.0 * f(x + e) - 8.0 * f(x - e) + f(x - 2 * e)) / (12.0 * h));
  };
  const CVec3 dx = deriv(0), dy = deriv(1), dz = deriv(2);
  return {dy.z() - dz.y(), dz.x() - dx.z(), dx.y() - dy.x()};
}

inline ModeCoeffs random_coeffs(int p, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ModeCoeffs c(p);
  for (int n = 1; n <= p; ++n) {
    for (int m = -n; m <= n; ++m) {
      c.a(n, m) = {g(rng), g(rng)};
      c.b(n, m) = {g(rng), g(rng)};
    }
  }
  return c;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized();
}

/// Uniform point in the ball of radius r about c.
inline Vec3 random_in_ball(std::mt19937_64& rng, const Vec3& c, double r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return c + r * std::cbrt(u(rng)) * random_unit(rng);
}

inline double max_abs(const CVec3& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace fmps::testing
