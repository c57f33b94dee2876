#pragma once

#include <array>
#include <vector>

#include <Eigen/Geometry>

#include "core/types.hpp"

namespace fmps {

/// Symmetric rule on a triangle: barycentric nodes, weights summing to 1 (multiply by area).
struct TriangleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weight;
  int degree = 0;
};

const TriangleRule& dunavant7();   ///< degree 5
const TriangleRule& dunavant16();  ///< degree 8

/// Closed-form integrals over the flat triangle abc, for any observation point x:
/// inv_r = integral of 1/|x - y| dA_y, grad = integral of grad_x (1/|x - y|) dA_y.
/// For x in the plane inside the triangle the in-plane part of grad is a principal value.
struct LaplacePotentials {
  double inv_r = 0.0;
  Vec3 grad = Vec3::Zero();
};

LaplacePotentials laplace_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x);

}  // namespace fmps
