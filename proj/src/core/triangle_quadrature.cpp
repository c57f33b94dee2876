#include "core/triangle_quadrature.hpp"

#include <cmath>

namespace fmps {

namespace {

void add_orbit3(TriangleRule& r, double w, double a, double b) {
  r.bary.push_back({a, b, b});
  r.bary.push_back({b, a, b});
  r.bary.push_back({b, b, a});
  for (int i = 0; i < 3; ++i) r.weight.push_back(w);
}

void add_orbit6(TriangleRule& r, double w, double a, double b, double c) {
  for (const auto& t : {std::array<double, 3>{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}) {
    r.bary.push_back(t);
    r.weight.push_back(w);
  }
}

TriangleRule make7() {
  TriangleRule r;
  r.degree = 5;
  const double s = std::sqrt(15.0);
  r.bary.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
  r.weight.push_back(0.225);
  add_orbit3(r, (155.0 + s) / 1200.0, (9.0 - 2.0 * s) / 21.0, (6.0 + s) / 21.0);
  add_orbit3(r, (155.0 - s) / 1200.0, (9.0 + 2.0 * s) / 21.0, (6.0 - s) / 21.0);
  return r;
}

TriangleRule make16() {
  TriangleRule r;
  r.degree = 8;
  r.bary.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
  r.weight.push_back(0.144315607677787);
  add_orbit3(r, 0.095091634267285, 0.081414823414554, 0.459292588292723);
  add_orbit3(r, 0.103217370534718, 0.658861384496480, 0.170569307751760);
  add_orbit3(r, 0.032458497623198, 0.898905543365938, 0.050547228317031);
  add_orbit6(r, 0.027230314174435, 0.008394777409958, 0.263112829634638, 0.728492392955404);
  return r;
}

}  // namespace

const TriangleRule& dunavant7() {
  static const TriangleRule r = make7();
  return r;
}

const TriangleRule& dunavant16() {
  static const TriangleRule r = make16();
  return r;
}

LaplacePotentials laplace_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x) {
  const Vec3 n = (b - a).cross(c - a).normalized();
  const double d = n.dot(x - a);
  const double ad = std::abs(d);
  const Vec3 rho = x - d * n;
  const double scale = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  const Vec3* corners[3] = {&a, &b, &c};

  LaplacePotentials out;
  double beta_sum = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Vec3& p0 = *corners[e];
    const Vec3& p1 = *corners[(e + 1) % 3];
    const Vec3 lhat = (p1 - p0).normalized();
    const Vec3 uhat = lhat.cross(n);  // outward in-plane edge normal
    const double lp = (p1 - rho).dot(lhat);
    const double lm = (p0 - rho).dot(lhat);
    const double pe = (p0 - rho).dot(uhat);
    const double r0sq = pe * pe + d * d;
    const double rp = (x - p1).norm();
    const double rm = (x - p0).norm();

    // log((R+ + l+)/(R- + l-)). R + l with l < 0 cancels; use R + l = r0^2 / (R - l) there.
    double log_term;
    if (lm >= 0.0) {
      log_term = std::log((rp + lp) / (rm + lm));
    } else if (lp <= 0.0) {
      log_term = std::log((rm - lm) / (rp - lp));
    } else {
      log_term = std::log((rp + lp) * (rm - lm) / r0sq);
    }

    double beta = 0.0;
    if (std::abs(pe) > 1e-14 * scale) {
      beta = std::atan(pe * lp / (r0sq + ad * rp)) - std::atan(pe * lm / (r0sq + ad * rm));
    }
    beta_sum += beta;
    if (std::abs(pe) > 1e-14 * scale) out.inv_r += pe * log_term;
    out.inv_r -= ad * beta;
    out.grad -= uhat * log_term;
  }
  const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  out.grad -= sgn * beta_sum * n;
  return out;
}

}  // namespace fmps
