#include "core/mie.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fmps {

namespace {

// Solves [a11 a12; a21 a22] (x, y) = (r1, r2) by Cramer after equilibrating rows and then
// columns (at high degree the interior column is many orders smaller than the exterior one).
bool solve2(cplx a11, cplx a12, cplx a21, cplx a22, cplx r1, cplx r2, cplx& x, cplx& y) {
  const double s1 = std::abs(a11) + std::abs(a12);
  const double s2 = std::abs(a21) + std::abs(a22);
  if (!(s1 > 0.0) || !(s2 > 0.0)) return false;
  a11 /= s1, a12 /= s1, r1 /= s1;
  a21 /= s2, a22 /= s2, r2 /= s2;
  const double c1 = std::max(std::abs(a11), std::abs(a21));
  const double c2 = std::max(std::abs(a12), std::abs(a22));
  if (!(c1 > 0.0) || !(c2 > 0.0)) return false;
  a11 /= c1, a21 /= c1;
  a12 /= c2, a22 /= c2;
  const cplx det = a11 * a22 - a12 * a21;
  if (!(std::abs(det) >= 1e-14)) return false;
  x = (r1 * a22 - a12 * r2) / det / c1;
  y = (a11 * r2 - a21 * r1) / det / c2;
  return true;
}

void check_order(int p, const char* who) {
  if (p < 0) throw DomainError(std::string(who) + ": negative order");
}

}  // namespace

ScatteringMatrix ScatteringMatrix::diagonal(int p, std::vector<cplx> sa, std::vector<cplx> sb, const Medium& exterior,
                                            double radius) {
  check_order(p, "ScatteringMatrix");
  if (sa.size() != static_cast<std::size_t>(p + 1) || sb.size() != sa.size()) {
    throw DomainError("ScatteringMatrix: diagonal entries must have p + 1 values");
  }
  ScatteringMatrix s;
  s.p_ = p;
  s.form_ = Form::Diagonal;
  s.exterior_ = exterior;
  s.radius_ = radius;
  s.sa_ = std::move(sa);
  s.sb_ = std::move(sb);
  return s;
}

ScatteringMatrix ScatteringMatrix::dense(int p, Eigen::MatrixXcd m, const Medium& exterior, double radius,
                                         std::uint64_t mesh_fingerprint) {
  check_order(p, "ScatteringMatrix");
  const Eigen::Index dim = 2 * mode_count(p);
  if (m.rows() != dim || m.cols() != dim) {
    throw DomainError("ScatteringMatrix: dense matrix must be " + std::to_string(dim) + " square");
  }
  ScatteringMatrix s;
  s.p_ = p;
  s.form_ = Form::Dense;
  s.exterior_ = exterior;
  s.radius_ = radius;
  s.mesh_fingerprint_ = mesh_fingerprint;
  s.dense_ = std::move(m);
  return s;
}

ModeCoeffs ScatteringMatrix::apply(const ModeCoeffs& incoming) const {
  if (incoming.p != p_) {
    throw DomainError("apply_scattering: order mismatch (matrix p = " + std::to_string(p_) +
                      ", coefficients p = " + std::to_string(incoming.p) + ")");
  }
  ModeCoeffs out(p_);
  if (form_ == Form::Dense) {
    out.data.noalias() = dense_ * incoming.data;
    return out;
  }
  for (int n = 0; n <= p_; ++n) {
    for (int m = -n; m <= n; ++m) {
      out.a(n, m) = sa_[n] * incoming.a(n, m);
      out.b(n, m) = sb_[n] * incoming.b(n, m);
    }
  }
  return out;
}

Eigen::MatrixXcd ScatteringMatrix::to_dense() const {
  if (form_ == Form::Dense) return dense_;
  const int count = mode_count(p_);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * count, 2 * count);
  for (int n = 0; n <= p_; ++n) {
    for (int mm = -n; mm <= n; ++mm) {
      const int i = flat_index(n, mm);
      m(i, i) = sa_[n];
      m(count + i, count + i) = sb_[n];
    }
  }
  return m;
}

void ScatteringMatrix::require_match(const Medium& exterior, double radius, double rel_tol) const {
  if (!exterior_.same_as(exterior, rel_tol)) {
    throw DomainError("scattering matrix was built for a different exterior medium or frequency (omega " +
                      std::to_string(exterior_.omega()) + " vs " + std::to_string(exterior.omega()) + ")");
  }
  if (std::abs(radius_ - radius) > rel_tol * std::max(radius_, radius)) {
    throw DomainError("scattering matrix was built for radius " + std::to_string(radius_) + ", site has " +
                      std::to_string(radius));
  }
}

ModeCoeffs apply_scattering(const ScatteringMatrix& s, const ModeCoeffs& incoming) { return s.apply(incoming); }

ModeCoeffs MieSolution::interior_coeffs(const ModeCoeffs& incoming) const {
  const int p = scattering.order();
  if (incoming.p != p) throw DomainError("interior_coeffs: order mismatch");
  ModeCoeffs out(p);
  for (int n = 0; n <= p; ++n) {
    for (int m = -n; m <= n; ++m) {
      out.a(n, m) = ca[n] * incoming.a(n, m);
      out.b(n, m) = cb[n] * incoming.b(n, m);
    }
  }
  return out;
}

MieSolution mie_dielectric(double radius, const Medium& exterior, const Medium& interior, int p) {
  check_order(p, "mie_dielectric");
  if (!(radius > 0.0)) throw DomainError("mie_dielectric: radius must be positive");
  if (std::abs(exterior.omega() - interior.omega()) > 1e-12 * exterior.omega()) {
    throw DomainError("mie_dielectric: media must share omega");
  }
  const cplx z0 = exterior.k() * radius;
  const cplx z1 = interior.k() * radius;
  const RadialFactors out0 = outgoing_radial(p, z0);
  const RadialFactors reg0 = regular_radial(p, z0);
  const RadialFactors reg1 = regular_radial(p, z1);
  const cplx e0 = exterior.eps(), e1 = interior.eps();
  const cplx m0 = exterior.mu(), m1 = interior.mu();

  std::vector<cplx> sa(p + 1, 0.0), sb(p + 1, 0.0), ca(p + 1, 0.0), cb(p + 1, 0.0);
  for (int n = 1; n <= p; ++n) {
    const cplx H = out0.riccati[n], h = out0.f[n];
    const cplx J = reg0.riccati[n], j = reg0.f[n];
    const cplx J1 = reg1.riccati[n], j1 = reg1.f[n];
    // Tangential E (gradient family) and tangential H (rotated family) for (a, c);
    // tangential H (gradient family) and tangential E (rotated family) for (b, d).
    if (!solve2(H, -J1, e0 * h, -e1 * j1, -J, -e0 * j, sa[n], ca[n])) {
      throw SingularModeError(n, "mie_dielectric: singular interface system for (a, c) at n = " + std::to_string(n));
    }
    if (!solve2(H, -J1, m0 * h, -m1 * j1, -J, -m0 * j, sb[n], cb[n])) {
      throw SingularModeError(n, "mie_dielectric: singular interface system for (b, d) at n = " + std::to_string(n));
    }
  }
  MieSolution sol;
  sol.scattering = ScatteringMatrix::diagonal(p, std::move(sa), std::move(sb), exterior, radius);
  sol.interior = interior;
  sol.ca = std::move(ca);
  sol.cb = std::move(cb);
  return sol;
}

ScatteringMatrix mie_pec(double radius, const Medium& exterior, int p) {
  check_order(p, "mie_pec");
  if (!(radius > 0.0)) throw DomainError("mie_pec: radius must be positive");
  const cplx z0 = exterior.k() * radius;
  const RadialFactors out0 = outgoing_radial(p, z0);
  const RadialFactors reg0 = regular_radial(p, z0);
  std::vector<cplx> sa(p + 1, 0.0), sb(p + 1, 0.0);
  for (int n = 0; n <= p; ++n) {
    const cplx H = out0.riccati[n], h = out0.f[n];
    if (std::abs(H) < 1e-300 || std::abs(h) < 1e-300) {
      throw SingularModeError(n, "mie_pec: vanishing outgoing radial factor at n = " + std::to_string(n));
    }
    sa[n] = -reg0.riccati[n] / H;
    sb[n] = -reg0.f[n] / h;
  }
  return ScatteringMatrix::diagonal(p, std::move(sa), std::move(sb), exterior, radius);
}

}  // namespace fmps
