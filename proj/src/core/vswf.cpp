#include "core/vswf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fmps {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool close_rel(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

struct LocalFrame {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  Vec3 rhat, that, phat;
};

LocalFrame frame_of(const Vec3& rel) {
  LocalFrame f;
  f.r = rel.norm();
  if (f.r > 0.0) {
    f.theta = std::atan2(std::hypot(rel.x(), rel.y()), rel.z());
    f.phi = std::atan2(rel.y(), rel.x());
    if (f.phi < 0.0) f.phi += 2.0 * kPi;
  }
  const double st = std::sin(f.theta), ct = std::cos(f.theta);
  const double sp = std::sin(f.phi), cp = std::cos(f.phi);
  f.rhat = {st * cp, st * sp, ct};
  f.that = {ct * cp, ct * sp, -st};
  f.phat = {-sp, cp, 0.0};
  return f;
}

// Radial quantities f_n / r and F_n / r, with the regular-kind limits at r = 0.
void radial_over_r(int p, FieldKind kind, cplx k, double r, std::vector<cplx>& f, std::vector<cplx>& f_over_r,
                   std::vector<cplx>& big_over_r) {
  f.assign(p + 1, 0.0);
  f_over_r.assign(p + 1, 0.0);
  big_over_r.assign(p + 1, 0.0);
  if (r == 0.0) {
    if (kind == FieldKind::Outgoing) throw DomainError("eval_field: outgoing field is singular at its center");
    f[0] = 1.0;
    if (p >= 1) {
      f_over_r[1] = k / 3.0;
      big_over_r[1] = 2.0 * k / 3.0;
    }
    return;
  }
  const RadialFactors rf = kind == FieldKind::Outgoing ? outgoing_radial(p, k * r) : regular_radial(p, k * r);
  for (int n = 0; n <= p; ++n) {
    f[n] = rf.f[n];
    f_over_r[n] = rf.f[n] / r;
    big_over_r[n] = rf.riccati[n] / r;
  }
}

}  // namespace

Medium::Medium(cplx eps, cplx mu, double omega) : eps_(eps), mu_(mu), omega_(omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("Medium: omega must be positive and finite");
  if (!finite(eps) || !finite(mu) || eps == cplx(0.0) || mu == cplx(0.0)) {
    throw DomainError("Medium: epsilon and mu must be finite and nonzero");
  }
  k_ = omega * std::sqrt(eps * mu);
  if (k_.imag() < 0.0 || (k_.imag() == 0.0 && k_.real() < 0.0)) k_ = -k_;
}

bool Medium::same_as(const Medium& other, double rel_tol) const {
  return std::abs(omega_ - other.omega_) <= rel_tol * std::max(omega_, other.omega_) &&
         close_rel(eps_, other.eps_, rel_tol) && close_rel(mu_, other.mu_, rel_tol);
}

ModeCoeffs::ModeCoeffs(int order, Eigen::VectorXcd values) : p(order), data(std::move(values)) {
  if (order < 0) throw DomainError("ModeCoeffs: negative order");
  if (data.size() != 2 * mode_count(order)) {
    throw DomainError("ModeCoeffs: expected " + std::to_string(2 * mode_count(order)) + " entries, got " +
                      std::to_string(data.size()));
  }
}

void PlaneWave::validate() const {
  if (std::abs(direction.norm() - 1.0) > 1e-14) throw DomainError("PlaneWave: direction must be a unit vector");
  const cplx dot = dotu(direction.cast<cplx>(), polarization);
  if (std::abs(dot) > 1e-12 * std::max(1.0, polarization.norm())) {
    throw DomainError("PlaneWave: polarization must be transverse to the direction");
  }
}

CVec3 PlaneWave::e_field(const Medium& medium, const Vec3& x) const {
  return polarization * std::exp(kI * medium.k() * direction.dot(x));
}

CVec3 PlaneWave::h_field(const Medium& medium, const Vec3& x) const {
  const CVec3 d = direction.cast<cplx>();
  return medium.admittance() * cross(d, e_field(medium, x));
}

void mode_fields(int p, FieldKind kind, const Medium& medium, const Vec3& center, const Vec3& x,
                 ModeFieldBlock& out, bool with_h) {
  const int count = mode_count(p);
  out.e.setZero(3, 2 * count);
  if (with_h) out.h.setZero(3, 2 * count);

  const LocalFrame fr = frame_of(x - center);
  std::vector<cplx> f, f_r, big_r;
  radial_over_r(p, kind, medium.k(), fr.r, f, f_r, big_r);
  HarmonicTable ht;
  ht.compute(p, fr.theta, fr.phi);

  const cplx iwm = kI * medium.omega() * medium.mu();
  const cplx iwe = kI * medium.omega() * medium.eps();
  const CVec3 rh = fr.rhat.cast<cplx>(), th = fr.that.cast<cplx>(), ph = fr.phat.cast<cplx>();

  for (int n = 1; n <= p; ++n) {
    const double nn1 = n * (n + 1.0);
    for (int m = -n; m <= n; ++m) {
      const int idx = flat_index(n, m);
      const cplx dth = ht.dtheta[idx];
      const cplx ims = ht.im_over_sin[idx];
      const CVec3 psi = th * dth + ph * ims;
      const CVec3 phi = ph * dth - th * ims;
      const CVec3 M = -f[n] * phi;
      const CVec3 N = nn1 * f_r[n] * ht.y[idx] * rh + big_r[n] * psi;
      out.e.col(idx) = N;
      out.e.col(count + idx) = iwm * M;
      if (with_h) {
        out.h.col(idx) = -iwe * M;
        out.h.col(count + idx) = N;
      }
    }
  }
}

FieldSample eval_field(const ModeCoeffs& coeffs, FieldKind kind, const Medium& medium, const Vec3& center,
                       const Vec3& x) {
  const int p = coeffs.p;
  const LocalFrame fr = frame_of(x - center);
  std::vector<cplx> f, f_r, big_r;
  radial_over_r(p, kind, medium.k(), fr.r, f, f_r, big_r);
  HarmonicTable ht;
  ht.compute(p, fr.theta, fr.phi);

  // Accumulate in the local (r, theta, phi) basis, then rotate once.
  cplx nr = 0.0, nt = 0.0, np = 0.0;  // sum a N
  cplx mr = 0.0, mt = 0.0, mp = 0.0;  // sum b N
  cplx at = 0.0, ap = 0.0;            // sum a M
  cplx bt = 0.0, bp = 0.0;            // sum b M
  for (int n = 1; n <= p; ++n) {
    const double nn1 = n * (n + 1.0);
    for (int m = -n; m <= n; ++m) {
      const int idx = flat_index(n, m);
      const cplx a = coeffs.a(n, m);
      const cplx b = coeffs.b(n, m);
      if (a == cplx(0.0) && b == cplx(0.0)) continue;
      const cplx dth = ht.dtheta[idx];
      const cplx ims = ht.im_over_sin[idx];
      const cplx radial = nn1 * f_r[n] * ht.y[idx];
      // N = radial rhat + F/r (dth that + ims phat);  M = -f (dth phat - ims that)
      const cplx n_t = big_r[n] * dth, n_p = big_r[n] * ims;
      const cplx m_t = f[n] * ims, m_p = -f[n] * dth;
      nr += a * radial;
      nt += a * n_t;
      np += a * n_p;
      mr += b * radial;
      mt += b * n_t;
      mp += b * n_p;
      at += a * m_t;
      ap += a * m_p;
      bt += b * m_t;
      bp += b * m_p;
    }
  }
  const cplx iwm = kI * medium.omega() * medium.mu();
  const cplx iwe = kI * medium.omega() * medium.eps();
  const CVec3 rh = fr.rhat.cast<cplx>(), th = fr.that.cast<cplx>(), ph = fr.phat.cast<cplx>();
  FieldSample s;
  s.E = nr * rh + (nt + iwm * bt) * th + (np + iwm * bp) * ph;
  s.H = mr * rh + (mt - iwe * at) * th + (mp - iwe * ap) * ph;
  return s;
}

ProjectionConditioning projection_conditioning(int p, FieldKind kind, cplx z) {
  ProjectionConditioning c;
  if (p < 1) return c;
  const RadialFactors rf = kind == FieldKind::Outgoing ? outgoing_radial(p + 1, z) : regular_radial(p + 1, z);
  for (int n = 1; n <= p; ++n) {
    const double fn = std::abs(rf.f[n]);
    const double zfp = std::abs(rf.riccati[n] - rf.f[n]);  // |z f_n'|
    const double rel_b = fn / (fn + std::abs(rf.f[n + 1]));
    const double rel_a = std::abs(rf.riccati[n]) / (fn + zfp);
    const double worst = std::min(rel_a, rel_b);
    if (!(worst >= c.worst)) {
      c.worst = std::isfinite(worst) ? worst : 0.0;
      c.degree = n;
    }
  }
  return c;
}

SurfaceProjector::SurfaceProjector(const Medium& medium, const Vec3& center, double radius, int p, FieldKind kind,
                                   int grid_order)
    : medium_(medium), center_(center), radius_(radius), p_(p), kind_(kind) {
  if (p < 0) throw DomainError("SurfaceProjector: negative order");
  if (!(radius > 0.0)) throw DomainError("SurfaceProjector: radius must be positive");
  const cplx z = medium.k() * radius;
  const ProjectionConditioning cond = projection_conditioning(p, kind, z);
  if (cond.worst < 1e-13) {
    throw IllConditionedProjection(cond.degree, "projection sphere of radius " + std::to_string(radius) +
                                                    " is resonant at degree " + std::to_string(cond.degree));
  }

  grid_ = make_grid(grid_order > 0 ? grid_order : 2 * p + 4);
  nodes_.reserve(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) nodes_.push_back(center + radius * grid_.direction(i));

  const RadialFactors rf = kind == FieldKind::Outgoing ? outgoing_radial(p, z) : regular_radial(p, z);
  const cplx iwm = kI * medium.omega() * medium.mu();
  const cplx iwe = kI * medium.omega() * medium.eps();
  e_psi_.assign(p + 1, 0.0);
  e_phi_.assign(p + 1, 0.0);
  h_psi_.assign(p + 1, 0.0);
  h_phi_.assign(p + 1, 0.0);
  for (int n = 1; n <= p; ++n) {
    const double nn1 = n * (n + 1.0);
    e_psi_[n] = nn1 * rf.riccati[n] / radius;
    e_phi_[n] = -iwm * nn1 * rf.f[n];
    h_psi_[n] = nn1 * rf.riccati[n] / radius;
    h_phi_[n] = iwe * nn1 * rf.f[n];
  }
}

ModeCoeffs SurfaceProjector::project(const std::vector<CVec3>& samples, bool from_h) const {
  if (samples.size() != nodes_.size()) {
    throw DomainError("SurfaceProjector: expected " + std::to_string(nodes_.size()) + " samples, got " +
                      std::to_string(samples.size()));
  }
  const int count = mode_count(p_);
  Eigen::VectorXcd psi_acc = Eigen::VectorXcd::Zero(count);
  Eigen::VectorXcd phi_acc = Eigen::VectorXcd::Zero(count);
  HarmonicTable ht;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const LocalFrame fr = frame_of(grid_.direction(i));
    ht.compute(p_, grid_.theta[i], grid_.phi[i]);
    const cplx vt = fr.that.cast<cplx>().dot(samples[i]);
    const cplx vp = fr.phat.cast<cplx>().dot(samples[i]);
    const double w = grid_.weight[i];
    for (int idx = 1; idx < count; ++idx) {
      const cplx dth = std::conj(ht.dtheta[idx]);
      const cplx ims = std::conj(ht.im_over_sin[idx]);
      psi_acc[idx] += w * (vt * dth + vp * ims);
      phi_acc[idx] += w * (vp * dth - vt * ims);
    }
  }
  ModeCoeffs c(p_);
  for (int n = 1; n <= p_; ++n) {
    for (int m = -n; m <= n; ++m) {
      const int idx = flat_index(n, m);
      if (from_h) {
        c.b(n, m) = psi_acc[idx] / h_psi_[n];
        c.a(n, m) = phi_acc[idx] / h_phi_[n];
      } else {
        c.a(n, m) = psi_acc[idx] / e_psi_[n];
        c.b(n, m) = phi_acc[idx] / e_phi_[n];
      }
    }
  }
  return c;
}

ModeCoeffs SurfaceProjector::project_e(const std::vector<CVec3>& e) const { return project(e, false); }

ModeCoeffs SurfaceProjector::project_h(const std::vector<CVec3>& h) const { return project(h, true); }

Eigen::MatrixXcd SurfaceProjector::e_matrix(std::size_t first, std::size_t node_count) const {
  if (first + node_count > nodes_.size()) throw DomainError("e_matrix: node range out of bounds");
  const int count = mode_count(p_);
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(2 * count, 3 * static_cast<Eigen::Index>(node_count));
  HarmonicTable ht;
  for (std::size_t i = first; i < first + node_count; ++i) {
    const Eigen::Index col = 3 * static_cast<Eigen::Index>(i - first);
    const LocalFrame fr = frame_of(grid_.direction(i));
    ht.compute(p_, grid_.theta[i], grid_.phi[i]);
    const double w = grid_.weight[i];
    for (int n = 1; n <= p_; ++n) {
      for (int m = -n; m <= n; ++m) {
        const int idx = flat_index(n, m);
        const cplx dth = std::conj(ht.dtheta[idx]);
        const cplx ims = std::conj(ht.im_over_sin[idx]);
        // a: psi-test on E;  b: phi-test on E.
        const Eigen::Vector3cd ta = w * (fr.that.cast<cplx>() * dth + fr.phat.cast<cplx>() * ims) / e_psi_[n];
        const Eigen::Vector3cd tb = w * (fr.phat.cast<cplx>() * dth - fr.that.cast<cplx>() * ims) / e_phi_[n];
        mat.block<1, 3>(idx, col) = ta.transpose();
        mat.block<1, 3>(count + idx, col) = tb.transpose();
      }
    }
  }
  return mat;
}

ModeCoeffs project_surface_field(const VectorField& e_field, const VectorField& h_field, const Medium& medium,
                                 const Vec3& center, double radius, int p, FieldKind kind,
                                 ProjectionDiagnostics* diagnostics, int grid_order) {
  const SurfaceProjector proj(medium, center, radius, p, kind, grid_order);
  std::vector<CVec3> e;
  e.reserve(proj.node_count());
  for (const Vec3& x : proj.nodes()) e.push_back(e_field(x));
  ModeCoeffs c = proj.project_e(e);
  if (diagnostics && h_field) {
    std::vector<CVec3> h;
    h.reserve(proj.node_count());
    for (const Vec3& x : proj.nodes()) h.push_back(h_field(x));
    const ModeCoeffs ch = proj.project_h(h);
    const double scale = c.data.cwiseAbs().maxCoeff();
    diagnostics->eh_mismatch = scale > 0.0 ? (c.data - ch.data).cwiseAbs().maxCoeff() / scale : 0.0;
  }
  return c;
}

CVec3 far_field_amplitude(const ModeCoeffs& coeffs, const Medium& medium, const Vec3& center, const Vec3& dir) {
  const LocalFrame fr = frame_of(dir.normalized());
  HarmonicTable ht;
  ht.compute(coeffs.p, fr.theta, fr.phi);
  const CVec3 th = fr.that.cast<cplx>(), ph = fr.phat.cast<cplx>();
  const cplx zb = medium.omega() * medium.mu() / medium.k();
  CVec3 out = CVec3::Zero();
  cplx mi = 1.0;  // (-i)^n
  for (int n = 1; n <= coeffs.p; ++n) {
    mi *= -kI;
    for (int m = -n; m <= n; ++m) {
      const int idx = flat_index(n, m);
      const CVec3 psi = th * ht.dtheta[idx] + ph * ht.im_over_sin[idx];
      const CVec3 phi = ph * ht.dtheta[idx] - th * ht.im_over_sin[idx];
      out += mi * (coeffs.a(n, m) * psi - zb * coeffs.b(n, m) * phi);
    }
  }
  return out * std::exp(-kI * medium.k() * dir.normalized().dot(center));
}

ModeCoeffs plane_wave_coeffs(const PlaneWave& pw, const Medium& medium, const Vec3& center, int p) {
  if (p < 1) throw DomainError("plane_wave_coeffs: p must be >= 1");
  pw.validate();

  // Project about the origin on a sphere whose radius keeps every denominator well
  // away from zero, then shift by the plane-wave phase.
  const double ak = std::abs(medium.k());
  const double z0 = std::max(1.0, 0.75 * p) + 0.137;
  double best_z = z0;
  double best_cond = -1.0;
  for (int i = 0; i < 40; ++i) {
    const double z = z0 * (1.0 + 0.035 * i);
    const double c = projection_conditioning(p, FieldKind::Regular, medium.k() * (z / ak)).worst;
    if (c > best_cond) {
      best_cond = c;
      best_z = z;
    }
    if (c >= 1e-2) break;
  }
  const double radius = best_z / ak;
  const int order = std::max(2 * p + 4, p + static_cast<int>(std::ceil(best_z)) + 20);

  const SurfaceProjector proj(medium, Vec3::Zero(), radius, p, FieldKind::Regular, order);
  std::vector<CVec3> e;
  e.reserve(proj.node_count());
  for (const Vec3& x : proj.nodes()) e.push_back(pw.e_field(medium, x));
  ModeCoeffs c = proj.project_e(e);
  c.data *= std::exp(kI * medium.k() * pw.direction.dot(center));
  return c;
}

}  // namespace fmps
