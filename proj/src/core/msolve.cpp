#include "core/msolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

namespace fmps {

namespace {

// Extra degrees used when rebuilding interior fields: the other sites' outgoing
// fields carry content above p that the exterior sum keeps exactly.
constexpr int kInteriorExtra = 10;

}  // namespace

void Scene::validate() const {
  if (p < 1) throw DomainError("scene: p must be >= 1");
  if (!(eta >= 1.0)) throw DomainError("scene: eta must be >= 1");
  incident.validate();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto& s = sites[i];
    if (!(s.radius > 0.0) || !std::isfinite(s.radius) || !s.center.allFinite()) {
      throw DomainError("scene: site " + std::to_string(i) + " has an invalid center or radius");
    }
  }
  std::ostringstream bad;
  int count = 0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      const double dist = (sites[i].center - sites[j].center).norm();
      const double need = eta * (sites[i].radius + sites[j].radius);
      if (!(dist > need)) {
        bad << (count ? "; " : "") << "sites " << i << " and " << j << " (distance " << dist << ", need > "
            << need << ")";
        ++count;
      }
    }
  }
  if (count) throw GeometryError("scene: " + std::to_string(count) + " overlapping site pair(s): " + bad.str());
}

MultipleScattering::MultipleScattering(Scene scene, std::shared_ptr<TranslationCache> cache, int workers)
    : scene_(std::move(scene)), workers_(std::max(1, workers)), cache_(std::move(cache)) {
  scene_.validate();
  if (!cache_) cache_ = std::make_shared<TranslationCache>();
  const int p = scene_.p;
  const Medium& ext = scene_.exterior;
  const std::size_t m = scene_.sites.size();
  block_ = 2 * mode_count(p);
  p_int_ = p + kInteriorExtra;

  scat_.resize(m);
  mie_.resize(m);
  for (std::size_t l = 0; l < m; ++l) {
    const SphereSite& s = scene_.sites[l];
    if (const auto* d = std::get_if<DielectricModel>(&s.model)) {
      scat_[l] = mie_dielectric(s.radius, ext, d->interior, p).scattering;
      mie_[l] = std::make_shared<const MieSolution>(mie_dielectric(s.radius, ext, d->interior, p_int_));
    } else if (std::holds_alternative<PecModel>(s.model)) {
      scat_[l] = mie_pec(s.radius, ext, p);
    } else {
      const std::string& id = std::get<CachedModel>(s.model).id;
      auto it = scene_.matrices.find(id);
      if (it == scene_.matrices.end() || !it->second) {
        throw DomainError("site " + std::to_string(l) + ": missing scattering matrix '" + id + "'");
      }
      const ScatteringMatrix& sm = *it->second;
      if (sm.order() != p) {
        throw DomainError("site " + std::to_string(l) + ": scattering matrix '" + id + "' has p = " +
                          std::to_string(sm.order()) + ", scene uses p = " + std::to_string(p));
      }
      sm.require_match(ext, s.radius);
      scat_[l] = sm;
    }
  }

  // Incident coefficients: one projection about the origin, shifted by the phase.
  incident_.assign(m, ModeCoeffs(p));
  if (m > 0) {
    const ModeCoeffs origin = plane_wave_coeffs(scene_.incident, ext, Vec3::Zero(), p);
    for (std::size_t l = 0; l < m; ++l) {
      incident_[l] = origin;
      incident_[l].data *= std::exp(kI * ext.k() * scene_.incident.direction.dot(scene_.sites[l].center));
    }
  }
  if (std::any_of(mie_.begin(), mie_.end(), [](const auto& m) { return m != nullptr; })) {
    const ModeCoeffs origin = plane_wave_coeffs(scene_.incident, ext, Vec3::Zero(), p_int_);
    incident_int_.assign(m, origin);
    for (std::size_t l = 0; l < m; ++l) {
      incident_int_[l].data *= std::exp(kI * ext.k() * scene_.incident.direction.dot(scene_.sites[l].center));
    }
  }

  trans_.assign(m, std::vector<std::shared_ptr<const TranslationOperator>>(m));
  parallel_for(m, workers_, [&](std::size_t l) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j == l) continue;
      trans_[l][j] = cache_->get(scene_.sites[l].center - scene_.sites[j].center, ext, p, p, scene_.sites[l].radius);
    }
  });
}

std::vector<ModeCoeffs> MultipleScattering::split(const Eigen::VectorXcd& x) const {
  if (x.size() != dimension()) throw DomainError("msolve: vector length does not match the scene");
  std::vector<ModeCoeffs> out;
  out.reserve(site_count());
  for (std::size_t l = 0; l < site_count(); ++l) {
    out.emplace_back(scene_.p, x.segment(static_cast<Eigen::Index>(l) * block_, block_));
  }
  return out;
}

Eigen::VectorXcd MultipleScattering::assemble_rhs() const {
  Eigen::VectorXcd rhs(dimension());
  for (std::size_t l = 0; l < site_count(); ++l) {
    rhs.segment(static_cast<Eigen::Index>(l) * block_, block_) = scat_[l].apply(incident_[l]).data;
  }
  return rhs;
}

Eigen::VectorXcd MultipleScattering::apply_system(const Eigen::VectorXcd& x) const {
  if (x.size() != dimension()) throw DomainError("apply_system: vector length does not match the scene");
  Eigen::VectorXcd y(x.size());
  const std::size_t m = site_count();
  parallel_for(m, workers_, [&](std::size_t l) {
    ModeCoeffs acc(scene_.p);
    for (std::size_t j = 0; j < m; ++j) {
      if (j == l) continue;
      acc.data.noalias() += trans_[l][j]->matrix * x.segment(static_cast<Eigen::Index>(j) * block_, block_);
    }
    const Eigen::Index off = static_cast<Eigen::Index>(l) * block_;
    y.segment(off, block_) = x.segment(off, block_) - scat_[l].apply(acc).data;
  });
  return y;
}

SolveReport MultipleScattering::solve(const SolveOptions& options) const {
  if (!(options.tol > 0.0 && options.tol < 1.0)) throw DomainError("solve: tol must lie in (0, 1)");
  if (options.restart < 10) throw DomainError("solve: restart must be >= 10");
  if (options.maxiter < 1) throw DomainError("solve: maxiter must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  GmresOptions g;
  g.tol = options.tol;
  g.restart = options.restart;
  g.maxiter = options.maxiter;
  GmresResult r = gmres([this](const Eigen::VectorXcd& v) { return apply_system(v); }, assemble_rhs(), g);
  SolveReport rep;
  rep.iterations = r.iterations;
  rep.residual = r.residual;
  rep.converged = r.converged;
  rep.history = std::move(r.history);
  rep.outgoing = split(r.x);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

ModeCoeffs MultipleScattering::incoming_at(std::size_t l, const std::vector<ModeCoeffs>& outgoing) const {
  if (l >= site_count() || outgoing.size() != site_count()) throw DomainError("incoming_at: bad site or solution");
  ModeCoeffs acc = incident_[l];
  for (std::size_t j = 0; j < site_count(); ++j) {
    if (j == l) continue;
    acc.data.noalias() += trans_[l][j]->matrix * outgoing[j].data;
  }
  return acc;
}

ModeCoeffs MultipleScattering::incoming_at_interior(std::size_t l, const std::vector<ModeCoeffs>& outgoing) const {
  if (l >= site_count() || outgoing.size() != site_count()) throw DomainError("incoming_at: bad site or solution");
  if (incident_int_.empty()) throw DomainError("incoming_at_interior: scene has no dielectric sites");
  const Vec3& c = scene_.sites[l].center;
  ModeCoeffs acc = incident_int_[l];
  for (std::size_t j = 0; j < site_count(); ++j) {
    if (j == l) continue;
    const auto t = cache_->get(c - scene_.sites[j].center, scene_.exterior, scene_.p, p_int_, scene_.sites[l].radius);
    acc.data.noalias() += t->matrix * outgoing[j].data;
  }
  return acc;
}

FieldSample MultipleScattering::eval_scattered_field(const SolveReport& sol, const Vec3& x) const {
  if (sol.outgoing.size() != site_count()) throw DomainError("eval: solution does not match the scene");
  FieldSample s;
  for (std::size_t l = 0; l < site_count(); ++l) {
    const FieldSample f = eval_field(sol.outgoing[l], FieldKind::Outgoing, scene_.exterior, scene_.sites[l].center, x);
    s.E += f.E;
    s.H += f.H;
  }
  return s;
}

FieldSample MultipleScattering::eval_total_field(const SolveReport& sol, const Vec3& x) const {
  if (sol.outgoing.size() != site_count()) throw DomainError("eval: solution does not match the scene");
  for (std::size_t l = 0; l < site_count(); ++l) {
    const SphereSite& s = scene_.sites[l];
    const double r = (x - s.center).norm();
    if (std::abs(r - s.radius) <= 1e-9 * s.radius) {
      throw DomainError("eval: point lies on the surface of site " + std::to_string(l));
    }
    if (r > s.radius) continue;
    if (mie_[l]) {
      const ModeCoeffs inner = mie_[l]->interior_coeffs(incoming_at_interior(l, sol.outgoing));
      return eval_field(inner, FieldKind::Regular, mie_[l]->interior, s.center, x);
    }
    if (std::holds_alternative<PecModel>(s.model)) return FieldSample{};
    throw DomainError("eval: point inside the enclosing sphere of cached-matrix site " + std::to_string(l) +
                      ", interior field not represented");
  }
  FieldSample f = eval_scattered_field(sol, x);
  f.E += scene_.incident.e_field(scene_.exterior, x);
  f.H += scene_.incident.h_field(scene_.exterior, x);
  return f;
}

Vec3 MultipleScattering::centroid() const {
  Vec3 c = Vec3::Zero();
  if (scene_.sites.empty()) return c;
  for (const auto& s : scene_.sites) c += s.center;
  return c / static_cast<double>(scene_.sites.size());
}

double MultipleScattering::bounding_radius() const {
  const Vec3 c = centroid();
  double rb = 0.0;
  for (const auto& s : scene_.sites) rb = std::max(rb, (s.center - c).norm() + s.radius);
  return rb;
}

namespace {

double radial_flux(const FieldSample& f, const Vec3& normal) {
  return 0.5 * cross(f.E, f.H.conjugate()).real().dot(normal);
}

}  // namespace

CrossSections MultipleScattering::cross_sections(const SolveReport& sol) const {
  if (sol.outgoing.size() != site_count()) throw DomainError("cross_sections: solution does not match the scene");
  const Medium& ext = scene_.exterior;
  const cplx k = ext.k();
  if (std::abs(k.imag()) > 1e-12 * std::abs(k)) {
    throw DomainError("cross_sections: exterior medium must be lossless");
  }
  const double e2 = scene_.incident.polarization.squaredNorm();
  const double irradiance = 0.5 * e2 * ext.admittance().real();
  if (!(irradiance > 0.0)) throw DomainError("cross_sections: incident field has zero amplitude");
  CrossSections cs;
  if (site_count() == 0) return cs;

  const int p = scene_.p;
  const Vec3 c0 = centroid();
  const double rb = bounding_radius();
  double rmax = 0.0;
  for (const auto& s : scene_.sites) rmax = std::max(rmax, s.radius);

  // Scattered power through a far sphere. The scattered field there has angular
  // bandwidth about p + k rb relative to the centroid.
  {
    const double rf = 1e3 * std::max(rmax, rb);
    const int q = 2 * p + 8 + 2 * static_cast<int>(std::ceil(std::abs(k) * rb));
    const SphericalGrid g = make_grid(q);
    std::vector<double> part(g.weight.size());
    parallel_for(part.size(), workers_, [&](std::size_t i) {
      const Vec3 dir = g.direction(i);
      part[i] = g.weight[i] * radial_flux(eval_scattered_field(sol, c0 + rf * dir), dir);
    });
    double pw = 0.0;
    for (double v : part) pw += v;
    cs.scat = pw * rf * rf / irradiance;
  }

  // Absorbed power: inward flux of the local total field on every enclosing sphere.
  {
    const SphericalGrid g = make_grid(2 * p + 4);
    std::vector<double> part(site_count());
    parallel_for(site_count(), workers_, [&](std::size_t l) {
      const SphereSite& s = scene_.sites[l];
      const ModeCoeffs inc = incoming_at(l, sol.outgoing);
      double acc = 0.0;
      for (std::size_t i = 0; i < g.weight.size(); ++i) {
        const Vec3 dir = g.direction(i);
        const Vec3 x = s.center + s.radius * dir;
        FieldSample f = eval_field(inc, FieldKind::Regular, ext, s.center, x);
        const FieldSample o = eval_field(sol.outgoing[l], FieldKind::Outgoing, ext, s.center, x);
        f.E += o.E;
        f.H += o.H;
        acc -= g.weight[i] * radial_flux(f, dir);
      }
      part[l] = acc * s.radius * s.radius;
    });
    double pa = 0.0;
    for (double v : part) pa += v;
    cs.abs = pa / irradiance;
  }

  // Optical theorem on the exact far-field amplitude in the forward direction.
  {
    const Vec3 d = scene_.incident.direction;
    CVec3 f = CVec3::Zero();
    for (std::size_t l = 0; l < site_count(); ++l) {
      f += far_field_amplitude(sol.outgoing[l], ext, scene_.sites[l].center, d);
    }
    const cplx proj = scene_.incident.polarization.dot(f);  // conj(e) . F
    cs.ext = 4.0 * kPi / k.real() * proj.imag() / e2;
  }
  return cs;
}

PoyntingGrid MultipleScattering::poynting_grid(const SolveReport& sol, const PlaneSpec& plane) const {
  if (plane.axis < 0 || plane.axis > 2) throw DomainError("poynting_grid: axis must be 0, 1 or 2");
  if (plane.nu < 1 || plane.nv < 1) throw DomainError("poynting_grid: resolution must be positive");
  PoyntingGrid out;
  out.plane = plane;
  const int ua = (plane.axis + 1) % 3, va = (plane.axis + 2) % 3;
  const std::size_t n = static_cast<std::size_t>(plane.nu) * plane.nv;
  out.points.resize(n);
  out.value.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> mask(n, 0);
  auto coord = [](double a, double b, int count, int i) { return count == 1 ? a : a + (b - a) * i / (count - 1.0); };
  for (int iv = 0; iv < plane.nv; ++iv) {
    for (int iu = 0; iu < plane.nu; ++iu) {
      Vec3 x;
      x[plane.axis] = plane.offset;
      x[ua] = coord(plane.u0, plane.u1, plane.nu, iu);
      x[va] = coord(plane.v0, plane.v1, plane.nv, iv);
      out.points[static_cast<std::size_t>(iv) * plane.nu + iu] = x;
    }
  }
  Vec3 axis = Vec3::Zero();
  axis[plane.axis] = 1.0;
  parallel_for(n, workers_, [&](std::size_t i) {
    try {
      out.value[i] = radial_flux(eval_total_field(sol, out.points[i]), axis);
    } catch (const DomainError&) {
      mask[i] = 1;
    }
  });
  out.masked.assign(mask.begin(), mask.end());
  return out;
}

ModeCoeffs MultipleScattering::aggregate_dipole(const SolveReport& sol) const {
  if (site_count() == 0) return ModeCoeffs(1);
  const Medium& ext = scene_.exterior;
  const double rb = bounding_radius();
  const double ra = 2.0 * rb;
  const int q = scene_.p + static_cast<int>(std::ceil(std::abs(ext.k()) * ra)) + 20;
  const SurfaceProjector proj(ext, centroid(), ra, 1, FieldKind::Outgoing, q);
  std::vector<CVec3> e(proj.node_count());
  parallel_for(e.size(), workers_, [&](std::size_t i) { e[i] = eval_scattered_field(sol, proj.nodes()[i]).E; });
  return proj.project_e(e);
}

}  // namespace fmps
