#include "core/muller.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "core/parallel.hpp"
#include "core/triangle_quadrature.hpp"

namespace fmps {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * kPi);

// Residual of the 1/r part: (exp(iz) - 1) / z, so exp(ikr)/r = 1/r + k F(kr).
cplx smooth_f(cplx z) {
  if (std::abs(z) < 0.5) {
    cplx term = kI, sum = kI;  // i^n z^(n-1) / n!
    for (int n = 2; n < 18; ++n) {
      term *= kI * z / static_cast<double>(n);
      sum += term;
    }
    return sum;
  }
  return (std::exp(kI * z) - 1.0) / z;
}

// Residual of the gradient: ((iz - 1) exp(iz) + 1) / z^2, so
// grad_x exp(ikr)/r = -rhat/r^2 + k^2 Q(kr) rhat with rhat = (x - y)/r.
cplx smooth_q(cplx z) {
  if (std::abs(z) < 0.5) {
    // sum over n >= 2 of i^n z^(n-2) (n-1) / n!
    cplx pw = -0.5, sum = -0.5;
    for (int n = 3; n < 20; ++n) {
      pw *= kI * z / static_cast<double>(n);
      sum += pw * static_cast<double>(n - 1);
    }
    return sum;
  }
  return ((kI * z - 1.0) * std::exp(kI * z) + 1.0) / (z * z);
}

struct GaussLine {
  std::vector<double> t, w;  // on [0, 1]
};

template <int N>
GaussLine make_gauss_line() {
  using G = boost::math::quadrature::gauss<double, N>;
  GaussLine g;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      g.t.push_back(0.5);
      g.w.push_back(0.5 * w[i]);
      continue;
    }
    g.t.push_back(0.5 * (1.0 - x[i]));
    g.w.push_back(0.5 * w[i]);
    g.t.push_back(0.5 * (1.0 + x[i]));
    g.w.push_back(0.5 * w[i]);
  }
  return g;
}

const GaussLine& line_near() {
  static const GaussLine g = make_gauss_line<10>();
  return g;
}

const GaussLine& line_far() {
  static const GaussLine g = make_gauss_line<4>();
  return g;
}

struct SourceTriangle {
  std::array<Vec3, 3> p;
  Vec3 n, centroid;
  std::array<Vec3, 2> s;        // tangents t1, t2
  std::array<Vec3, 3> nu;       // outward in-plane normals of edges p_e -> p_{e+1}
  std::array<double, 3> len{};
  double area = 0.0, diam = 0.0;
  double sn[2][3]{};            // s_b . nu_e
};

SourceTriangle source_triangle(const TriMesh& mesh, std::size_t t) {
  SourceTriangle g;
  for (int c = 0; c < 3; ++c) g.p[c] = mesh.vertex(t, c);
  g.n = mesh.normal(t);
  g.centroid = mesh.centroid(t);
  g.s = {mesh.t1(t), mesh.t2(t)};
  g.area = mesh.area(t);
  g.diam = mesh.diameter(t);
  for (int e = 0; e < 3; ++e) {
    const Vec3 d = g.p[(e + 1) % 3] - g.p[e];
    g.len[e] = d.norm();
    g.nu[e] = (d / g.len[e]).cross(g.n);
    for (int b = 0; b < 2; ++b) g.sn[b][e] = g.s[b].dot(g.nu[e]);
  }
  return g;
}

std::vector<SourceTriangle> source_geometry(const TriMesh& mesh) {
  std::vector<SourceTriangle> out;
  out.reserve(mesh.size());
  for (std::size_t t = 0; t < mesh.size(); ++t) out.push_back(source_triangle(mesh, t));
  return out;
}

bool is_near(const SourceTriangle& g, const Vec3& x) { return (x - g.centroid).norm() < 2.0 * g.diam; }

CVec3 cvec(const Vec3& v) { return v.cast<cplx>(); }

// Integrals over one source triangle of g_l and grad_x g_l for nk wavenumbers.
// Singular and near pairs add the closed-form 1/r parts to a quadrature of the
// bounded remainders; the self pair splits the triangle at x and skips grad,
// whose principal value vanishes on a flat triangle.
void surface_integrals(const SourceTriangle& g, const Vec3& x, const cplx* k, int nk, bool self, cplx* G,
                       CVec3* D) {
  for (int l = 0; l < nk; ++l) {
    G[l] = 0.0;
    if (D) D[l].setZero();
  }
  const bool near = self || is_near(g, x);
  if (!near) {
    const TriangleRule& r = dunavant7();
    for (std::size_t q = 0; q < r.weight.size(); ++q) {
      const Vec3 y = r.bary[q][0] * g.p[0] + r.bary[q][1] * g.p[1] + r.bary[q][2] * g.p[2];
      const Vec3 d = x - y;
      const double rr = d.norm();
      const double w = r.weight[q] * g.area;
      for (int l = 0; l < nk; ++l) {
        const cplx e = std::exp(kI * k[l] * rr);
        G[l] += w * e / rr;
        if (D) D[l] += (w * (kI * k[l] * rr - 1.0) * e / (rr * rr * rr)) * cvec(d);
      }
    }
  } else {
    const LaplacePotentials lp = laplace_triangle(g.p[0], g.p[1], g.p[2], x);
    const TriangleRule& r = dunavant16();
    auto accumulate = [&](const Vec3& a, const Vec3& b, const Vec3& c, double area, bool with_grad) {
      for (std::size_t q = 0; q < r.weight.size(); ++q) {
        const Vec3 y = r.bary[q][0] * a + r.bary[q][1] * b + r.bary[q][2] * c;
        const Vec3 d = x - y;
        const double rr = d.norm();
        const double w = r.weight[q] * area;
        for (int l = 0; l < nk; ++l) {
          G[l] += w * k[l] * smooth_f(k[l] * rr);
          if (with_grad && rr > 0.0) D[l] += (w * k[l] * k[l] * smooth_q(k[l] * rr) / rr) * cvec(d);
        }
      }
    };
    if (self) {
      for (int e = 0; e < 3; ++e) {
        const Vec3& a = g.p[e];
        const Vec3& b = g.p[(e + 1) % 3];
        accumulate(x, a, b, 0.5 * (a - x).cross(b - x).norm(), false);
      }
    } else {
      accumulate(g.p[0], g.p[1], g.p[2], g.area, D != nullptr);
    }
    for (int l = 0; l < nk; ++l) {
      G[l] += lp.inv_r;
      if (D && !self) D[l] += cvec(lp.grad);
    }
  }
  for (int l = 0; l < nk; ++l) {
    G[l] *= kInv4Pi;
    if (D) D[l] *= kInv4Pi;
  }
}

// Edge integrals of grad_x (g1 - g0); the static parts cancel so the
// integrand is bounded and plain Gauss-Legendre suffices.
void edge_integrals_difference(const SourceTriangle& g, const Vec3& x, cplx k0, cplx k1, bool near,
                               std::array<CVec3, 3>& L) {
  const GaussLine& gl = near ? line_near() : line_far();
  const cplx k0s = k0 * k0, k1s = k1 * k1;
  for (int e = 0; e < 3; ++e) {
    L[e].setZero();
    const Vec3& a = g.p[e];
    const Vec3 d = g.p[(e + 1) % 3] - a;
    for (std::size_t q = 0; q < gl.t.size(); ++q) {
      const Vec3 v = x - (a + gl.t[q] * d);
      const double rr = v.norm();
      if (rr == 0.0) continue;
      const cplx f = k1s * smooth_q(k1 * rr) - k0s * smooth_q(k0 * rr);
      L[e] += (gl.w[q] * g.len[e] * f / rr) * cvec(v);
    }
    L[e] *= kInv4Pi;
  }
}

// Closed form of the segment integral of grad_x (1/|x - y|).
Vec3 segment_grad_inv_r(const Vec3& a, const Vec3& b, const Vec3& x) {
  const Vec3 d = b - a;
  const double len = d.norm();
  const Vec3 lhat = d / len;
  const double sx = (x - a).dot(lhat);
  const Vec3 perp = (x - a) - sx * lhat;
  const double dd = perp.squaredNorm();
  const double r0 = (x - a).norm(), r1 = (x - b).norm();
  const double along = 1.0 / r1 - 1.0 / r0;
  const double across = (len - sx) / r1 + sx / r0;  // [(s - sx)/r] from 0 to len
  return -perp * (across / dd) - lhat * along;
}

// Edge integrals of grad_x g for a single medium.
void edge_integrals_single(const SourceTriangle& g, const Vec3& x, cplx k, bool near, std::array<CVec3, 3>& L) {
  const GaussLine& gl = near ? line_near() : line_far();
  for (int e = 0; e < 3; ++e) {
    L[e].setZero();
    const Vec3& a = g.p[e];
    const Vec3& b = g.p[(e + 1) % 3];
    const Vec3 d = b - a;
    for (std::size_t q = 0; q < gl.t.size(); ++q) {
      const Vec3 v = x - (a + gl.t[q] * d);
      const double rr = v.norm();
      cplx f;
      if (near) {
        f = k * k * smooth_q(k * rr) / rr;
      } else {
        f = (kI * k * rr - 1.0) * std::exp(kI * k * rr) / (rr * rr * rr);
      }
      L[e] += (gl.w[q] * g.len[e] * f) * cvec(v);
    }
    if (near) L[e] += cvec(segment_grad_inv_r(a, b, x));
    L[e] *= kInv4Pi;
  }
}

// t_a . (n x v) for the target frame: a = 0 gives -t2 . v, a = 1 gives t1 . v.
cplx rot(const Vec3& t1, const Vec3& t2, int a, const CVec3& v) {
  return a == 0 ? -dotu(cvec(t2), v) : dotu(cvec(t1), v);
}

double mesh_diameter(const TriMesh& mesh) {
  Vec3 lo = mesh.vertices().front(), hi = lo;
  for (const Vec3& v : mesh.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

void check_media(const Medium& exterior, const Medium& interior) {
  if (std::abs(exterior.omega() - interior.omega()) > 1e-12 * exterior.omega()) {
    throw DomainError("muller: exterior and interior media are given at different frequencies");
  }
}

double relative_residual(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& x, const Eigen::VectorXcd& b) {
  const double nb = b.norm();
  if (nb == 0.0) return x.norm() == 0.0 ? 0.0 : (a * x).norm();
  return (b - a * x).norm() / nb;
}

constexpr double kResidualTol = 1e-10;
constexpr double kSingularRcond = 1e-13;

}  // namespace

std::optional<std::string> resolution_warning(const TriMesh& mesh, const Medium& exterior, const Medium& interior) {
  const double h = mesh.max_triangle_diameter();
  const double kmax = std::max(std::abs(exterior.k()), std::abs(interior.k()));
  const double lambda = 2.0 * kPi / kmax;
  if (lambda >= 5.0 * h) return std::nullopt;
  std::ostringstream s;
  s << "mesh under-resolved: shortest wavelength " << lambda << " is " << lambda / h
    << " max triangle diameters (want >= 5)";
  return s.str();
}

Eigen::MatrixXcd assemble_muller(const TriMesh& mesh, const Medium& exterior, const Medium& interior, int workers) {
  check_media(exterior, interior);
  const std::size_t n = mesh.size();
  const auto src = source_geometry(mesh);
  const cplx k[2] = {exterior.k(), interior.k()};
  const cplx e0 = exterior.eps(), e1 = interior.eps(), m0 = exterior.mu(), m1 = interior.mu();
  const double w = exterior.omega();
  const cplx half_h = 0.5 * (1.0 + e0 / e1), half_e = 0.5 * (1.0 + m0 / m1);
  const cplx cg_h0 = kI * w / m1 * e0 * m0, cg_h1 = kI * w / m1 * e1 * m1;
  const cplx cg_e0 = kI * w / e1 * e0 * m0, cg_e1 = kI * w / e1 * e1 * m1;
  const cplx cv_h = kI / (w * m1), cv_e = kI / (w * e1);
  const cplx row_h = 1.0 / m0, row_e = 1.0 / e0;

  Eigen::MatrixXcd a(4 * n, 4 * n);
  const std::size_t off = 2 * n;
  parallel_for(n, workers, [&](std::size_t i) {
    const Vec3& x = mesh.centroid(i);
    const Vec3& t1 = mesh.t1(i);
    const Vec3& t2 = mesh.t2(i);
    cplx G[2];
    CVec3 D[2];
    std::array<CVec3, 3> L;
    for (std::size_t j = 0; j < n; ++j) {
      const SourceTriangle& g = src[j];
      const bool self = i == j;
      surface_integrals(g, x, k, 2, self, G, self ? nullptr : D);
      edge_integrals_difference(g, x, k[0], k[1], self || is_near(g, x), L);
      const cplx gh = cg_h0 * G[0] - cg_h1 * G[1];
      const cplx ge = cg_e1 * G[1] - cg_e0 * G[0];
      CVec3 dh = CVec3::Zero(), de = CVec3::Zero();
      if (!self) {
        dh = (e0 / e1) * D[0] - D[1];
        de = (m0 / m1) * D[0] - D[1];
      }
      for (int b = 0; b < 2; ++b) {
        const CVec3 s = cvec(g.s[b]);
        // grad div of the integral of (g1 - g0) s_b
        CVec3 v10 = CVec3::Zero();
        for (int e = 0; e < 3; ++e) v10 -= g.sn[b][e] * L[e];
        const CVec3 dh_s = cross(dh, s), de_s = cross(de, s);
        for (int aa = 0; aa < 2; ++aa) {
          const cplx rs = rot(t1, t2, aa, s);
          const cplx diag = (self && aa == b) ? 1.0 : 0.0;
          a(2 * i + aa, 2 * j + b) = row_h * (half_h * diag + rot(t1, t2, aa, dh_s));
          a(2 * i + aa, off + 2 * j + b) = row_h * (gh * rs - cv_h * rot(t1, t2, aa, v10));
          a(off + 2 * i + aa, 2 * j + b) = row_e * (ge * rs + cv_e * rot(t1, t2, aa, v10));
          a(off + 2 * i + aa, off + 2 * j + b) = row_e * (half_e * diag + rot(t1, t2, aa, de_s));
        }
      }
    }
  });
  return a;
}

Eigen::VectorXcd muller_rhs(const TriMesh& mesh, const Medium& exterior, const VectorField& incident_e,
                            const VectorField& incident_h) {
  const std::size_t n = mesh.size();
  Eigen::VectorXcd b(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& x = mesh.centroid(i);
    const CVec3 e = incident_e(x), h = incident_h(x);
    for (int a = 0; a < 2; ++a) {
      b[2 * i + a] = -rot(mesh.t1(i), mesh.t2(i), a, h) / exterior.mu();
      b[2 * n + 2 * i + a] = rot(mesh.t1(i), mesh.t2(i), a, e) / exterior.eps();
    }
  }
  return b;
}

SurfaceCurrents solve_currents(const Eigen::MatrixXcd& matrix, const TriMesh& mesh, const Medium& exterior,
                               const VectorField& incident_e, const VectorField& incident_h) {
  const auto dim = static_cast<Eigen::Index>(4 * mesh.size());
  if (matrix.rows() != dim || matrix.cols() != dim) {
    throw DomainError("solve_currents: matrix size does not match the mesh");
  }
  const Eigen::VectorXcd b = muller_rhs(mesh, exterior, incident_e, incident_h);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(matrix);
  if (!(lu.rcond() > kSingularRcond)) throw NumericalError("solve_currents: singular Muller system");
  SurfaceCurrents out;
  out.data = lu.solve(b);
  const double res = relative_residual(matrix, out.data, b);
  if (!(res <= kResidualTol)) {
    throw NumericalError("solve_currents: relative residual " + std::to_string(res) + " above 1e-10");
  }
  return out;
}

MullerSystem::MullerSystem(TriMesh mesh, const Medium& exterior, const Medium& interior, int workers)
    : mesh_(std::move(mesh)), exterior_(exterior), interior_(interior) {
  matrix_ = assemble_muller(mesh_, exterior_, interior_, workers);
  lu_.compute(matrix_);
  rcond_ = lu_.rcond();
  if (!(rcond_ > kSingularRcond)) throw NumericalError("Muller system is singular (rcond " + std::to_string(rcond_) + ")");
}

SurfaceCurrents MullerSystem::solve(const VectorField& incident_e, const VectorField& incident_h) const {
  SurfaceCurrents out;
  out.data = solve(Eigen::MatrixXcd(muller_rhs(mesh_, exterior_, incident_e, incident_h)));
  return out;
}

Eigen::MatrixXcd MullerSystem::solve(const Eigen::MatrixXcd& rhs) const {
  if (rhs.rows() != matrix_.rows()) throw DomainError("MullerSystem::solve: right-hand side has the wrong size");
  Eigen::MatrixXcd x = lu_.solve(rhs);
  const Eigen::MatrixXcd r = rhs - matrix_ * x;
  for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
    const double nb = rhs.col(c).norm();
    const double res = nb > 0.0 ? r.col(c).norm() / nb : x.col(c).norm();
    if (!(res <= kResidualTol)) {
      throw NumericalError("MullerSystem::solve: relative residual " + std::to_string(res) + " above 1e-10");
    }
  }
  return x;
}

SurfaceCurrents incident_currents(const TriMesh& mesh, const Medium& exterior, const Medium& interior,
                                  const VectorField& incident_e, const VectorField& incident_h) {
  check_media(exterior, interior);
  const cplx sj = interior.eps() / exterior.eps(), sk = interior.mu() / exterior.mu();
  SurfaceCurrents out(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Vec3& x = mesh.centroid(i);
    const CVec3 e = incident_e(x), h = incident_h(x);
    for (int a = 0; a < 2; ++a) {
      out.j(i, a) = -sj * rot(mesh.t1(i), mesh.t2(i), a, h);
      out.k(i, a) = sk * rot(mesh.t1(i), mesh.t2(i), a, e);
    }
  }
  return out;
}

Eigen::Matrix<cplx, 6, Eigen::Dynamic> radiation_block(const TriMesh& mesh, const Medium& exterior,
                                                       const Medium& interior, Domain domain, const Vec3& x) {
  check_media(exterior, interior);
  if (mesh.distance_to(x) <= 1e-6 * mesh_diameter(mesh)) {
    throw DomainError("radiate: observation point lies on the surface");
  }
  const std::size_t n = mesh.size();
  const Medium& med = domain == Domain::Exterior ? exterior : interior;
  const cplx cj = domain == Domain::Exterior ? exterior.eps() / interior.eps() : cplx(1.0);
  const cplx ck = domain == Domain::Exterior ? exterior.mu() / interior.mu() : cplx(1.0);
  const cplx k = med.k(), eps = med.eps(), mu = med.mu();
  const double w = med.omega();
  Eigen::Matrix<cplx, 6, Eigen::Dynamic> out(6, 4 * n);
  cplx G;
  CVec3 D;
  std::array<CVec3, 3> L;
  for (std::size_t t = 0; t < n; ++t) {
    const SourceTriangle g = source_triangle(mesh, t);
    surface_integrals(g, x, &k, 1, false, &G, &D);
    edge_integrals_single(g, x, k, is_near(g, x), L);
    for (int b = 0; b < 2; ++b) {
      const CVec3 s = cvec(g.s[b]);
      CVec3 v = CVec3::Zero();  // grad div of the integral of g s_b
      for (int e = 0; e < 3; ++e) v -= g.sn[b][e] * L[e];
      const CVec3 ds = cross(D, s);
      out.block<3, 1>(0, 2 * t + b) = cj * (kI * w * mu * G * s + kI / (w * eps) * v);
      out.block<3, 1>(0, 2 * n + 2 * t + b) = -ck * ds;
      out.block<3, 1>(3, 2 * t + b) = cj * ds;
      out.block<3, 1>(3, 2 * n + 2 * t + b) = ck * (kI * w * eps * G * s + kI / (w * mu) * v);
    }
  }
  return out;
}

FieldSample radiate(const SurfaceCurrents& currents, const TriMesh& mesh, const Medium& exterior,
                    const Medium& interior, Domain domain, const Vec3& x) {
  if (currents.triangles() != mesh.size()) throw DomainError("radiate: currents do not match the mesh");
  const auto block = radiation_block(mesh, exterior, interior, domain, x);
  const Eigen::Matrix<cplx, 6, 1> f = block * currents.data;
  return {f.head<3>(), f.tail<3>()};
}

std::uint64_t inclusion_fingerprint(const TriMesh& mesh, const Medium& interior, const Vec3& center) {
  std::uint64_t h = mesh.fingerprint();
  const double vals[7] = {center.x(),          center.y(),          center.z(),         interior.eps().real(),
                          interior.eps().imag(), interior.mu().real(), interior.mu().imag()};
  return fnv1a(vals, sizeof(vals), h);
}

InclusionScatteringMatrix build_inclusion_scatmat(const TriMesh& mesh, const Vec3& center, double radius,
                                                  const Medium& exterior, const Medium& interior, int p,
                                                  const InclusionOptions& options) {
  if (p < 1) throw DomainError("build_inclusion_scatmat: order p must be at least 1");
  if (!(radius > 0.0)) throw DomainError("build_inclusion_scatmat: enclosing radius must be positive");
  if (!(options.projection_factor > 1.0)) throw DomainError("build_inclusion_scatmat: projection factor must exceed 1");
  const double extent = mesh.extent_from(center);
  if (!(extent <= radius * (1.0 - 1e-6))) {
    std::ostringstream s;
    s << "inclusion mesh reaches " << extent << " from the center, outside the enclosing sphere of radius "
      << radius;
    throw GeometryError(s.str());
  }

  InclusionScatteringMatrix out;
  out.center = center;
  out.radius = radius;
  out.mesh_fingerprint = inclusion_fingerprint(mesh, interior, center);
  if (auto w = resolution_warning(mesh, exterior, interior)) out.warnings.push_back(*w);

  const MullerSystem sys(mesh, exterior, interior, options.workers);
  out.rcond = sys.rcond();
  const std::size_t n = mesh.size();
  const int cols = 2 * mode_count(p);

  // Unit incoming modes sampled at the collocation points.
  Eigen::MatrixXcd rhs(4 * n, cols);
  ModeFieldBlock blk;
  for (std::size_t i = 0; i < n; ++i) {
    mode_fields(p, FieldKind::Regular, exterior, center, mesh.centroid(i), blk);
    for (int c = 0; c < cols; ++c) {
      const CVec3 e = blk.e.col(c), h = blk.h.col(c);
      for (int a = 0; a < 2; ++a) {
        rhs(2 * i + a, c) = -rot(mesh.t1(i), mesh.t2(i), a, h) / exterior.mu();
        rhs(2 * n + 2 * i + a, c) = rot(mesh.t1(i), mesh.t2(i), a, e) / exterior.eps();
      }
    }
  }
  const Eigen::MatrixXcd x = sys.solve(rhs);
  // Remove the incident traces (see incident_currents); rhs already holds them up to scale.
  Eigen::MatrixXcd radiating = x;
  radiating.topRows(2 * n) -= (exterior.mu() * interior.eps() / exterior.eps()) * rhs.topRows(2 * n);
  radiating.bottomRows(2 * n) -= (exterior.eps() * interior.mu() / exterior.mu()) * rhs.bottomRows(2 * n);

  const double rp = options.projection_factor * radius;
  const int order = std::max(2 * p + 4, p + static_cast<int>(std::ceil(std::abs(exterior.k()) * rp)) + 16);
  const SurfaceProjector proj(exterior, center, rp, p, FieldKind::Outgoing, order);
  const std::size_t nodes = proj.node_count();
  Eigen::MatrixXcd samples(3 * nodes, cols);
  parallel_for(nodes, options.workers, [&](std::size_t q) {
    const auto block = radiation_block(mesh, exterior, interior, Domain::Exterior, proj.nodes()[q]);
    samples.middleRows(3 * q, 3) = block.topRows<3>() * radiating;
  });
  Eigen::MatrixXcd s = proj.e_matrix() * samples;
  out.scattering = ScatteringMatrix::dense(p, std::move(s), exterior, radius, out.mesh_fingerprint);
  if (options.keep_currents) out.unit_currents = x;
  return out;
}

}  // namespace fmps
