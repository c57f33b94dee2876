#include <doctest.h>

#include <cmath>
#include <random>

#include "core/msolve.hpp"
#include "test_util.hpp"

using namespace fmps;
using namespace fmps::testing;

namespace {

Scene two_spheres(int p, double gap, cplx contrast = 4.0) {
  Scene s;
  s.exterior = Medium(1.0, 1.0, 1.0);
  s.p = p;
  s.incident.direction = Vec3(0.0, 0.6, 0.8);
  s.incident.polarization = CVec3(1.0, 0.0, 0.0);
  const double half = 1.0 + 0.5 * gap;
  s.sites.push_back({Vec3(-half, 0.0, 0.0), 1.0, DielectricModel{Medium(contrast, 1.0, 1.0)}});
  s.sites.push_back({Vec3(half, 0.0, 0.0), 1.0, DielectricModel{Medium(contrast, 1.0, 1.0)}});
  return s;
}

// Max tangential jump of E and H across every sphere surface, relative to the largest tangential field.
double boundary_residual(const MultipleScattering& ms, const SolveReport& sol, int points, std::mt19937_64& rng) {
  double jump = 0.0, scale = 0.0;
  for (const SphereSite& s : ms.scene().sites) {
    for (int i = 0; i < points; ++i) {
      const Vec3 n = random_unit(rng);
      const FieldSample out = ms.eval_total_field(sol, s.center + s.radius * (1.0 + 1e-8) * n);
      const FieldSample in = ms.eval_total_field(sol, s.center + s.radius * (1.0 - 1e-8) * n);
      const CVec3 nc = n.cast<cplx>();
      const double ys = std::abs(ms.scene().exterior.admittance());
      jump = std::max({jump, cross(nc, out.E - in.E).norm(), cross(nc, out.H - in.H).norm() / ys});
      scale = std::max({scale, cross(nc, out.E).norm(), cross(nc, out.H).norm() / ys});
    }
  }
  return jump / scale;
}

double analytic_csca(const MultipleScattering& ms, const ModeCoeffs& a) {
  // Single site at the origin: far-field orthogonality of the vector harmonics.
  const Medium& m = ms.scene().exterior;
  const double zb = std::abs(m.omega() * m.mu() / m.k());
  double sum = 0.0;
  for (int n = 1; n <= a.p; ++n) {
    for (int mm = -n; mm <= n; ++mm) sum += n * (n + 1.0) * (std::norm(a.a(n, mm)) + zb * zb * std::norm(a.b(n, mm)));
  }
  return sum / ms.scene().incident.polarization.squaredNorm();
}

}  // namespace

TEST_SUITE("msolve") {
  TEST_CASE("single site reduces to the Mie answer in one iteration") {
    Scene s;
    s.exterior = Medium(1.0, 1.0, 1.0);
    s.p = 6;
    s.sites.push_back({Vec3(0.3, -0.2, 0.5), 1.0, DielectricModel{Medium({3.0, 0.1}, 1.0, 1.0)}});
    const MultipleScattering ms(s);
    const Eigen::VectorXcd rhs = ms.assemble_rhs();
    const ModeCoeffs expect = ms.scattering(0).apply(ms.incident_coeffs(0));
    CHECK((rhs - expect.data).norm() == 0.0);
    std::mt19937_64 rng(1);
    const Eigen::VectorXcd x = random_coeffs(6, rng).data;
    CHECK((ms.apply_system(x) - x).norm() == 0.0);
    const SolveReport r = ms.solve();
    CHECK(r.iterations == 1);
    CHECK(r.converged);
    CHECK((r.outgoing[0].data - expect.data).norm() <= 1e-14 * expect.data.norm());
  }

  TEST_CASE("zero incident field and zero vector") {
    Scene s = two_spheres(3, 2.0);
    s.incident.polarization = CVec3::Zero();
    const MultipleScattering ms(s);
    CHECK(ms.assemble_rhs().norm() == 0.0);
    CHECK(ms.apply_system(Eigen::VectorXcd::Zero(ms.dimension())).norm() == 0.0);
    CHECK(ms.dimension() == 2 * 2 * 16);
  }

  TEST_CASE("operator is linear and matches its assembled matrix") {
    Scene s;
    s.exterior = Medium(1.0, 1.0, 1.3);
    s.p = 2;
    s.sites.push_back({Vec3(0, 0, 0), 0.7, DielectricModel{Medium(2.5, 1.0, 1.3)}});
    s.sites.push_back({Vec3(2.1, 0.4, 0), 0.5, PecModel{}});
    s.sites.push_back({Vec3(-0.5, 2.3, 1.0), 0.9, DielectricModel{Medium({1.5, 0.3}, 1.2, 1.3)}});
    const MultipleScattering ms(s);
    const Eigen::Index n = ms.dimension();
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index j = 0; j < n; ++j) a.col(j) = ms.apply_system(Eigen::VectorXcd::Unit(n, j));
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    Eigen::VectorXcd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = {g(rng), g(rng)};
    CHECK((a * x - ms.apply_system(x)).norm() <= 1e-12 * x.norm() * a.norm());
  }

  TEST_CASE("relabeling sites permutes the right-hand side and solution") {
    Scene s = two_spheres(4, 1.5);
    s.sites[1].model = PecModel{};
    Scene t = s;
    std::swap(t.sites[0], t.sites[1]);
    const MultipleScattering a(s), b(t);
    const Eigen::Index k = 2 * mode_count(4);
    const Eigen::VectorXcd ra = a.assemble_rhs(), rb = b.assemble_rhs();
    CHECK((ra.head(k) - rb.tail(k)).norm() == 0.0);
    CHECK((ra.tail(k) - rb.head(k)).norm() == 0.0);
    SolveOptions o;
    o.tol = 1e-12;
    const SolveReport sa = a.solve(o), sb = b.solve(o);
    CHECK((sa.outgoing[0].data - sb.outgoing[1].data).norm() <= 1e-10 * sa.outgoing[0].data.norm());
    const CrossSections ca = a.cross_sections(sa), cb = b.cross_sections(sb);
    CHECK(ca.scat == doctest::Approx(cb.scat).epsilon(1e-10));
  }

  TEST_CASE("two dielectric spheres: boundary conditions on both surfaces") {
    std::mt19937_64 rng(3);
    const MultipleScattering ms(two_spheres(8, 4.0));
    const SolveReport r = ms.solve();
    CHECK(r.converged);
    CHECK(r.residual <= 1e-6);
    const double res = boundary_residual(ms, r, 200, rng);
    INFO("boundary residual " << res);
    CHECK(res <= 1e-6);
  }

  TEST_CASE("boundary residual decreases with p") {
    std::vector<double> res;
    for (int p : {4, 6, 8, 10}) {
      std::mt19937_64 rng(4);
      const MultipleScattering ms(two_spheres(p, 2.0));
      SolveOptions o;
      o.tol = 1e-12;
      res.push_back(boundary_residual(ms, ms.solve(o), 60, rng));
    }
    for (std::size_t i = 1; i < res.size(); ++i) {
      INFO(res[i - 1] << " -> " << res[i]);
      CHECK(res[i] <= 1.1 * res[i - 1]);
    }
  }

  TEST_CASE("weak contrast agrees with single scattering") {
    const MultipleScattering ms(two_spheres(6, 1.0, 1.0 + 1e-4));
    SolveOptions o;
    o.tol = 1e-13;
    const SolveReport r = ms.solve(o);
    Eigen::VectorXcd x(ms.dimension());
    for (std::size_t l = 0; l < 2; ++l) x.segment(l * 2 * mode_count(6), 2 * mode_count(6)) = r.outgoing[l].data;
    const Eigen::VectorXcd b = ms.assemble_rhs();
    const Eigen::VectorXcd single = b + (b - ms.apply_system(b));
    CHECK((x - single).norm() <= 1e-6 * x.norm());
  }

  TEST_CASE("total field: no sites, far decay, PEC interior") {
    Scene empty;
    empty.exterior = Medium(1.0, 1.0, 1.0);
    const MultipleScattering m0(empty);
    const SolveReport r0 = m0.solve();
    const Vec3 x(0.3, 0.2, -1.0);
    const FieldSample f0 = m0.eval_total_field(r0, x);
    CHECK((f0.E - empty.incident.e_field(empty.exterior, x)).norm() == 0.0);

    Scene s = two_spheres(4, 2.0);
    s.sites[0].model = PecModel{};
    const MultipleScattering ms(s);
    const SolveReport r = ms.solve();
    CHECK(ms.eval_total_field(r, s.sites[0].center + Vec3(0.2, 0.1, 0.0)).E.norm() == 0.0);
    CHECK_THROWS_AS(ms.eval_total_field(r, s.sites[0].center + Vec3(1.0, 0.0, 0.0)), DomainError);
    const Vec3 dir = Vec3(0.2, -0.4, 0.9).normalized();
    const double r1 = 1e3 * 2.0 * kPi, r2 = 2.0 * r1;
    const double s1 = ms.eval_scattered_field(r, r1 * dir).E.norm();
    const double s2 = ms.eval_scattered_field(r, r2 * dir).E.norm();
    CHECK(s1 / s2 == doctest::Approx(2.0).epsilon(1e-2));
  }

  TEST_CASE("lossless scenes: absorption vanishes and extinction balances") {
    const MultipleScattering ms(two_spheres(8, 2.0));
    const SolveReport r = ms.solve(SolveOptions{1e-10, 50, 1000});
    const CrossSections cs = ms.cross_sections(r);
    INFO("scat " << cs.scat << " abs " << cs.abs << " ext " << cs.ext);
    CHECK(cs.scat > 0.0);
    CHECK(std::abs(cs.abs) <= 1e-6 * cs.scat);
    CHECK(std::abs(cs.ext - cs.scat - cs.abs) <= 1e-5 * cs.scat);
  }

  TEST_CASE("lossy spheres absorb and still balance") {
    const MultipleScattering ms(two_spheres(8, 2.0, {2.0, 0.8}));
    const SolveReport r = ms.solve(SolveOptions{1e-10, 50, 1000});
    const CrossSections cs = ms.cross_sections(r);
    CHECK(cs.abs > 1e-3 * cs.scat);
    CHECK(std::abs(cs.ext - cs.scat - cs.abs) <= 1e-5 * cs.ext);
  }

  TEST_CASE("single PEC sphere cross section against the coefficient formula") {
    Scene s;
    s.exterior = Medium(1.0, 1.0, 1.0);
    s.p = 10;
    s.sites.push_back({Vec3::Zero(), 1.0, PecModel{}});
    const MultipleScattering ms(s);
    const SolveReport r = ms.solve();
    const CrossSections cs = ms.cross_sections(r);
    const double expect = analytic_csca(ms, r.outgoing[0]);
    CHECK(cs.scat == doctest::Approx(expect).epsilon(1e-6));
    CHECK(std::abs(cs.abs) <= 1e-8 * cs.scat);
  }

  TEST_CASE("cross sections and grids under amplitude scaling") {
    Scene s = two_spheres(4, 2.0, {2.0, 0.3});
    const MultipleScattering a(s);
    s.incident.polarization *= 2.0;
    const MultipleScattering b(s);
    const SolveReport ra = a.solve(), rb = b.solve();
    const CrossSections ca = a.cross_sections(ra), cb = b.cross_sections(rb);
    CHECK(cb.scat == doctest::Approx(ca.scat).epsilon(1e-12));
    CHECK(cb.abs == doctest::Approx(ca.abs).epsilon(1e-12));
    PlaneSpec pl;
    pl.offset = -3.0;
    pl.u0 = -4.0, pl.u1 = 4.0, pl.v0 = -2.0, pl.v1 = 2.0;
    pl.nu = 9, pl.nv = 5;
    const PoyntingGrid ga = a.poynting_grid(ra, pl), gb = b.poynting_grid(rb, pl);
    for (std::size_t i = 0; i < ga.value.size(); ++i) CHECK(gb.value[i] == doctest::Approx(4.0 * ga.value[i]).epsilon(1e-12));
  }

  TEST_CASE("Poynting grid: plane wave, masking, mirror symmetry") {
    Scene empty;
    empty.exterior = Medium(2.25, 1.0, 1.0);
    empty.incident.polarization = CVec3(0.0, cplx(0.0, 2.0), 0.0);
    const MultipleScattering m0(empty);
    PlaneSpec pl;
    pl.nu = 4;
    pl.nv = 3;
    const PoyntingGrid g0 = m0.poynting_grid(m0.solve(), pl);
    REQUIRE(g0.value.size() == 12);
    for (double v : g0.value) CHECK(v == doctest::Approx(0.5 * 4.0 * 1.5).epsilon(1e-14));

    Scene s = two_spheres(5, 2.0, {3.0, 0.2});
    s.incident.direction = Vec3(0, 0, 1);
    s.incident.polarization = CVec3(0, 1, 0);
    const MultipleScattering ms(s);
    const SolveReport r = ms.solve(SolveOptions{1e-12, 50, 1000});
    PlaneSpec mid;
    mid.offset = 0.0;
    mid.u0 = -5.0, mid.u1 = 5.0, mid.v0 = -1.5, mid.v1 = 1.5;
    mid.nu = 21, mid.nv = 7;
    const PoyntingGrid g = ms.poynting_grid(r, mid);
    int masked = 0;
    double worst = 0.0, scale = 0.0;
    for (int iv = 0; iv < mid.nv; ++iv) {
      for (int iu = 0; iu < mid.nu; ++iu) {
        const std::size_t i = iv * mid.nu + iu, j = iv * mid.nu + (mid.nu - 1 - iu);
        masked += g.masked[i];
        CHECK(g.masked[i] == g.masked[j]);
        worst = std::max(worst, std::abs(g.value[i] - g.value[j]));
        scale = std::max(scale, std::abs(g.value[i]));
      }
    }
    CHECK(masked == 8);  // grid nodes exactly on the two surfaces
    CHECK(worst <= 1e-8 * scale);
  }

  TEST_CASE("cached matrix sites: lookup, matching and unsupported interior") {
    Scene s;
    s.exterior = Medium(1.0, 1.0, 1.0);
    s.p = 3;
    s.sites.push_back({Vec3::Zero(), 1.0, CachedModel{"sphere"}});
    CHECK_THROWS_AS(MultipleScattering{s}, DomainError);
    const MieSolution mie = mie_dielectric(1.0, s.exterior, Medium(3.0, 1.0, 1.0), 3);
    s.matrices["sphere"] = std::make_shared<const ScatteringMatrix>(
        ScatteringMatrix::dense(3, mie.scattering.to_dense(), s.exterior, 1.0, 42));
    const MultipleScattering ms(s);
    const SolveReport r = ms.solve();
    CHECK((r.outgoing[0].data - mie.scattering.apply(ms.incident_coeffs(0)).data).norm() <= 1e-14);
    CHECK_THROWS_AS(ms.eval_total_field(r, Vec3(0.1, 0, 0)), DomainError);
    const PoyntingGrid g = ms.poynting_grid(r, PlaneSpec{});
    CHECK(g.masked[g.value.size() / 2]);
    CHECK(std::isnan(g.value[g.value.size() / 2]));
    CHECK_FALSE(g.masked[0]);

    Scene wrong = s;
    wrong.sites[0].radius = 1.1;
    CHECK_THROWS_AS(MultipleScattering{wrong}, DomainError);
    Scene order = s;
    order.p = 4;
    CHECK_THROWS_AS(MultipleScattering{order}, DomainError);
  }

  TEST_CASE("validation reports every overlapping pair") {
    Scene s;
    s.exterior = Medium(1.0, 1.0, 1.0);
    s.sites.push_back({Vec3(0, 0, 0), 1.0, PecModel{}});
    s.sites.push_back({Vec3(1.8, 0, 0), 1.0, PecModel{}});
    s.sites.push_back({Vec3(0, 2.05, 0), 1.0, PecModel{}});
    s.sites.push_back({Vec3(0, 0, 10), 1.0, PecModel{}});
    try {
      s.validate();
      FAIL("expected GeometryError");
    } catch (const GeometryError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("sites 0 and 1") != std::string::npos);
      CHECK(msg.find("sites 0 and 2") != std::string::npos);
      CHECK(msg.find("2 overlapping") != std::string::npos);
    }
    s.eta = 1.0;
    s.sites.pop_back();
    s.sites.erase(s.sites.begin() + 1);
    CHECK_NOTHROW(s.validate());
  }

  TEST_CASE("worker count does not change results") {
    Scene s;
    s.exterior = Medium(1.0, 1.0, 1.0);
    s.p = 3;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) s.sites.push_back({Vec3(3.0 * i, 3.1 * j, 0.2 * i * j), 1.0, DielectricModel{Medium({2.0, 0.1}, 1.0, 1.0)}});
    }
    const MultipleScattering a(s, nullptr, 1), b(s, nullptr, 4);
    const SolveReport ra = a.solve(), rb = b.solve();
    CHECK(ra.iterations == rb.iterations);
    for (std::size_t l = 0; l < ra.outgoing.size(); ++l) CHECK(ra.outgoing[l].data == rb.outgoing[l].data);
    const CrossSections ca = a.cross_sections(ra), cb = b.cross_sections(rb);
    CHECK(ca.scat == cb.scat);
    CHECK(ca.abs == cb.abs);
  }

  TEST_CASE("aggregate dipole of a single small sphere matches its own degree-1 coefficients") {
    Scene s;
    s.exterior = Medium(1.0, 1.0, 1.0);
    s.p = 4;
    s.sites.push_back({Vec3::Zero(), 0.3, DielectricModel{Medium(4.0, 1.0, 1.0)}});
    const MultipleScattering ms(s);
    const SolveReport r = ms.solve();
    const ModeCoeffs d = ms.aggregate_dipole(r);
    for (int m = -1; m <= 1; ++m) {
      CHECK(std::abs(d.a(1, m) - r.outgoing[0].a(1, m)) <= 1e-10 * std::abs(r.outgoing[0].a(1, 1)));
      CHECK(std::abs(d.b(1, m) - r.outgoing[0].b(1, m)) <= 1e-10 * std::abs(r.outgoing[0].a(1, 1)));
    }
  }
}
