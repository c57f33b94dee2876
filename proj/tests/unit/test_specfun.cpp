#include <doctest.h>

#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>
#include <random>

#include "core/specfun.hpp"

using namespace fmps;
using boost::multiprecision::cpp_complex_50;

namespace {

// Power series at 50 digits: j_n(z) = z^n / (2n+1)!! * sum_k (-z^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1)).
cplx j_series(int n, cplx z) {
  const cpp_complex_50 zz(z.real(), z.imag());
  cpp_complex_50 lead = 1;
  for (int i = 0; i < n; ++i) lead *= zz / cpp_complex_50(2 * i + 3);
  cpp_complex_50 term = 1, sum = 1;
  const cpp_complex_50 half = -zz * zz / 2;
  for (int k = 1; k < 60; ++k) {
    term *= half / cpp_complex_50(k * (2 * n + 2 * k + 1));
    sum += term;
  }
  const cpp_complex_50 v = lead * sum;
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

// y_n(z) = -(2n-1)!! / z^{n+1} * sum_k (-z^2/2)^k / (k! (1-2n)(3-2n)...(2k-1-2n)).
cplx y_series(int n, cplx z) {
  const cpp_complex_50 zz(z.real(), z.imag());
  cpp_complex_50 dfact = 1;
  for (int i = 1; i <= 2 * n - 1; i += 2) dfact *= i;
  cpp_complex_50 term = 1, sum = 1;
  const cpp_complex_50 half = -zz * zz / 2;
  for (int k = 1; k < 60; ++k) {
    term *= half / cpp_complex_50(k * (2 * k - 1 - 2 * n));
    sum += term;
  }
  cpp_complex_50 zp = 1;
  for (int i = 0; i <= n; ++i) zp *= zz;
  const cpp_complex_50 v = -dfact / zp * sum;
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_SUITE("specfun") {
  TEST_CASE("j_n closed forms and origin") {
    CHECK(std::abs(sph_bessel_j(0, 1.0) - std::sin(1.0)) < 1e-15);
    CHECK(sph_bessel_j(0, 0.0) == cplx(1.0));
    for (int n = 1; n < 6; ++n) CHECK(sph_bessel_j(n, 0.0) == cplx(0.0));
  }

  TEST_CASE("j_n against high-precision series") {
    CHECK(rel(sph_bessel_j(5, {2.0, 0.5}), j_series(5, {2.0, 0.5})) < 1e-12);
    for (cplx z : {cplx(0.01), cplx(0.3, 0.1), cplx(3.0), cplx(7.5, 1.0), cplx(12.0, -0.5)}) {
      for (int n : {0, 1, 2, 7, 15, 30}) {
        INFO("n=" << n << " z=" << z);
        CHECK(rel(sph_bessel_j(n, z), j_series(n, z)) < 1e-12);
      }
    }
  }

  TEST_CASE("h_n closed form, series and domain") {
    const cplx h0 = sph_hankel_h(0, 1.0);
    CHECK(std::abs(h0 - cplx(0.8414709848078965, -0.5403023058681398)) < 1e-15);
    const cplx z = 0.5;
    const cplx oracle = j_series(10, z) + kI * y_series(10, z);
    // Upward recurrence loses the tiny real part; compare against the full magnitude.
    CHECK(rel(sph_hankel_h(10, z), oracle) < 1e-12);
    CHECK_THROWS_AS(sph_hankel_h(1, 0.0), DomainError);
  }

  TEST_CASE("Wronskian") {
    std::vector<cplx> j(52), h(52);
    for (int i = 0; i < 20; ++i) {
      const double x = 0.1 * std::pow(500.0, i / 19.0);
      const cplx z = x;
      sph_bessel_j_array(51, z, j);
      sph_hankel_h_array(51, z, h);
      for (int n = 1; n <= 50; ++n) {
        const cplx w = j[n] * sph_derivative(n, z, h) - sph_derivative(n, z, j) * h[n];
        if (!std::isfinite(std::abs(h[n]))) continue;
        INFO("n=" << n << " z=" << x);
        CHECK(std::abs(w - kI / (z * z)) * std::abs(z * z) <= 1e-10);
      }
    }
  }

  TEST_CASE("three-term recurrence") {
    std::vector<cplx> j(42), h(42);
    for (cplx z : {cplx(0.7), cplx(4.0, 0.3), cplx(25.0)}) {
      sph_bessel_j_array(41, z, j);
      sph_hankel_h_array(41, z, h);
      for (int n = 1; n <= 40; ++n) {
        const cplx lhs_j = j[n - 1] + j[n + 1], rhs_j = (2.0 * n + 1.0) / z * j[n];
        const cplx lhs_h = h[n - 1] + h[n + 1], rhs_h = (2.0 * n + 1.0) / z * h[n];
        CHECK(std::abs(lhs_j - rhs_j) <= 1e-10 * std::max(std::abs(rhs_j), std::abs(j[n - 1])));
        CHECK(std::abs(lhs_h - rhs_h) <= 1e-10 * std::abs(rhs_h));
      }
    }
  }

  TEST_CASE("large imaginary argument fails loudly") {
    CHECK_THROWS_AS(sph_bessel_j(3, cplx(1.0, 800.0)), NumericalError);
  }

  TEST_CASE("harmonic values and domain") {
    CHECK(std::abs(sph_harmonic(0, 0, 0.3, 1.2) - 0.28209479177387814) < 1e-15);
    CHECK(std::abs(sph_harmonic(1, 0, kPi / 2, 0.0)) < 1e-16);
    CHECK_THROWS_AS(sph_harmonic(2, 3, 0.1, 0.1), DomainError);
    // Y_1^1 = -sqrt(3/8pi) sin(theta) e^{i phi}
    const double th = 0.7, ph = 2.1;
    CHECK(std::abs(sph_harmonic(1, 1, th, ph) + std::sqrt(3.0 / (8 * kPi)) * std::sin(th) * std::polar(1.0, ph)) <
          1e-15);
    for (int n = 1; n < 6; ++n) {
      for (int m = 1; m <= n; ++m) {
        const double sign = m % 2 ? -1.0 : 1.0;
        CHECK(std::abs(sph_harmonic(n, -m, th, ph) - sign * std::conj(sph_harmonic(n, m, th, ph))) < 1e-15);
      }
    }
  }

  TEST_CASE("addition theorem") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    HarmonicTable t;
    for (int trial = 0; trial < 10; ++trial) {
      const double th = std::acos(2 * u(rng) - 1), ph = 2 * kPi * u(rng);
      t.compute(30, th, ph);
      for (int n = 0; n <= 30; ++n) {
        double s = 0.0;
        for (int m = -n; m <= n; ++m) s += std::norm(t.y[flat_index(n, m)]);
        CHECK(std::abs(s - (2 * n + 1) / (4 * kPi)) < 1e-12);
      }
    }
  }

  TEST_CASE("angular derivatives match finite differences") {
    const double th = 1.1, ph = 0.4, h = 1e-5;
    HarmonicTable t0, tp, tm;
    t0.compute(8, th, ph);
    tp.compute(8, th + h, ph);
    tm.compute(8, th - h, ph);
    for (int i = 0; i < mode_count(8); ++i) {
      const cplx fd = (tp.y[i] - tm.y[i]) / (2 * h);
      CHECK(std::abs(fd - t0.dtheta[i]) < 1e-8);
    }
  }

  TEST_CASE("grid size, weights and exactness") {
    const SphericalGrid g1 = make_grid(1);
    CHECK(g1.size() == 8);
    double s = 0.0;
    for (double w : g1.weight) s += w;
    CHECK(std::abs(s - 4 * kPi) < 1e-12);
    CHECK_THROWS_AS(make_grid(0), DomainError);

    const SphericalGrid g4 = make_grid(4);
    cplx i21 = 0.0, i30 = 0.0;
    for (std::size_t i = 0; i < g4.size(); ++i) {
      i21 += g4.weight[i] * std::norm(sph_harmonic(2, 1, g4.theta[i], g4.phi[i]));
      i30 += g4.weight[i] * sph_harmonic(3, 0, g4.theta[i], g4.phi[i]);
      CHECK(g4.theta[i] >= 0.0);
      CHECK(g4.theta[i] <= kPi);
      CHECK(g4.phi[i] >= 0.0);
      CHECK(g4.phi[i] < 2 * kPi);
    }
    CHECK(std::abs(i21 - 1.0) < 1e-13);
    CHECK(std::abs(i30) < 1e-13);
  }

  TEST_CASE("grid orthonormality") {
    const int n = 6;
    const SphericalGrid g = make_grid(2 * n);
    HarmonicTable t;
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(mode_count(n), mode_count(n));
    for (std::size_t i = 0; i < g.size(); ++i) {
      t.compute(n, g.theta[i], g.phi[i]);
      Eigen::Map<Eigen::VectorXcd> y(t.y.data(), mode_count(n));
      gram += g.weight[i] * y.conjugate() * y.transpose();
    }
    CHECK((gram - Eigen::MatrixXcd::Identity(mode_count(n), mode_count(n))).cwiseAbs().maxCoeff() < 1e-12);
  }
}
