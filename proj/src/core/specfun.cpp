#include "core/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fmps {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// j_1 via its Taylor series; the closed form cancels badly for small |z|.
cplx j1_series(cplx z) {
  const cplx z2 = z * z;
  cplx term = z / 3.0;
  cplx sum = term;
  for (int k = 1; k < 30; ++k) {
    term *= -z2 / (2.0 * k * (2.0 * k + 3.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

void sph_bessel_j_array(int nmax, cplx z, std::span<cplx> out) {
  if (nmax < 0) throw DomainError("sph_bessel_j: negative order");
  if (out.size() < static_cast<std::size_t>(nmax) + 1) throw DomainError("sph_bessel_j: output span too small");
  if (!finite(z)) throw DomainError("sph_bessel_j: non-finite argument");

  if (z == cplx(0.0)) {
    out[0] = 1.0;
    for (int n = 1; n <= nmax; ++n) out[n] = 0.0;
    return;
  }

  const double az = std::abs(z);
  const cplx j0 = std::sin(z) / z;
  const cplx j1 = az < 0.5 ? j1_series(z) : (j0 - std::cos(z)) / z;
  if (!finite(j0) || !finite(j1)) {
    throw NumericalError("sph_bessel_j: normalization overflows for z = (" + std::to_string(z.real()) + ", " +
                         std::to_string(z.imag()) + ")");
  }

  const int keep = std::max(nmax, 1);
  const int top = std::max(nmax, static_cast<int>(std::ceil(az))) + 30 + static_cast<int>(std::ceil(2.0 * std::sqrt(az)));
  std::vector<cplx> f(keep + 1, cplx(0.0));

  constexpr double kBig = 1e200;
  cplx above = 0.0;
  cplx current = 1.0;
  for (int n = top; n >= 1; --n) {
    const cplx below = (2.0 * n + 1.0) / z * current - above;
    if (n <= keep) f[n] = current;
    above = current;
    current = below;
    if (std::abs(current) > kBig) {
      above /= kBig;
      current /= kBig;
      for (int i = n; i <= keep; ++i) f[i] /= kBig;
    }
  }
  f[0] = current;

  const bool use_j0 = az < 0.5 || std::abs(j0) >= std::abs(j1);
  const cplx scale = use_j0 ? j0 / f[0] : j1 / f[1];
  if (!finite(scale)) throw NumericalError("sph_bessel_j: Miller normalization failed");
  for (int n = 0; n <= nmax; ++n) out[n] = f[n] * scale;
}

void sph_hankel_h_array(int nmax, cplx z, std::span<cplx> out) {
  if (nmax < 0) throw DomainError("sph_hankel_h: negative order");
  if (out.size() < static_cast<std::size_t>(nmax) + 1) throw DomainError("sph_hankel_h: output span too small");
  if (z == cplx(0.0)) throw DomainError("sph_hankel_h: singular at z = 0");
  if (!finite(z)) throw DomainError("sph_hankel_h: non-finite argument");

  const cplx e = std::exp(kI * z);
  out[0] = -kI * e / z;
  if (nmax >= 1) out[1] = -e * (z + kI) / (z * z);
  for (int n = 1; n < nmax; ++n) out[n + 1] = (2.0 * n + 1.0) / z * out[n] - out[n - 1];
  for (int n = 0; n <= nmax; ++n) {
    if (!finite(out[n])) {
      throw NumericalError("sph_hankel_h: overflow at order " + std::to_string(n) + " for |z| = " +
                           std::to_string(std::abs(z)));
    }
  }
}

cplx sph_bessel_j(int n, cplx z) {
  std::vector<cplx> f(n + 1);
  sph_bessel_j_array(n, z, f);
  return f[n];
}

cplx sph_hankel_h(int n, cplx z) {
  std::vector<cplx> f(n + 1);
  sph_hankel_h_array(n, z, f);
  return f[n];
}

cplx sph_derivative(int n, cplx z, std::span<const cplx> f) {
  if (z == cplx(0.0)) return n == 1 ? cplx(1.0 / 3.0) : cplx(0.0);
  if (n == 0) return -f[1];
  return f[n - 1] - (n + 1.0) / z * f[n];
}

namespace {

RadialFactors riccati_from(int p, cplx z, const std::vector<cplx>& f) {
  RadialFactors r;
  r.f.assign(f.begin(), f.begin() + p + 1);
  r.riccati.resize(p + 1);
  r.riccati[0] = f[0] - z * f[1];
  for (int n = 1; n <= p; ++n) r.riccati[n] = z * f[n - 1] - static_cast<double>(n) * f[n];
  return r;
}

}  // namespace

RadialFactors regular_radial(int p, cplx z) {
  std::vector<cplx> f(p + 2);
  sph_bessel_j_array(p + 1, z, f);
  return riccati_from(p, z, f);
}

RadialFactors outgoing_radial(int p, cplx z) {
  std::vector<cplx> f(p + 2);
  sph_hankel_h_array(p + 1, z, f);
  return riccati_from(p, z, f);
}

void HarmonicTable::compute(int order, double theta, double phi) {
  if (order < 0) throw DomainError("harmonics: negative order");
  p = order;
  const int count = mode_count(p);
  y.assign(count, cplx(0.0));
  dtheta.assign(count, cplx(0.0));
  im_over_sin.assign(count, cplx(0.0));

  const double x = std::cos(theta);
  const double s = std::sin(theta);

  // q[n] = Pbar_n^m / sin(theta) for m >= 1 (finite at the poles), Pbar_n^0 for m = 0.
  std::vector<double> q(p + 1);
  std::vector<double> q1(p + 1, 0.0);  // m = 1 column, needed for dPbar_n^0/dtheta
  double diag = 1.0 / std::sqrt(4.0 * kPi);

  for (int m = 0; m <= p; ++m) {
    if (m > 0) diag *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    std::fill(q.begin(), q.end(), 0.0);
    q[m] = m == 0 ? diag : diag * std::pow(s, m - 1);
    if (m + 1 <= p) q[m + 1] = std::sqrt(2.0 * m + 3.0) * x * q[m];
    for (int n = m + 2; n <= p; ++n) {
      const double nn = n;
      const double a = std::sqrt((4.0 * nn * nn - 1.0) / (nn * nn - m * m));
      const double b = std::sqrt(((nn - 1.0) * (nn - 1.0) - m * m) / (4.0 * (nn - 1.0) * (nn - 1.0) - 1.0));
      q[n] = a * (x * q[n - 1] - b * q[n - 2]);
    }
    if (m == 1) q1 = q;

    const cplx phase = std::polar(1.0, m * phi);
    for (int n = m; n <= p; ++n) {
      const int idx = flat_index(n, m);
      if (m == 0) {
        y[idx] = q[n];
      } else {
        const double nn = n;
        const double lower = n - 1 >= m ? q[n - 1] : 0.0;
        const double dth = nn * x * q[n] - std::sqrt((2.0 * nn + 1.0) * (nn - m) * (nn + m) / (2.0 * nn - 1.0)) * lower;
        y[idx] = s * q[n] * phase;
        dtheta[idx] = dth * phase;
        im_over_sin[idx] = kI * static_cast<double>(m) * q[n] * phase;
      }
    }
  }
  for (int n = 1; n <= p; ++n) dtheta[flat_index(n, 0)] = std::sqrt(n * (n + 1.0)) * s * q1[n];

  for (int n = 1; n <= p; ++n) {
    for (int m = 1; m <= n; ++m) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      const int pos = flat_index(n, m);
      const int neg = flat_index(n, -m);
      y[neg] = sign * std::conj(y[pos]);
      dtheta[neg] = sign * std::conj(dtheta[pos]);
      im_over_sin[neg] = sign * std::conj(im_over_sin[pos]);
    }
  }
}

cplx sph_harmonic(int n, int m, double theta, double phi) {
  if (n < 0 || std::abs(m) > n) {
    throw DomainError("sph_harmonic: need |m| <= n, got n = " + std::to_string(n) + ", m = " + std::to_string(m));
  }
  HarmonicTable t;
  t.compute(n, theta, phi);
  return t.y[flat_index(n, m)];
}

GaussLegendre gauss_legendre(int count) {
  if (count < 1) throw DomainError("gauss_legendre: need at least one node");
  GaussLegendre gl;
  gl.nodes.resize(count);
  gl.weights.resize(count);
  for (int i = 0; i < count; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= count; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = count * (x * p1 - p0) / (x * x - 1.0);
    gl.nodes[i] = x;
    gl.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return gl;
}

Vec3 SphericalGrid::direction(std::size_t i) const {
  const double s = std::sin(theta[i]);
  return {s * std::cos(phi[i]), s * std::sin(phi[i]), std::cos(theta[i])};
}

SphericalGrid make_grid(int q) {
  if (q < 1) throw DomainError("make_grid: order must be >= 1");
  const GaussLegendre gl = gauss_legendre(q + 1);
  const int nphi = 2 * q + 2;
  SphericalGrid g;
  g.order = q;
  g.theta.reserve(gl.nodes.size() * nphi);
  g.phi.reserve(gl.nodes.size() * nphi);
  g.weight.reserve(gl.nodes.size() * nphi);
  const double dphi = 2.0 * kPi / nphi;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double th = std::acos(std::clamp(gl.nodes[i], -1.0, 1.0));
    for (int j = 0; j < nphi; ++j) {
      g.theta.push_back(th);
      g.phi.push_back(j * dphi);
      g.weight.push_back(gl.weights[i] * dphi);
    }
  }
  return g;
}

}  // namespace fmps
