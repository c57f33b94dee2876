#pragma once

#include <span>
#include <vector>

#include "core/types.hpp"

namespace fmps {

/// Flat storage index of degree n, order m (|m| <= n).
constexpr int flat_index(int n, int m) { return n * n + n + m; }
/// Number of (n, m) pairs with n <= p.
constexpr int mode_count(int p) { return (p + 1) * (p + 1); }

// ---------------------------------------------------------------------------
// Spherical Bessel / Hankel functions
// ---------------------------------------------------------------------------

/// j_0..j_nmax at complex z by Miller's downward recurrence, normalized against
/// j_0 or j_1 (whichever is larger in magnitude). Throws NumericalError when the
/// normalization itself overflows (|Im z| beyond ~700).
void sph_bessel_j_array(int nmax, cplx z, std::span<cplx> out);

/// h_0..h_nmax (first kind, h = j + i y) by upward recurrence. z must be nonzero.
void sph_hankel_h_array(int nmax, cplx z, std::span<cplx> out);

cplx sph_bessel_j(int n, cplx z);
cplx sph_hankel_h(int n, cplx z);

/// f_n' from f_{n-1}, f_n, f_{n+1}: f_n' = f_{n-1} - (n+1)/z f_n, and f_0' = -f_1.
cplx sph_derivative(int n, cplx z, std::span<const cplx> f);

/// Radial factors for degree 0..p at argument z:
///   f[n] = z_n(z) and riccati[n] = z_n(z) + z z_n'(z)
/// where z_n is j_n (regular) or h_n (outgoing). The Riccati combination is the
/// J_n / H_n of the sphere interface conditions.
struct RadialFactors {
  std::vector<cplx> f;
  std::vector<cplx> riccati;
};

RadialFactors regular_radial(int p, cplx z);
RadialFactors outgoing_radial(int p, cplx z);

// ---------------------------------------------------------------------------
// Spherical harmonics (orthonormal, Condon-Shortley phase)
// ---------------------------------------------------------------------------

/// Y_n^m(theta, phi). Throws DomainError for |m| > n.
cplx sph_harmonic(int n, int m, double theta, double phi);

/// All harmonics of degree <= p at one direction, together with the two angular
/// derivative quantities the vector fields need. Every entry is finite at the poles.
struct HarmonicTable {
  int p = -1;
  std::vector<cplx> y;            ///< Y_n^m
  std::vector<cplx> dtheta;       ///< dY_n^m / dtheta
  std::vector<cplx> im_over_sin;  ///< i m Y_n^m / sin(theta)

  void compute(int order, double theta, double phi);
};

// ---------------------------------------------------------------------------
// Quadrature on [-1, 1] and on the unit sphere
// ---------------------------------------------------------------------------

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int count);

struct SphericalGrid {
  int order = 0;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> weight;  ///< sums to 4 pi

  std::size_t size() const { return weight.size(); }
  Vec3 direction(std::size_t i) const;
};

/// Gauss-Legendre in cos(theta) (q+1 nodes) times uniform phi (2q+2 nodes).
/// Integrates Y_n^m conj(Y_n'^m') exactly for n, n' <= q.
SphericalGrid make_grid(int q);

}  // namespace fmps
