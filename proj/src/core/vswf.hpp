#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "core/specfun.hpp"
#include "core/types.hpp"

namespace fmps {

/// Homogeneous isotropic medium at one angular frequency.
/// The wavenumber branch is fixed so that Im k >= 0.
class Medium {
 public:
  Medium() = default;
  Medium(cplx eps, cplx mu, double omega);

  cplx eps() const { return eps_; }
  cplx mu() const { return mu_; }
  double omega() const { return omega_; }
  cplx k() const { return k_; }
  /// Wave admittance k / (omega mu); |H| = |Y| |E| for a plane wave.
  cplx admittance() const { return k_ / (omega_ * mu_); }

  bool same_as(const Medium& other, double rel_tol = 1e-12) const;

 private:
  cplx eps_{1.0};
  cplx mu_{1.0};
  double omega_ = 1.0;
  cplx k_{1.0};
};

enum class FieldKind { Outgoing, Regular };

/// Debye-expansion coefficients truncated at degree p, stored as one vector
/// [a_{0,0} .. a_{p,p}, b_{0,0} .. b_{p,p}] with the flat index n^2 + n + m.
///
/// Field convention (shared by every module):
///   E = sum a N_nm + i omega mu sum b M_nm,   H = sum b N_nm - i omega eps sum a M_nm
/// with M_nm = curl(x z_n(kr) Y_n^m) and N_nm = curl curl(x z_n(kr) Y_n^m).
struct ModeCoeffs {
  int p = 0;
  Eigen::VectorXcd data;

  ModeCoeffs() = default;
  explicit ModeCoeffs(int order) : p(order), data(Eigen::VectorXcd::Zero(2 * mode_count(order))) {}
  ModeCoeffs(int order, Eigen::VectorXcd values);

  int modes() const { return mode_count(p); }
  auto a() { return data.head(modes()); }
  auto a() const { return data.head(modes()); }
  auto b() { return data.tail(modes()); }
  auto b() const { return data.tail(modes()); }
  cplx& a(int n, int m) { return data[flat_index(n, m)]; }
  cplx& b(int n, int m) { return data[modes() + flat_index(n, m)]; }
  cplx a(int n, int m) const { return data[flat_index(n, m)]; }
  cplx b(int n, int m) const { return data[modes() + flat_index(n, m)]; }
};

struct PlaneWave {
  Vec3 direction{0.0, 0.0, 1.0};
  CVec3 polarization{1.0, 0.0, 0.0};  ///< E amplitude vector, transverse to direction

  /// Checks |direction| = 1 and direction . polarization = 0; throws DomainError otherwise.
  void validate() const;
  CVec3 e_field(const Medium& medium, const Vec3& x) const;
  CVec3 h_field(const Medium& medium, const Vec3& x) const;
};

struct FieldSample {
  CVec3 E = CVec3::Zero();
  CVec3 H = CVec3::Zero();
};

/// Fields of every unit mode at one point: column j of `e`/`h` is the field of
/// coefficient j of the stacked (a, b) vector set to one.
struct ModeFieldBlock {
  Eigen::Matrix<cplx, 3, Eigen::Dynamic> e;
  Eigen::Matrix<cplx, 3, Eigen::Dynamic> h;
};

void mode_fields(int p, FieldKind kind, const Medium& medium, const Vec3& center, const Vec3& x,
                 ModeFieldBlock& out, bool with_h = true);

FieldSample eval_field(const ModeCoeffs& coeffs, FieldKind kind, const Medium& medium, const Vec3& center,
                       const Vec3& x);

/// Relative size of the projection denominators for degrees 1..p at z = kR.
/// The a-family divides by the Riccati factor, the b-family by z_n itself.
struct ProjectionConditioning {
  double worst = 1.0;  ///< smallest relative denominator over n and both families
  int degree = 0;      ///< degree at which it occurs
};

ProjectionConditioning projection_conditioning(int p, FieldKind kind, cplx z);

/// Turns E (or H) samples on a sphere into expansion coefficients of the given kind.
///
/// E is trusted for both families: a_nm comes from the Psi (gradient) component of
/// tangential E and b_nm from the Phi (rotated) component. `project_h` recovers the
/// same pair from tangential H through the opposite families and is only used to
/// report consistency.
class SurfaceProjector {
 public:
  /// grid_order <= 0 selects 2p + 4. Throws IllConditionedProjection when a
  /// denominator is below 1e-13 of its natural scale.
  SurfaceProjector(const Medium& medium, const Vec3& center, double radius, int p, FieldKind kind,
                   int grid_order = 0);

  int order() const { return p_; }
  double radius() const { return radius_; }
  const Vec3& center() const { return center_; }
  const SphericalGrid& grid() const { return grid_; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<Vec3>& nodes() const { return nodes_; }

  ModeCoeffs project_e(const std::vector<CVec3>& e) const;
  ModeCoeffs project_h(const std::vector<CVec3>& h) const;

  /// Dense form of project_e: coeffs = matrix * [E_x(0), E_y(0), E_z(0), E_x(1), ...].
  Eigen::MatrixXcd e_matrix() const { return e_matrix(0, nodes_.size()); }
  /// Columns of e_matrix belonging to nodes [first, first + count).
  Eigen::MatrixXcd e_matrix(std::size_t first, std::size_t count) const;

 private:
  ModeCoeffs project(const std::vector<CVec3>& samples, bool from_h) const;

  Medium medium_;
  Vec3 center_;
  double radius_;
  int p_;
  FieldKind kind_;
  SphericalGrid grid_;
  std::vector<Vec3> nodes_;
  // Per-degree divisors: E route (psi -> a, phi -> b) and H route (psi -> b, phi -> a).
  std::vector<cplx> e_psi_, e_phi_, h_psi_, h_phi_;
};

using VectorField = std::function<CVec3(const Vec3&)>;

struct ProjectionDiagnostics {
  /// max |c_E - c_H| / max |c_E| between the E- and H-based coefficient routes.
  double eh_mismatch = 0.0;
};

ModeCoeffs project_surface_field(const VectorField& e_field, const VectorField& h_field, const Medium& medium,
                                 const Vec3& center, double radius, int p, FieldKind kind,
                                 ProjectionDiagnostics* diagnostics = nullptr, int grid_order = 0);

/// Far-field amplitude F of an outgoing expansion, E ~ F exp(ikr)/r along unit
/// direction dir as r -> infinity (observation distance measured from the origin).
CVec3 far_field_amplitude(const ModeCoeffs& coeffs, const Medium& medium, const Vec3& center, const Vec3& dir);

/// Regular (incoming) coefficients of a plane wave about `center`.
ModeCoeffs plane_wave_coeffs(const PlaneWave& pw, const Medium& medium, const Vec3& center, int p);

}  // namespace fmps
