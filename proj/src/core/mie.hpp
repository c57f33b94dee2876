#pragma once

#include <cstdint>
#include <vector>

#include "core/vswf.hpp"

namespace fmps {

/// Linear map from incoming (alpha, beta) to outgoing (a, b) coefficients on an
/// enclosing sphere. Either block-scalar per degree (spheres) or dense.
class ScatteringMatrix {
 public:
  enum class Form { Diagonal, Dense };

  ScatteringMatrix() = default;
  static ScatteringMatrix diagonal(int p, std::vector<cplx> sa, std::vector<cplx> sb, const Medium& exterior,
                                   double radius);
  static ScatteringMatrix dense(int p, Eigen::MatrixXcd m, const Medium& exterior, double radius,
                                std::uint64_t mesh_fingerprint = 0);

  int order() const { return p_; }
  Form form() const { return form_; }
  const Medium& exterior() const { return exterior_; }
  double radius() const { return radius_; }
  double omega() const { return exterior_.omega(); }
  std::uint64_t mesh_fingerprint() const { return mesh_fingerprint_; }

  const std::vector<cplx>& sa() const { return sa_; }
  const std::vector<cplx>& sb() const { return sb_; }
  const Eigen::MatrixXcd& matrix() const { return dense_; }

  ModeCoeffs apply(const ModeCoeffs& incoming) const;
  Eigen::MatrixXcd to_dense() const;

  /// Throws DomainError unless the matrix was built for this exterior medium and radius.
  void require_match(const Medium& exterior, double radius, double rel_tol = 1e-12) const;

 private:
  int p_ = 0;
  Form form_ = Form::Diagonal;
  Medium exterior_;
  double radius_ = 0.0;
  std::uint64_t mesh_fingerprint_ = 0;
  std::vector<cplx> sa_, sb_;
  Eigen::MatrixXcd dense_;
};

ModeCoeffs apply_scattering(const ScatteringMatrix& s, const ModeCoeffs& incoming);

/// Sphere solution: outgoing map plus the interior map (alpha, beta) -> (c, d),
/// both diagonal in (n, m) and independent of m.
struct MieSolution {
  ScatteringMatrix scattering;
  Medium interior;
  std::vector<cplx> ca;  ///< c_n / alpha_n
  std::vector<cplx> cb;  ///< d_n / beta_n

  /// Regular interior coefficients for a given incoming expansion.
  ModeCoeffs interior_coeffs(const ModeCoeffs& incoming) const;
};

MieSolution mie_dielectric(double radius, const Medium& exterior, const Medium& interior, int p);

ScatteringMatrix mie_pec(double radius, const Medium& exterior, int p);

}  // namespace fmps
