#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/LU>

#include "core/mesh.hpp"
#include "core/mie.hpp"
#include "core/vswf.hpp"

namespace fmps {

/// Interior-side currents, constant per triangle: J1 = j1 t1 + j2 t2, K1 = k1 t1 + k2 t2.
/// Stored blocked as [j(0,1), j(1,1), ... | k(0,1), ...], i.e. J in the first 2N entries.
/// The exterior-side currents are J0 = (eps0/eps1) J1 and K0 = (mu0/mu1) K1.
struct SurfaceCurrents {
  Eigen::VectorXcd data;

  SurfaceCurrents() = default;
  explicit SurfaceCurrents(std::size_t triangles) : data(Eigen::VectorXcd::Zero(4 * triangles)) {}

  std::size_t triangles() const { return static_cast<std::size_t>(data.size()) / 4; }
  cplx& j(std::size_t t, int a) { return data[2 * t + a]; }
  cplx& k(std::size_t t, int a) { return data[2 * triangles() + 2 * t + a]; }
  cplx j(std::size_t t, int a) const { return data[2 * t + a]; }
  cplx k(std::size_t t, int a) const { return data[2 * triangles() + 2 * t + a]; }
};

enum class Domain { Exterior, Interior };

/// Message when either medium's wavelength is under 5 max triangle diameters.
std::optional<std::string> resolution_warning(const TriMesh& mesh, const Medium& exterior, const Medium& interior);

/// Collocation matrix (4N x 4N) at triangle centroids. Rows 0..2N-1 enforce
/// continuity of n x H (scaled by 1/mu0), rows 2N..4N-1 continuity of n x E
/// (scaled by 1/eps0); both are tested with t1 and t2. With interior == exterior
/// it is exactly diag(I/mu0, I/eps0).
Eigen::MatrixXcd assemble_muller(const TriMesh& mesh, const Medium& exterior, const Medium& interior,
                                 int workers = 1);

/// Right-hand side for incident fields given in the exterior medium.
Eigen::VectorXcd muller_rhs(const TriMesh& mesh, const Medium& exterior, const VectorField& incident_e,
                            const VectorField& incident_h);

/// One-shot LU solve; throws NumericalError if the matrix is singular or the
/// relative residual exceeds 1e-10.
SurfaceCurrents solve_currents(const Eigen::MatrixXcd& matrix, const TriMesh& mesh, const Medium& exterior,
                               const VectorField& incident_e, const VectorField& incident_h);

/// Assembled and factorized system, reusable across right-hand sides.
class MullerSystem {
 public:
  MullerSystem(TriMesh mesh, const Medium& exterior, const Medium& interior, int workers = 1);

  const TriMesh& mesh() const { return mesh_; }
  const Medium& exterior() const { return exterior_; }
  const Medium& interior() const { return interior_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  /// Reciprocal condition estimate in the 1-norm.
  double rcond() const { return rcond_; }

  SurfaceCurrents solve(const VectorField& incident_e, const VectorField& incident_h) const;
  /// Solves for every column of rhs; checks each relative residual against 1e-10.
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const;

 private:
  TriMesh mesh_;
  Medium exterior_, interior_;
  Eigen::MatrixXcd matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  double rcond_ = 0.0;
};

/// Field radiated by the currents into one domain: the scattered field outside,
/// the total field inside. Throws DomainError within 1e-6 mesh diameters of the surface.
FieldSample radiate(const SurfaceCurrents& currents, const TriMesh& mesh, const Medium& exterior,
                    const Medium& interior, Domain domain, const Vec3& x);

/// Currents built from the incident field's own tangential traces, in the interior
/// normalization. Radiated into the exterior they cancel (extinction), so
/// subtracting them from a solution before radiating outward leaves the scattered
/// field without the discretization error of that cancellation.
SurfaceCurrents incident_currents(const TriMesh& mesh, const Medium& exterior, const Medium& interior,
                                  const VectorField& incident_e, const VectorField& incident_h);

/// Linear map from the current vector to the field at x: rows 0..2 give E, rows 3..5 give H.
Eigen::Matrix<cplx, 6, Eigen::Dynamic> radiation_block(const TriMesh& mesh, const Medium& exterior,
                                                       const Medium& interior, Domain domain, const Vec3& x);

struct InclusionScatteringMatrix {
  ScatteringMatrix scattering;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::uint64_t mesh_fingerprint = 0;
  /// Currents for each unit incoming mode (4N x 2(p+1)^2); empty unless requested.
  Eigen::MatrixXcd unit_currents;
  double rcond = 0.0;
  std::vector<std::string> warnings;
};

struct InclusionOptions {
  int workers = 1;
  bool keep_currents = false;
  /// Projection sphere radius in units of the enclosing radius.
  double projection_factor = 2.0;
};

/// Fingerprint of the geometry, interior material and placement of an inclusion.
std::uint64_t inclusion_fingerprint(const TriMesh& mesh, const Medium& interior, const Vec3& center);

/// Dense scattering matrix of the inclusion about its enclosing sphere (center, radius).
InclusionScatteringMatrix build_inclusion_scatmat(const TriMesh& mesh, const Vec3& center, double radius,
                                                  const Medium& exterior, const Medium& interior, int p,
                                                  const InclusionOptions& options = {});

}  // namespace fmps
