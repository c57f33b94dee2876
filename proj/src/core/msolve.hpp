#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "core/gmres.hpp"
#include "core/mie.hpp"
#include "core/parallel.hpp"
#include "core/translate.hpp"

namespace fmps {

struct DielectricModel {
  Medium interior;
};

struct PecModel {};

/// Reference to a precomputed scattering matrix by id (looked up in Scene::matrices).
struct CachedModel {
  std::string id;
};

using SiteModel = std::variant<DielectricModel, PecModel, CachedModel>;

struct SphereSite {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  SiteModel model = PecModel{};
};

struct Scene {
  Medium exterior;
  std::vector<SphereSite> sites;
  PlaneWave incident;
  int p = 4;
  double eta = 1.05;  ///< separation factor on R_i + R_j
  std::map<std::string, std::shared_ptr<const ScatteringMatrix>> matrices;

  /// Throws GeometryError listing every offending pair, DomainError on bad parameters.
  void validate() const;
};

struct SolveOptions {
  double tol = 1e-6;
  int restart = 50;
  int maxiter = 1000;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  double seconds = 0.0;
  std::vector<double> history;
  std::vector<ModeCoeffs> outgoing;  ///< per site
};

struct CrossSections {
  double scat = 0.0;
  double abs = 0.0;
  double ext = 0.0;  ///< forward-amplitude (optical theorem) bookkeeping
};

/// Axis-aligned sampling plane: coordinate `axis` fixed at `offset`, the other two
/// (in cyclic order after axis) spanning [u0, u1] x [v0, v1].
struct PlaneSpec {
  int axis = 2;
  double offset = 0.0;
  double u0 = -1.0, u1 = 1.0;
  double v0 = -1.0, v1 = 1.0;
  int nu = 11, nv = 11;
};

struct PoyntingGrid {
  PlaneSpec plane;
  std::vector<Vec3> points;   ///< row-major, u fastest
  std::vector<double> value;  ///< S . axis, NaN where masked
  std::vector<bool> masked;
};

/// Multiple-scattering problem over a validated scene. Site scattering matrices,
/// interior maps, incident coefficients and all pair translation operators are built
/// at construction; everything after that is read-only.
class MultipleScattering {
 public:
  explicit MultipleScattering(Scene scene, std::shared_ptr<TranslationCache> cache = nullptr, int workers = 1);

  const Scene& scene() const { return scene_; }
  std::size_t site_count() const { return scene_.sites.size(); }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(site_count()) * block_; }
  const ScatteringMatrix& scattering(std::size_t l) const { return scat_[l]; }

  /// Incident coefficients about site l (regular kind).
  const ModeCoeffs& incident_coeffs(std::size_t l) const { return incident_[l]; }

  Eigen::VectorXcd assemble_rhs() const;
  Eigen::VectorXcd apply_system(const Eigen::VectorXcd& x) const;
  SolveReport solve(const SolveOptions& options = {}) const;

  /// Regular coefficients of everything except site l's own outgoing field, about c_l.
  ModeCoeffs incoming_at(std::size_t l, const std::vector<ModeCoeffs>& outgoing) const;

  /// Same at degree interior_order(); drives interior field reconstruction.
  ModeCoeffs incoming_at_interior(std::size_t l, const std::vector<ModeCoeffs>& outgoing) const;
  int interior_order() const { return p_int_; }

  FieldSample eval_total_field(const SolveReport& sol, const Vec3& x) const;
  FieldSample eval_scattered_field(const SolveReport& sol, const Vec3& x) const;
  CrossSections cross_sections(const SolveReport& sol) const;
  PoyntingGrid poynting_grid(const SolveReport& sol, const PlaneSpec& plane) const;

  /// Degree-1 outgoing coefficients of the aggregate scattered field about the
  /// centroid of the site centers, used as the polarization observable.
  ModeCoeffs aggregate_dipole(const SolveReport& sol) const;

  Vec3 centroid() const;
  double bounding_radius() const;  ///< about centroid(), including site radii

 private:
  std::vector<ModeCoeffs> split(const Eigen::VectorXcd& x) const;

  Scene scene_;
  int workers_ = 1;
  Eigen::Index block_ = 0;
  std::shared_ptr<TranslationCache> cache_;
  std::vector<ScatteringMatrix> scat_;
  int p_int_ = 0;
  std::vector<std::shared_ptr<const MieSolution>> mie_;  ///< dielectric sites only, at p_int_
  std::vector<ModeCoeffs> incident_;
  std::vector<ModeCoeffs> incident_int_;  ///< at p_int_, only when a dielectric site exists
  std::vector<std::vector<std::shared_ptr<const TranslationOperator>>> trans_;  ///< [l][j]: site j -> site l
};

}  // namespace fmps
