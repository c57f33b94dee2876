#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/material.hpp"
#include "core/mesh.hpp"
#include "core/msolve.hpp"

namespace fmps {

/// One validation finding. `code` is machine readable: syntax, unknown-key,
/// missing, type, range, unit-mismatch, overlap, reference, io, geometry.
struct ConfigIssue {
  std::string code;
  int line = 0;  ///< 1 based; 0 when not tied to a line
  std::string field;
  std::string message;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Constant (eps, mu) or a tabulated material (`table` is the CSV path as written).
struct MaterialSpec {
  cplx eps{1.0};
  cplx mu{1.0};
  std::string table;
  std::shared_ptr<const MaterialTable> loaded;

  /// Relative (eps, mu) at omega; throws DomainError outside a table's range.
  std::pair<cplx, cplx> at(double omega) const;
};

/// Meshed inclusion. The mesh is rotated about `center`, the middle of its
/// enclosing sphere; sites place that center.
struct InclusionSpec {
  std::string mesh;  ///< path as written
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::string material;
  Vec3 rotation_axis{0.0, 0.0, 1.0};
  double rotation_deg = 0.0;
  std::shared_ptr<const TriMesh> loaded;  ///< after rotation

  Eigen::Matrix3d rotation() const;
};

struct SiteSpec {
  enum class Kind { Pec, Dielectric, Inclusion, Scatmat };
  Vec3 center = Vec3::Zero();
  double radius = 0.0;      ///< taken from the inclusion or the cache file for those kinds
  Kind kind = Kind::Pec;
  std::string ref;          ///< material name, inclusion name, or scatmat path as written
  std::shared_ptr<const ScatteringMatrix> loaded;  ///< Kind::Scatmat only
  int line = 0;
};

struct FrequencySpec {
  enum class Variable { Omega, Wavelength };
  Variable variable = Variable::Omega;
  std::vector<double> values;  ///< explicit list, or empty when a range is used
  double start = 0.0, stop = 0.0;
  int count = 0;

  /// The angular frequencies, in listed order (omega = 2 pi / wavelength).
  std::vector<double> omegas() const;
};

struct OutputSpec {
  bool cross_sections = true;
  bool polarization = true;
  std::vector<PlaneSpec> planes;
  std::vector<Vec3> probes;
};

struct SceneConfig {
  std::string path;          ///< file the config came from; relative paths resolve against its directory
  std::string length_unit = "1";
  std::string exterior = "vacuum";  ///< material name; "vacuum" is predefined
  std::map<std::string, MaterialSpec> materials;
  Vec3 direction{0.0, 0.0, 1.0};
  CVec3 polarization{1.0, 0.0, 0.0};
  FrequencySpec frequency;
  int p = 4;
  double eta = 1.05;
  SolveOptions solver;
  std::string cache_dir;
  std::map<std::string, InclusionSpec> inclusions;
  std::vector<SiteSpec> sites;
  OutputSpec outputs;

  /// Resolves a path written in the file against the file's directory.
  std::string resolve(const std::string& relative) const;
  const MaterialSpec& material(const std::string& name) const;
  Medium exterior_at(double omega) const;
};

/// Reads and fully validates; throws ConfigError with every issue found,
/// IoError if the file itself cannot be read.
SceneConfig parse_scene(const std::string& path);
SceneConfig parse_scene_text(const std::string& text, const std::string& path = "<string>");

/// Canonical YAML for a config; parse_scene_text(write_scene_text(c)) reproduces c.
std::string write_scene_text(const SceneConfig& config);

/// msolve scene at one frequency. Inclusion sites refer to matrices by inclusion
/// name and the caller fills those; scatmat sites are filled here (key "file:<path>").
Scene build_scene(const SceneConfig& config, double omega);

}  // namespace fmps
