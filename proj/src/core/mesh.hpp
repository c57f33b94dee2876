#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "core/types.hpp"

namespace fmps {

/// Closed, outward-oriented flat-triangle surface with per-triangle geometry.
class TriMesh {
 public:
  TriMesh() = default;
  /// Validates (indices, degenerate areas, closed and consistently oriented,
  /// positive enclosed volume) and throws GeometryError listing what failed.
  TriMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles);

  std::size_t size() const { return triangles_.size(); }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }

  const Vec3& vertex(std::size_t t, int corner) const { return vertices_[triangles_[t][corner]]; }
  const Vec3& centroid(std::size_t t) const { return centroid_[t]; }
  double area(std::size_t t) const { return area_[t]; }
  const Vec3& normal(std::size_t t) const { return normal_[t]; }
  const Vec3& t1(std::size_t t) const { return t1_[t]; }
  const Vec3& t2(std::size_t t) const { return t2_[t]; }
  double diameter(std::size_t t) const { return diam_[t]; }

  double max_triangle_diameter() const;
  double volume() const;
  /// Largest vertex distance from c.
  double extent_from(const Vec3& c) const;
  /// Distance from x to the nearest point of the surface.
  double distance_to(const Vec3& x) const;

  /// FNV-1a 64 over the little-endian bytes of the vertex coordinates and indices.
  std::uint64_t fingerprint() const;

  TriMesh transformed(const Eigen::Matrix3d& rotation, const Vec3& translation) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Vec3> centroid_, normal_, t1_, t2_;
  std::vector<double> area_, diam_;
};

/// Subdivided icosahedron projected onto a sphere: 20 * 4^level triangles.
TriMesh sphere_mesh(int level, double radius, const Vec3& center = Vec3::Zero());

/// Sphere mesh scaled to semi-axes (a, b, c) along the rotated x, y, z axes.
TriMesh ellipsoid_mesh(int level, const Vec3& semi_axes, const Eigen::Matrix3d& rotation = Eigen::Matrix3d::Identity(),
                       const Vec3& center = Vec3::Zero());

/// Disjoint union (vertex indices of later meshes are offset).
TriMesh merge_meshes(const std::vector<TriMesh>& parts);

/// Indexed triangle soup: vertex count, "x y z" lines, triangle count, "i j k" lines
/// (zero based). Blank lines and lines starting with '#' are ignored.
TriMesh read_mesh(const std::string& path);
void write_mesh(const TriMesh& mesh, const std::string& path);

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace fmps
