#include "core/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace fmps {

static_assert(std::endian::native == std::endian::little, "fingerprints assume a little-endian host");

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  std::vector<std::string> problems;
  auto report = [&](const std::string& s) {
    if (problems.size() < 12) problems.push_back(s);
  };
  if (triangles_.empty()) report("no triangles");
  for (const Vec3& v : vertices_) {
    if (!v.allFinite()) {
      report("non-finite vertex coordinate");
      break;
    }
  }
  const int nv = static_cast<int>(vertices_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int c : tri) {
      if (c < 0 || c >= nv) report("triangle " + std::to_string(t) + " has vertex index out of range");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      report("triangle " + std::to_string(t) + " repeats a vertex");
    }
  }
  if (!problems.empty()) {
    std::string msg = "mesh: ";
    for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
    throw GeometryError(msg);
  }

  const std::size_t n = triangles_.size();
  centroid_.resize(n);
  normal_.resize(n);
  t1_.resize(n);
  t2_.resize(n);
  area_.resize(n);
  diam_.resize(n);
  double max_area = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const Vec3 &a = vertex(t, 0), &b = vertex(t, 1), &c = vertex(t, 2);
    const Vec3 cr = (b - a).cross(c - a);
    area_[t] = 0.5 * cr.norm();
    max_area = std::max(max_area, area_[t]);
    centroid_[t] = (a + b + c) / 3.0;
    diam_[t] = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (!(area_[t] >= 1e-12 * max_area) || area_[t] == 0.0) {
      report("triangle " + std::to_string(t) + " is degenerate (area " + std::to_string(area_[t]) + ")");
      continue;
    }
    const Vec3 &a = vertex(t, 0), &b = vertex(t, 1), &c = vertex(t, 2);
    normal_[t] = (b - a).cross(c - a).normalized();
    t1_[t] = (b - a).normalized();
    t2_[t] = normal_[t].cross(t1_[t]);
  }

  std::map<std::pair<int, int>, int> directed;
  for (const auto& tri : triangles_) {
    for (int e = 0; e < 3; ++e) ++directed[{tri[e], tri[(e + 1) % 3]}];
  }
  int open = 0, flipped = 0;
  for (const auto& [edge, count] : directed) {
    if (count > 1) ++flipped;
    if (!directed.count({edge.second, edge.first})) ++open;
  }
  if (open) report(std::to_string(open) + " boundary edge(s): surface is not closed");
  if (flipped) report(std::to_string(flipped) + " edge(s) traversed twice in one direction: inconsistent orientation");
  if (problems.empty() && !(volume() > 0.0)) report("enclosed volume is not positive: normals point inward");

  if (!problems.empty()) {
    std::string msg = "mesh: ";
    for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
    throw GeometryError(msg);
  }
}

double TriMesh::max_triangle_diameter() const {
  double d = 0.0;
  for (double v : diam_) d = std::max(d, v);
  return d;
}

double TriMesh::volume() const {
  double v = 0.0;
  for (std::size_t t = 0; t < size(); ++t) v += vertex(t, 0).dot(vertex(t, 1).cross(vertex(t, 2)));
  return v / 6.0;
}

double TriMesh::extent_from(const Vec3& c) const {
  double r = 0.0;
  for (const Vec3& v : vertices_) r = std::max(r, (v - c).norm());
  return r;
}

namespace {

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + d1 / (d1 - d3) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

double TriMesh::distance_to(const Vec3& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < size(); ++t) {
    if ((x - centroid_[t]).norm() - diam_[t] > best) continue;
    best = std::min(best, (x - closest_on_triangle(x, vertex(t, 0), vertex(t, 1), vertex(t, 2))).norm());
  }
  return best;
}

std::uint64_t TriMesh::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Vec3& v : vertices_) h = fnv1a(v.data(), 3 * sizeof(double), h);
  for (const auto& t : triangles_) h = fnv1a(t.data(), 3 * sizeof(int), h);
  return h;
}

TriMesh TriMesh::transformed(const Eigen::Matrix3d& rotation, const Vec3& translation) const {
  std::vector<Vec3> v(vertices_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = rotation * vertices_[i] + translation;
  return TriMesh(std::move(v), triangles_);
}

TriMesh sphere_mesh(int level, double radius, const Vec3& center) {
  if (level < 0 || level > 7) throw DomainError("sphere_mesh: level must lie in [0, 7]");
  if (!(radius > 0.0)) throw DomainError("sphere_mesh: radius must be positive");
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
                         {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int idx = static_cast<int>(v.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * f.size());
    for (const auto& t : f) {
      const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (Vec3& p : v) p = center + radius * p;
  return TriMesh(std::move(v), std::move(f));
}

TriMesh ellipsoid_mesh(int level, const Vec3& semi_axes, const Eigen::Matrix3d& rotation, const Vec3& center) {
  if (!(semi_axes.minCoeff() > 0.0)) throw DomainError("ellipsoid_mesh: semi-axes must be positive");
  const TriMesh unit = sphere_mesh(level, 1.0);
  std::vector<Vec3> v = unit.vertices();
  for (Vec3& p : v) p = center + rotation * semi_axes.cwiseProduct(p);
  return TriMesh(std::move(v), unit.triangles());
}

TriMesh merge_meshes(const std::vector<TriMesh>& parts) {
  std::vector<Vec3> v;
  std::vector<std::array<int, 3>> f;
  for (const TriMesh& m : parts) {
    const int off = static_cast<int>(v.size());
    v.insert(v.end(), m.vertices().begin(), m.vertices().end());
    for (auto t : m.triangles()) f.push_back({t[0] + off, t[1] + off, t[2] + off});
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file '" + path + "'");
  std::vector<std::pair<int, std::string>> lines;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.emplace_back(lineno, line);
  }
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> void {
    const int at = pos < lines.size() ? lines[pos].first : lineno;
    throw GeometryError(path + ":" + std::to_string(at) + ": " + what);
  };
  auto next_count = [&](const char* what) {
    if (pos >= lines.size()) fail(std::string("missing ") + what + " count");
    std::istringstream s(lines[pos].second);
    long long n = -1;
    std::string extra;
    if (!(s >> n) || n < 0 || (s >> extra)) fail(std::string("bad ") + what + " count");
    ++pos;
    return static_cast<std::size_t>(n);
  };
  const std::size_t nv = next_count("vertex");
  std::vector<Vec3> v(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (pos >= lines.size()) fail("expected " + std::to_string(nv) + " vertices");
    std::istringstream s(lines[pos].second);
    std::string extra;
    if (!(s >> v[i].x() >> v[i].y() >> v[i].z()) || (s >> extra)) fail("expected 'x y z'");
    ++pos;
  }
  const std::size_t nt = next_count("triangle");
  std::vector<std::array<int, 3>> f(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    if (pos >= lines.size()) fail("expected " + std::to_string(nt) + " triangles");
    std::istringstream s(lines[pos].second);
    std::string extra;
    if (!(s >> f[i][0] >> f[i][1] >> f[i][2]) || (s >> extra)) fail("expected 'i j k'");
    ++pos;
  }
  if (pos != lines.size()) fail("trailing content");
  return TriMesh(std::move(v), std::move(f));
}

void write_mesh(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file '" + path + "'");
  out << std::setprecision(17);
  out << mesh.vertices().size() << "\n";
  for (const Vec3& p : mesh.vertices()) out << p.x() << " " << p.y() << " " << p.z() << "\n";
  out << mesh.size() << "\n";
  for (const auto& t : mesh.triangles()) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  if (!out) throw IoError("failed writing mesh file '" + path + "'");
}

}  // namespace fmps
