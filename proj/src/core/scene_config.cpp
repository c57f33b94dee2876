#include "core/scene_config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "core/scatmat_io.hpp"

namespace fmps {

namespace {

std::string join_issues(const std::string& path, const std::vector<ConfigIssue>& issues) {
  std::ostringstream s;
  s << path << ": " << issues.size() << " problem(s)";
  for (const ConfigIssue& i : issues) {
    s << "\n  " << path << ":" << i.line << ": " << (i.field.empty() ? "" : i.field + ": ") << i.message << " ["
      << i.code << "]";
  }
  return s.str();
}

ErrorCode issues_code(const std::vector<ConfigIssue>& issues) {
  for (const ConfigIssue& i : issues) {
    if (i.code != "io") return ErrorCode::Validation;
  }
  return issues.empty() ? ErrorCode::Validation : ErrorCode::Io;
}

class Parser {
 public:
  Parser(const std::string& path, const std::string& dir) : path_(path), dir_(dir) {}

  SceneConfig run(const YAML::Node& root);
  std::vector<ConfigIssue> issues;

 private:
  void issue(const std::string& code, const YAML::Node& at, const std::string& field, const std::string& msg) {
    const int line = at.IsDefined() && at.Mark().line >= 0 ? at.Mark().line + 1 : 0;
    issues.push_back({code, line, field, msg});
  }

  void check_keys(const YAML::Node& map, const std::string& field, const std::set<std::string>& allowed) {
    for (const auto& kv : map) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) issue("unknown-key", kv.first, field.empty() ? key : field + "." + key, "unknown key");
    }
  }

  bool require_map(const YAML::Node& n, const std::string& field) {
    if (n.IsMap()) return true;
    issue("type", n, field, "expected a mapping");
    return false;
  }

  std::optional<double> number(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) {
      issue("type", n, field, "expected a number");
      return std::nullopt;
    }
    const std::string text = n.Scalar();
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || !std::isfinite(v)) {
      issue("type", n, field, "expected a number, got '" + text + "'");
      return std::nullopt;
    }
    return v;
  }

  // A number, or "<number> <unit>" where the unit must be the declared one.
  std::optional<double> quantity(const YAML::Node& n, const std::string& field, const std::string& unit) {
    if (!n.IsScalar()) {
      issue("type", n, field, "expected a number");
      return std::nullopt;
    }
    std::istringstream s(n.Scalar());
    std::string num, u, extra;
    s >> num >> u >> extra;
    if (u.empty()) return number(n, field);
    char* end = nullptr;
    const double v = std::strtod(num.c_str(), &end);
    if (*end != '\0' || !extra.empty() || !std::isfinite(v)) {
      issue("type", n, field, "expected '<number> <unit>', got '" + n.Scalar() + "'");
      return std::nullopt;
    }
    if (u != unit) {
      issue("unit-mismatch", n, field, "unit '" + u + "' differs from the declared '" + unit + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> length(const YAML::Node& n, const std::string& field) { return quantity(n, field, unit_); }
  std::optional<double> inverse_length(const YAML::Node& n, const std::string& field) {
    return quantity(n, field, "1/" + unit_);
  }

  std::optional<cplx> complex(const YAML::Node& n, const std::string& field) {
    if (n.IsSequence()) {
      if (n.size() != 2) {
        issue("type", n, field, "complex values are a number or [re, im]");
        return std::nullopt;
      }
      const auto re = number(n[0], field), im = number(n[1], field);
      if (!re || !im) return std::nullopt;
      return cplx(*re, *im);
    }
    const auto v = number(n, field);
    if (!v) return std::nullopt;
    return cplx(*v, 0.0);
  }

  std::optional<Vec3> point(const YAML::Node& n, const std::string& field, bool is_length) {
    if (!n.IsSequence() || n.size() != 3) {
      issue("type", n, field, "expected a list of 3 numbers");
      return std::nullopt;
    }
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
      const auto c = is_length ? length(n[i], field) : number(n[i], field);
      if (!c) return std::nullopt;
      v[i] = *c;
    }
    return v;
  }

  void parse_materials(const YAML::Node& n, SceneConfig& c);
  void parse_incident(const YAML::Node& n, SceneConfig& c);
  void parse_frequency(const YAML::Node& n, SceneConfig& c);
  void parse_solver(const YAML::Node& n, SceneConfig& c);
  void parse_inclusions(const YAML::Node& n, SceneConfig& c);
  void parse_sites(const YAML::Node& n, SceneConfig& c);
  void parse_outputs(const YAML::Node& n, SceneConfig& c);
  void cross_checks(SceneConfig& c, const YAML::Node& root);

  std::string path_, dir_;
  std::string unit_ = "1";
  std::map<std::string, YAML::Node> material_nodes_, inclusion_nodes_;
};

void Parser::parse_materials(const YAML::Node& n, SceneConfig& c) {
  if (!require_map(n, "materials")) return;
  for (const auto& kv : n) {
    const std::string name = kv.first.as<std::string>();
    const std::string field = "materials." + name;
    const YAML::Node& m = kv.second;
    material_nodes_[name] = m;
    if (name == "vacuum") {
      issue("range", kv.first, field, "'vacuum' is predefined");
      continue;
    }
    if (!require_map(m, field)) continue;
    check_keys(m, field, {"eps", "mu", "table"});
    MaterialSpec spec;
    if (m["table"]) {
      if (m["eps"] || m["mu"]) issue("type", m, field, "give either a table or eps/mu, not both");
      spec.table = m["table"].as<std::string>();
      const std::string resolved = (std::filesystem::path(dir_) / spec.table).string();
      try {
        spec.loaded = std::make_shared<const MaterialTable>(read_material_table(resolved));
      } catch (const IoError& e) {
        issue("io", m["table"], field + ".table", e.what());
      } catch (const Error& e) {
        issue("range", m["table"], field + ".table", e.what());
      }
    } else {
      if (m["eps"]) {
        if (auto v = complex(m["eps"], field + ".eps")) spec.eps = *v;
      } else {
        issue("missing", m, field, "needs eps or table");
      }
      if (m["mu"]) {
        if (auto v = complex(m["mu"], field + ".mu")) spec.mu = *v;
      }
      if (spec.eps.imag() < 0.0 || spec.mu.imag() < 0.0) issue("range", m, field, "Im eps and Im mu must be >= 0");
    }
    c.materials[name] = spec;
  }
}

void Parser::parse_incident(const YAML::Node& n, SceneConfig& c) {
  if (!require_map(n, "incident")) return;
  check_keys(n, "incident", {"direction", "polarization"});
  if (n["direction"]) {
    if (auto d = point(n["direction"], "incident.direction", false)) {
      if (d->norm() == 0.0) {
        issue("range", n["direction"], "incident.direction", "direction must be nonzero");
      } else {
        // Leave unit vectors untouched so a written config re-parses to the same bits.
        c.direction = std::abs(d->norm() - 1.0) <= 1e-15 ? *d : d->normalized();
      }
    }
  }
  if (n["polarization"]) {
    const YAML::Node& p = n["polarization"];
    if (!p.IsSequence() || p.size() != 3) {
      issue("type", p, "incident.polarization", "expected 3 entries, each a number or [re, im]");
    } else {
      CVec3 e;
      bool ok = true;
      for (int i = 0; i < 3; ++i) {
        const auto v = complex(p[i], "incident.polarization");
        ok = ok && v.has_value();
        if (v) e[i] = *v;
      }
      if (ok) c.polarization = e;
    }
  }
  if (std::abs(dotu(c.direction.cast<cplx>(), c.polarization)) > 1e-12 * std::max(1.0, c.polarization.norm())) {
    issue("range", n, "incident.polarization", "polarization must be transverse to the direction");
  }
  if (c.polarization.norm() == 0.0) issue("range", n, "incident.polarization", "polarization must be nonzero");
}

void Parser::parse_frequency(const YAML::Node& n, SceneConfig& c) {
  if (!require_map(n, "frequency")) return;
  check_keys(n, "frequency", {"omega", "wavelength"});
  const bool has_w = static_cast<bool>(n["omega"]), has_l = static_cast<bool>(n["wavelength"]);
  if (has_w == has_l) {
    issue("missing", n, "frequency", "give exactly one of omega or wavelength");
    return;
  }
  FrequencySpec& f = c.frequency;
  f.variable = has_w ? FrequencySpec::Variable::Omega : FrequencySpec::Variable::Wavelength;
  const std::string field = has_w ? "frequency.omega" : "frequency.wavelength";
  const YAML::Node& v = has_w ? n["omega"] : n["wavelength"];
  auto value = [&](const YAML::Node& x) { return has_w ? inverse_length(x, field) : length(x, field); };
  if (v.IsMap()) {
    check_keys(v, field, {"start", "stop", "count"});
    if (!v["start"] || !v["stop"] || !v["count"]) {
      issue("missing", v, field, "a range needs start, stop and count");
      return;
    }
    const auto a = value(v["start"]), b = value(v["stop"]);
    const auto cnt = number(v["count"], field + ".count");
    if (!a || !b || !cnt) return;
    if (*cnt < 1 || *cnt != std::floor(*cnt)) {
      issue("range", v["count"], field + ".count", "count must be a positive integer");
      return;
    }
    f.start = *a;
    f.stop = *b;
    f.count = static_cast<int>(*cnt);
    if (f.count == 1 && f.start != f.stop) issue("range", v, field, "a single-point range needs start == stop");
  } else if (v.IsSequence()) {
    for (const auto& x : v) {
      if (auto y = value(x)) f.values.push_back(*y);
    }
    if (f.values.empty()) issue("range", v, field, "empty frequency list");
  } else {
    if (auto y = value(v)) f.values.push_back(*y);
  }
  for (double w : f.omegas()) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      issue("range", v, field, "frequencies and wavelengths must be positive");
      break;
    }
  }
}

void Parser::parse_solver(const YAML::Node& n, SceneConfig& c) {
  if (!require_map(n, "solver")) return;
  check_keys(n, "solver", {"tol", "restart", "maxiter"});
  if (n["tol"]) {
    if (auto v = number(n["tol"], "solver.tol")) {
      if (!(*v > 0.0 && *v < 1.0)) issue("range", n["tol"], "solver.tol", "tol must lie in (0, 1)");
      c.solver.tol = *v;
    }
  }
  if (n["restart"]) {
    if (auto v = number(n["restart"], "solver.restart")) {
      if (*v < 10 || *v != std::floor(*v)) issue("range", n["restart"], "solver.restart", "restart must be an integer >= 10");
      c.solver.restart = static_cast<int>(*v);
    }
  }
  if (n["maxiter"]) {
    if (auto v = number(n["maxiter"], "solver.maxiter")) {
      if (*v < 1 || *v != std::floor(*v)) issue("range", n["maxiter"], "solver.maxiter", "maxiter must be a positive integer");
      c.solver.maxiter = static_cast<int>(*v);
    }
  }
}

void Parser::parse_inclusions(const YAML::Node& n, SceneConfig& c) {
  if (!require_map(n, "inclusions")) return;
  for (const auto& kv : n) {
    const std::string name = kv.first.as<std::string>();
    const std::string field = "inclusions." + name;
    const YAML::Node& m = kv.second;
    inclusion_nodes_[name] = m;
    if (!require_map(m, field)) continue;
    check_keys(m, field, {"mesh", "center", "radius", "material", "rotation"});
    InclusionSpec spec;
    for (const char* key : {"mesh", "radius", "material"}) {
      if (!m[key]) issue("missing", m, field + "." + key, "required");
    }
    if (m["center"]) {
      if (auto v = point(m["center"], field + ".center", true)) spec.center = *v;
    }
    if (m["radius"]) {
      if (auto v = length(m["radius"], field + ".radius")) {
        if (!(*v > 0.0)) issue("range", m["radius"], field + ".radius", "radius must be positive");
        spec.radius = *v;
      }
    }
    if (m["material"]) spec.material = m["material"].as<std::string>();
    if (m["rotation"]) {
      const YAML::Node& r = m["rotation"];
      if (require_map(r, field + ".rotation")) {
        check_keys(r, field + ".rotation", {"axis", "degrees"});
        if (r["axis"]) {
          if (auto v = point(r["axis"], field + ".rotation.axis", false)) {
            if (v->norm() == 0.0) {
              issue("range", r["axis"], field + ".rotation.axis", "axis must be nonzero");
            } else {
              spec.rotation_axis = std::abs(v->norm() - 1.0) <= 1e-15 ? *v : v->normalized();
            }
          }
        }
        if (r["degrees"]) {
          if (auto v = number(r["degrees"], field + ".rotation.degrees")) spec.rotation_deg = *v;
        }
      }
    }
    if (m["mesh"]) {
      spec.mesh = m["mesh"].as<std::string>();
      try {
        const TriMesh raw = read_mesh((std::filesystem::path(dir_) / spec.mesh).string());
        const Eigen::Matrix3d rot = spec.rotation();
        const TriMesh placed = raw.transformed(rot, spec.center - rot * spec.center);
        spec.loaded = std::make_shared<const TriMesh>(placed);
        if (spec.radius > 0.0 && !(placed.extent_from(spec.center) <= spec.radius * (1.0 - 1e-6))) {
          issue("geometry", m, field, "mesh reaches outside the enclosing sphere");
        }
      } catch (const IoError& e) {
        issue("io", m["mesh"], field + ".mesh", e.what());
      } catch (const Error& e) {
        issue("geometry", m["mesh"], field + ".mesh", e.what());
      }
    }
    c.inclusions[name] = spec;
  }
}

void Parser::parse_sites(const YAML::Node& n, SceneConfig& c) {
  if (!n.IsSequence()) {
    issue("type", n, "sites", "expected a list");
    return;
  }
  for (std::size_t i = 0; i < n.size(); ++i) {
    const YAML::Node& s = n[i];
    const std::string field = "sites[" + std::to_string(i) + "]";
    if (!require_map(s, field)) continue;
    check_keys(s, field, {"center", "radius", "model", "material", "inclusion", "scatmat"});
    SiteSpec site;
    site.line = s.Mark().line + 1;
    if (s["center"]) {
      if (auto v = point(s["center"], field + ".center", true)) site.center = *v;
    } else {
      issue("missing", s, field + ".center", "required");
    }
    const int kinds = (s["model"] ? 1 : 0) + (s["material"] ? 1 : 0) + (s["inclusion"] ? 1 : 0) + (s["scatmat"] ? 1 : 0);
    if (kinds != 1) {
      issue("missing", s, field, "give exactly one of model: pec, material, inclusion or scatmat");
    } else if (s["model"]) {
      if (s["model"].as<std::string>() != "pec") issue("range", s["model"], field + ".model", "the only model is 'pec'");
      site.kind = SiteSpec::Kind::Pec;
    } else if (s["material"]) {
      site.kind = SiteSpec::Kind::Dielectric;
      site.ref = s["material"].as<std::string>();
    } else if (s["inclusion"]) {
      site.kind = SiteSpec::Kind::Inclusion;
      site.ref = s["inclusion"].as<std::string>();
    } else {
      site.kind = SiteSpec::Kind::Scatmat;
      site.ref = s["scatmat"].as<std::string>();
      try {
        site.loaded = std::make_shared<const ScatteringMatrix>(
            load_scatmat((std::filesystem::path(dir_) / site.ref).string()));
        site.radius = site.loaded->radius();
      } catch (const IoError& e) {
        issue("io", s["scatmat"], field + ".scatmat", e.what());
      }
    }
    if (site.kind == SiteSpec::Kind::Inclusion || site.kind == SiteSpec::Kind::Scatmat) {
      if (s["radius"]) issue("range", s["radius"], field + ".radius", "this site kind takes its radius from the matrix");
    } else if (s["radius"]) {
      if (auto v = length(s["radius"], field + ".radius")) {
        if (!(*v > 0.0)) issue("range", s["radius"], field + ".radius", "radius must be positive");
        site.radius = *v;
      }
    } else if (kinds == 1) {
      issue("missing", s, field + ".radius", "required");
    }
    c.sites.push_back(site);
  }
}

void Parser::parse_outputs(const YAML::Node& n, SceneConfig& c) {
  if (!require_map(n, "outputs")) return;
  check_keys(n, "outputs", {"cross_sections", "polarization", "planes", "probes"});
  for (const char* key : {"cross_sections", "polarization"}) {
    if (!n[key]) continue;
    try {
      (std::string(key) == "cross_sections" ? c.outputs.cross_sections : c.outputs.polarization) = n[key].as<bool>();
    } catch (const YAML::Exception&) {
      issue("type", n[key], std::string("outputs.") + key, "expected true or false");
    }
  }
  if (n["planes"]) {
    const YAML::Node& ps = n["planes"];
    if (!ps.IsSequence()) {
      issue("type", ps, "outputs.planes", "expected a list");
    } else {
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const YAML::Node& p = ps[i];
        const std::string field = "outputs.planes[" + std::to_string(i) + "]";
        if (!require_map(p, field)) continue;
        check_keys(p, field, {"axis", "offset", "u", "v", "samples"});
        PlaneSpec spec;
        bool ok = true;
        if (p["axis"]) {
          const std::string a = p["axis"].as<std::string>();
          if (a == "x" || a == "y" || a == "z") {
            spec.axis = a[0] - 'x';
          } else {
            issue("range", p["axis"], field + ".axis", "axis must be x, y or z");
            ok = false;
          }
        }
        if (p["offset"]) {
          if (auto v = length(p["offset"], field + ".offset")) spec.offset = *v;
        }
        for (const char* key : {"u", "v", "samples"}) {
          const YAML::Node& r = p[key];
          if (!r) {
            issue("missing", p, field + "." + key, "required");
            ok = false;
            continue;
          }
          if (!r.IsSequence() || r.size() != 2) {
            issue("type", r, field + "." + key, "expected two entries");
            ok = false;
            continue;
          }
          const std::string k = key;
          if (k == "samples") {
            const auto a = number(r[0], field + ".samples"), b = number(r[1], field + ".samples");
            if (!a || !b || *a < 1 || *b < 1 || *a != std::floor(*a) || *b != std::floor(*b)) {
              issue("range", r, field + ".samples", "sample counts must be positive integers");
              ok = false;
            } else {
              spec.nu = static_cast<int>(*a);
              spec.nv = static_cast<int>(*b);
            }
          } else {
            const auto a = length(r[0], field + "." + k), b = length(r[1], field + "." + k);
            if (!a || !b) {
              ok = false;
            } else if (k == "u") {
              spec.u0 = *a;
              spec.u1 = *b;
            } else {
              spec.v0 = *a;
              spec.v1 = *b;
            }
          }
        }
        if (ok) c.outputs.planes.push_back(spec);
      }
    }
  }
  if (n["probes"]) {
    const YAML::Node& ps = n["probes"];
    if (!ps.IsSequence()) {
      issue("type", ps, "outputs.probes", "expected a list of points");
    } else {
      for (std::size_t i = 0; i < ps.size(); ++i) {
        if (auto v = point(ps[i], "outputs.probes[" + std::to_string(i) + "]", true)) c.outputs.probes.push_back(*v);
      }
    }
  }
}

void Parser::cross_checks(SceneConfig& c, const YAML::Node& root) {
  const std::vector<double> omegas = c.frequency.omegas();
  auto check_material = [&](const std::string& name, const YAML::Node& at, const std::string& field) {
    if (name == "vacuum") return;
    const auto it = c.materials.find(name);
    if (it == c.materials.end()) {
      issue("reference", at, field, "unknown material '" + name + "'");
      return;
    }
    const MaterialSpec& m = it->second;
    if (!m.loaded) return;
    for (double w : omegas) {
      if (w < m.loaded->omega_min() || w > m.loaded->omega_max()) {
        std::ostringstream s;
        s << "omega " << w << " outside the table range of '" << name << "' [" << m.loaded->omega_min() << ", "
          << m.loaded->omega_max() << "]";
        issue("range", at, field, s.str());
        break;
      }
    }
  };

  check_material(c.exterior, root["exterior"], "exterior");
  if (c.materials.count(c.exterior)) {
    const MaterialSpec& m = c.materials.at(c.exterior);
    if (!m.loaded && (m.eps.imag() != 0.0 || m.mu.imag() != 0.0)) {
      issue("range", root["exterior"], "exterior", "the exterior medium must be lossless");
    }
  }
  for (auto& [name, inc] : c.inclusions) {
    if (!inc.material.empty()) check_material(inc.material, inclusion_nodes_[name]["material"], "inclusions." + name + ".material");
  }
  const YAML::Node sites = root["sites"];
  for (std::size_t i = 0; i < c.sites.size(); ++i) {
    SiteSpec& s = c.sites[i];
    const std::string field = "sites[" + std::to_string(i) + "]";
    const YAML::Node at = sites && sites.IsSequence() ? sites[i] : root;
    if (s.kind == SiteSpec::Kind::Dielectric) check_material(s.ref, at["material"], field + ".material");
    if (s.kind == SiteSpec::Kind::Inclusion) {
      const auto it = c.inclusions.find(s.ref);
      if (it == c.inclusions.end()) {
        issue("reference", at["inclusion"], field + ".inclusion", "unknown inclusion '" + s.ref + "'");
      } else {
        s.radius = it->second.radius;
      }
    }
    if (s.kind == SiteSpec::Kind::Scatmat && s.loaded) {
      for (double w : omegas) {
        if (w != s.loaded->exterior().omega()) {
          std::ostringstream msg;
          msg << "cached matrix is for omega " << s.loaded->exterior().omega() << ", scene needs " << w;
          issue("range", at["scatmat"], field + ".scatmat", msg.str());
          break;
        }
      }
    }
  }
  for (std::size_t i = 0; i < c.sites.size(); ++i) {
    for (std::size_t j = i + 1; j < c.sites.size(); ++j) {
      const SiteSpec &a = c.sites[i], &b = c.sites[j];
      if (!(a.radius > 0.0 && b.radius > 0.0)) continue;
      const double dist = (a.center - b.center).norm();
      const double need = c.eta * (a.radius + b.radius);
      if (!(dist > need)) {
        std::ostringstream s;
        s << "sites " << i << " and " << j << " overlap: distance " << dist << ", need > " << need << " (eta "
          << c.eta << ")";
        issues.push_back({"overlap", b.line, "sites[" + std::to_string(j) + "]", s.str()});
      }
    }
  }
}

SceneConfig Parser::run(const YAML::Node& root) {
  SceneConfig c;
  c.path = path_;
  if (!root.IsMap()) {
    issue("type", root, "", "top level must be a mapping");
    return c;
  }
  check_keys(root, "", {"units", "exterior", "materials", "incident", "frequency", "p", "eta", "solver", "cache_dir",
                        "inclusions", "sites", "outputs"});
  if (root["units"]) {
    unit_ = root["units"].as<std::string>();
    if (unit_.empty() || unit_.find(' ') != std::string::npos) issue("range", root["units"], "units", "bad unit label");
    c.length_unit = unit_;
  }
  if (root["materials"]) parse_materials(root["materials"], c);
  if (root["exterior"]) c.exterior = root["exterior"].as<std::string>();
  if (root["incident"]) parse_incident(root["incident"], c);
  if (root["frequency"]) {
    parse_frequency(root["frequency"], c);
  } else {
    issue("missing", root, "frequency", "required");
  }
  if (root["p"]) {
    if (auto v = number(root["p"], "p")) {
      if (*v < 1 || *v > 60 || *v != std::floor(*v)) issue("range", root["p"], "p", "p must be an integer in [1, 60]");
      c.p = static_cast<int>(*v);
    }
  }
  if (root["eta"]) {
    if (auto v = number(root["eta"], "eta")) {
      if (!(*v >= 1.0)) issue("range", root["eta"], "eta", "eta must be >= 1");
      c.eta = *v;
    }
  }
  if (root["solver"]) parse_solver(root["solver"], c);
  if (root["cache_dir"]) c.cache_dir = root["cache_dir"].as<std::string>();
  if (root["inclusions"]) parse_inclusions(root["inclusions"], c);
  if (root["sites"]) {
    parse_sites(root["sites"], c);
  } else {
    issue("missing", root, "sites", "required (may be an empty list)");
  }
  if (root["outputs"]) parse_outputs(root["outputs"], c);
  cross_checks(c, root);
  return c;
}

SceneConfig parse_yaml(const std::string& text, const std::string& path, const std::string& dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path, {{"syntax", e.mark.line + 1, "", e.msg}});
  }
  Parser parser(path, dir);
  SceneConfig c;
  try {
    c = parser.run(root);
  } catch (const YAML::Exception& e) {
    parser.issues.push_back({"type", e.mark.line + 1, "", e.msg});
  }
  if (!parser.issues.empty()) throw ConfigError(path, parser.issues);
  return c;
}

void emit_complex(YAML::Emitter& out, cplx v) {
  if (v.imag() == 0.0) {
    out << v.real();
  } else {
    out << YAML::Flow << YAML::BeginSeq << v.real() << v.imag() << YAML::EndSeq;
  }
}

void emit_vec(YAML::Emitter& out, const Vec3& v) {
  out << YAML::Flow << YAML::BeginSeq << v.x() << v.y() << v.z() << YAML::EndSeq;
}

}  // namespace

ConfigError::ConfigError(const std::string& path, std::vector<ConfigIssue> issues)
    : Error(issues_code(issues), join_issues(path, issues)), issues_(std::move(issues)) {}

std::pair<cplx, cplx> MaterialSpec::at(double omega) const {
  if (loaded) return interpolate_material(*loaded, omega);
  return {eps, mu};
}

Eigen::Matrix3d InclusionSpec::rotation() const {
  return Eigen::AngleAxisd(rotation_deg * kPi / 180.0, rotation_axis.normalized()).toRotationMatrix();
}

std::vector<double> FrequencySpec::omegas() const {
  std::vector<double> raw = values;
  if (raw.empty() && count > 0) {
    for (int i = 0; i < count; ++i) raw.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  }
  if (variable == Variable::Wavelength) {
    for (double& v : raw) v = 2.0 * kPi / v;
  }
  return raw;
}

std::string SceneConfig::resolve(const std::string& relative) const {
  const std::filesystem::path p(relative);
  if (p.is_absolute()) return relative;
  return (std::filesystem::path(path).parent_path() / p).string();
}

const MaterialSpec& SceneConfig::material(const std::string& name) const {
  static const MaterialSpec vacuum;
  if (name == "vacuum") return vacuum;
  const auto it = materials.find(name);
  if (it == materials.end()) throw DomainError("unknown material '" + name + "'");
  return it->second;
}

Medium SceneConfig::exterior_at(double omega) const {
  const auto [eps, mu] = material(exterior).at(omega);
  return Medium(eps, mu, omega);
}

SceneConfig parse_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_yaml(buf.str(), path, std::filesystem::path(path).parent_path().string());
}

SceneConfig parse_scene_text(const std::string& text, const std::string& path) {
  return parse_yaml(text, path, std::filesystem::path(path).parent_path().string());
}

std::string write_scene_text(const SceneConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "units" << YAML::Value << c.length_unit;
  out << YAML::Key << "exterior" << YAML::Value << c.exterior;
  if (!c.materials.empty()) {
    out << YAML::Key << "materials" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, m] : c.materials) {
      out << YAML::Key << name << YAML::Value << YAML::Flow << YAML::BeginMap;
      if (!m.table.empty()) {
        out << YAML::Key << "table" << YAML::Value << m.table;
      } else {
        out << YAML::Key << "eps" << YAML::Value;
        emit_complex(out, m.eps);
        out << YAML::Key << "mu" << YAML::Value;
        emit_complex(out, m.mu);
      }
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  out << YAML::Key << "incident" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "direction" << YAML::Value;
  emit_vec(out, c.direction);
  out << YAML::Key << "polarization" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (int i = 0; i < 3; ++i) emit_complex(out, c.polarization[i]);
  out << YAML::EndSeq << YAML::EndMap;

  const FrequencySpec& f = c.frequency;
  out << YAML::Key << "frequency" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << (f.variable == FrequencySpec::Variable::Omega ? "omega" : "wavelength") << YAML::Value;
  if (f.values.empty()) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "start" << YAML::Value << f.start << YAML::Key << "stop"
        << YAML::Value << f.stop << YAML::Key << "count" << YAML::Value << f.count << YAML::EndMap;
  } else {
    out << YAML::Flow << YAML::BeginSeq;
    for (double v : f.values) out << v;
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  out << YAML::Key << "p" << YAML::Value << c.p;
  out << YAML::Key << "eta" << YAML::Value << c.eta;
  out << YAML::Key << "solver" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "tol" << YAML::Value
      << c.solver.tol << YAML::Key << "restart" << YAML::Value << c.solver.restart << YAML::Key << "maxiter"
      << YAML::Value << c.solver.maxiter << YAML::EndMap;
  if (!c.cache_dir.empty()) out << YAML::Key << "cache_dir" << YAML::Value << c.cache_dir;

  if (!c.inclusions.empty()) {
    out << YAML::Key << "inclusions" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, inc] : c.inclusions) {
      out << YAML::Key << name << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "mesh" << YAML::Value << inc.mesh;
      out << YAML::Key << "center" << YAML::Value;
      emit_vec(out, inc.center);
      out << YAML::Key << "radius" << YAML::Value << inc.radius;
      out << YAML::Key << "material" << YAML::Value << inc.material;
      if (inc.rotation_deg != 0.0) {
        out << YAML::Key << "rotation" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "axis"
            << YAML::Value;
        emit_vec(out, inc.rotation_axis);
        out << YAML::Key << "degrees" << YAML::Value << inc.rotation_deg << YAML::EndMap;
      }
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }

  out << YAML::Key << "sites" << YAML::Value << YAML::BeginSeq;
  for (const SiteSpec& s : c.sites) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "center" << YAML::Value;
    emit_vec(out, s.center);
    switch (s.kind) {
      case SiteSpec::Kind::Pec:
        out << YAML::Key << "radius" << YAML::Value << s.radius << YAML::Key << "model" << YAML::Value << "pec";
        break;
      case SiteSpec::Kind::Dielectric:
        out << YAML::Key << "radius" << YAML::Value << s.radius << YAML::Key << "material" << YAML::Value << s.ref;
        break;
      case SiteSpec::Kind::Inclusion:
        out << YAML::Key << "inclusion" << YAML::Value << s.ref;
        break;
      case SiteSpec::Kind::Scatmat:
        out << YAML::Key << "scatmat" << YAML::Value << s.ref;
        break;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const OutputSpec& o = c.outputs;
  out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "cross_sections" << YAML::Value << o.cross_sections;
  out << YAML::Key << "polarization" << YAML::Value << o.polarization;
  if (!o.planes.empty()) {
    out << YAML::Key << "planes" << YAML::Value << YAML::BeginSeq;
    for (const PlaneSpec& p : o.planes) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "axis" << YAML::Value << std::string(1, static_cast<char>('x' + p.axis));
      out << YAML::Key << "offset" << YAML::Value << p.offset;
      out << YAML::Key << "u" << YAML::Value << YAML::Flow << YAML::BeginSeq << p.u0 << p.u1 << YAML::EndSeq;
      out << YAML::Key << "v" << YAML::Value << YAML::Flow << YAML::BeginSeq << p.v0 << p.v1 << YAML::EndSeq;
      out << YAML::Key << "samples" << YAML::Value << YAML::Flow << YAML::BeginSeq << p.nu << p.nv << YAML::EndSeq;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  if (!o.probes.empty()) {
    out << YAML::Key << "probes" << YAML::Value << YAML::BeginSeq;
    for (const Vec3& v : o.probes) emit_vec(out, v);
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

Scene build_scene(const SceneConfig& c, double omega) {
  Scene s;
  s.exterior = c.exterior_at(omega);
  s.incident.direction = c.direction;
  s.incident.polarization = c.polarization;
  s.p = c.p;
  s.eta = c.eta;
  for (const SiteSpec& site : c.sites) {
    SphereSite out;
    out.center = site.center;
    out.radius = site.radius;
    switch (site.kind) {
      case SiteSpec::Kind::Pec:
        out.model = PecModel{};
        break;
      case SiteSpec::Kind::Dielectric: {
        const auto [eps, mu] = c.material(site.ref).at(omega);
        out.model = DielectricModel{Medium(eps, mu, omega)};
        break;
      }
      case SiteSpec::Kind::Inclusion:
        out.model = CachedModel{site.ref};
        break;
      case SiteSpec::Kind::Scatmat: {
        const std::string key = "file:" + site.ref;
        try {
          require_scatmat_match(*site.loaded, s.exterior, site.loaded->radius(), c.p,
                                site.loaded->mesh_fingerprint());
        } catch (const DomainError& e) {
          throw Error(ErrorCode::Validation, "scatmat '" + site.ref + "': " + e.what());
        }
        s.matrices[key] = site.loaded;
        out.model = CachedModel{key};
        break;
      }
    }
    s.sites.push_back(out);
  }
  return s;
}

}  // namespace fmps
