#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "core/material.hpp"
#include "core/scan.hpp"
#include "core/scatmat_io.hpp"
#include "core/scene_config.hpp"

using namespace fmps;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("fmps_cfg_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<ConfigIssue> issues_of(const std::string& text, const std::string& path = "<string>") {
  try {
    parse_scene_text(text, path);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool has_issue(const std::vector<ConfigIssue>& v, const std::string& code, const std::string& needle = "") {
  for (const auto& i : v) {
    if (i.code == code && (needle.empty() || (i.message + i.field).find(needle) != std::string::npos)) return true;
  }
  return false;
}

// Smooth synthetic dispersion used to check interpolation order.
std::pair<cplx, cplx> synthetic(double w) {
  return {cplx(2.0 + std::sin(w), 0.5 + 0.3 * std::cos(2.0 * w)), cplx(1.0 + 0.1 * w * w, 0.05 * std::exp(-w))};
}

MaterialTable synthetic_table(double a, double b, int n) {
  std::vector<MaterialRow> rows;
  for (int i = 0; i < n; ++i) {
    const double w = a + (b - a) * i / (n - 1);
    const auto [e, m] = synthetic(w);
    rows.push_back({w, e, m});
  }
  return MaterialTable(rows);
}

const char* kMinimal = R"(
frequency: {omega: 1.0}
sites:
  - {center: [0, 0, 0], radius: 1, model: pec}
)";

const char* kPair = R"(
units: um
materials:
  glass: {eps: 2.25}
incident: {direction: [0, 0, 1], polarization: [1, 0, 0]}
frequency:
  omega: {start: 0.8, stop: 1.2, count: 5}
p: 4
sites:
  - {center: [-1.6, 0, 0], radius: 1, material: glass}
  - {center: [1.6, 0, 0], radius: 1, material: glass}
outputs:
  cross_sections: true
  polarization: true
  planes: [{axis: z, offset: 0, u: [-4, 4], v: [-3, 3], samples: [9, 7]}]
  probes: [[0, 0, 5], [0, 0, 0], [-1.6, 0, 0.2]]
)";

}  // namespace

TEST_SUITE("material") {
  TEST_CASE("values at nodes are exact and midpoints are means") {
    const MaterialTable t({{1.0, {2.0, 0.1}, {1.0, 0.0}}, {2.0, {3.0, 0.5}, {1.5, 0.2}}, {4.0, {1.0, 0.0}, {1.0, 0.0}}});
    for (const auto& r : t.rows()) {
      const auto [e, m] = interpolate_material(t, r.omega);
      CHECK(e == r.eps);
      CHECK(m == r.mu);
    }
    const auto [e, m] = interpolate_material(t, 1.5);
    CHECK(std::abs(e - cplx(2.5, 0.3)) <= 1e-15);
    CHECK(std::abs(m - cplx(1.25, 0.1)) <= 1e-15);
  }

  TEST_CASE("interpolation error is second order in the node spacing") {
    double prev = 0.0;
    for (int level = 0; level < 4; ++level) {
      const int n = 11 * (1 << level) - (1 << level) + 1;
      const double h = 3.0 / (n - 1);
      const MaterialTable t = synthetic_table(0.5, 3.5, n);
      double err = 0.0;
      for (int i = 0; i <= 3000; ++i) {
        const double w = 0.5 + 3.0 * i / 3000.0;
        const auto [e, m] = interpolate_material(t, w);
        const auto [e0, m0] = synthetic(w);
        err = std::max({err, std::abs(e - e0), std::abs(m - m0)});
      }
      // |f''| <= 1.2 + 0.2 componentwise, and linear interpolation is off by at most h^2 |f''| / 8.
      CHECK(err <= 1.5 * h * h / 8.0 * 2.0);
      if (level > 0) {
        CHECK(prev / err > 3.5);
        CHECK(prev / err < 4.5);
      }
      prev = err;
    }
  }

  TEST_CASE("rejects out-of-range omega and bad tables") {
    const MaterialTable t = synthetic_table(1.0, 2.0, 3);
    CHECK_THROWS_AS(interpolate_material(t, 0.999), DomainError);
    CHECK_THROWS_AS(interpolate_material(t, 2.001), DomainError);
    CHECK_THROWS_AS(MaterialTable({{1.0, 1.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(MaterialTable({{1.0, 1.0, 1.0}, {1.0, 2.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(MaterialTable({{1.0, {1.0, -0.1}, 1.0}, {2.0, 2.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(MaterialTable({{1.0, 1.0, {1.0, -1e-3}}, {2.0, 2.0, 1.0}}), DomainError);
  }

  TEST_CASE("csv round trip and error locations") {
    const fs::path d = scratch("material");
    const MaterialTable t = synthetic_table(0.3, 2.7, 17);
    write_material_table(t, (d / "t.csv").string());
    const MaterialTable back = read_material_table((d / "t.csv").string());
    REQUIRE(back.rows().size() == t.rows().size());
    for (std::size_t i = 0; i < t.rows().size(); ++i) {
      CHECK(back.rows()[i].omega == t.rows()[i].omega);
      CHECK(back.rows()[i].eps == t.rows()[i].eps);
      CHECK(back.rows()[i].mu == t.rows()[i].mu);
    }
    write_text(d / "bad.csv", "omega,eps_re,eps_im,mu_re,mu_im\n# c\n1,2,0,1,0\n2,x,0,1,0\n");
    try {
      read_material_table((d / "bad.csv").string());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("bad.csv:4:") != std::string::npos);
    }
    CHECK_THROWS_AS(read_material_table((d / "missing.csv").string()), IoError);
  }
}

TEST_SUITE("scatmat_io") {
  TEST_CASE("cache round trip is bit exact") {
    const fs::path d = scratch("smat");
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const int p = 3;
    const int n = 2 * mode_count(p);
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = {g(rng) * 1e-3, g(rng) * 1e5};
    const Medium ext(cplx(1.7, 0.0), cplx(1.0, 0.0), 0.123456789);
    const ScatteringMatrix s = ScatteringMatrix::dense(p, m, ext, 0.987654321, 0xfedcba9876543210ull);
    cache_scatmat(s, (d / "s.smat").string());
    const ScatteringMatrix back = load_scatmat((d / "s.smat").string());
    CHECK((back.matrix() - m).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.order() == p);
    CHECK(back.omega() == ext.omega());
    CHECK(back.radius() == s.radius());
    CHECK(back.exterior().eps() == ext.eps());
    CHECK(back.mesh_fingerprint() == s.mesh_fingerprint());
    const ScatmatHeader h = read_scatmat_header((d / "s.smat").string());
    CHECK(h.p == p);
    CHECK(h.fingerprint == 0xfedcba9876543210ull);

    const ScatteringMatrix mie = mie_dielectric(1.0, ext, Medium(4.0, 1.0, ext.omega()), 4).scattering;
    cache_scatmat(mie, (d / "mie.smat").string());
    CHECK((load_scatmat((d / "mie.smat").string()).matrix() - mie.to_dense()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("mismatch and corruption are hard errors") {
    const fs::path d = scratch("smat_bad");
    const Medium ext(1.0, 1.0, 1.0);
    const ScatteringMatrix s = ScatteringMatrix::dense(2, Eigen::MatrixXcd::Identity(18, 18), ext, 1.0, 42);
    CHECK_NOTHROW(require_scatmat_match(s, ext, 1.0, 2, 42));
    try {
      require_scatmat_match(s, Medium(1.0, 1.0, 1.5), 1.1, 3, 43);
      FAIL("expected a mismatch");
    } catch (const DomainError& e) {
      const std::string w = e.what();
      for (const char* f : {"omega", "radius", "p", "fingerprint"}) CHECK(w.find(f) != std::string::npos);
    }
    cache_scatmat(s, (d / "s.smat").string());
    std::string bytes = read_text(d / "s.smat");
    write_text(d / "short.smat", bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(load_scatmat((d / "short.smat").string()), IoError);
    write_text(d / "long.smat", bytes + "x");
    CHECK_THROWS_AS(load_scatmat((d / "long.smat").string()), IoError);
    write_text(d / "hdr.smat", "fmps-scatmat 9\n");
    CHECK_THROWS_AS(load_scatmat((d / "hdr.smat").string()), IoError);
  }
}

TEST_SUITE("scene_config") {
  TEST_CASE("minimal one-PEC-sphere scene") {
    const SceneConfig c = parse_scene_text(kMinimal);
    REQUIRE(c.sites.size() == 1);
    CHECK(c.sites[0].kind == SiteSpec::Kind::Pec);
    CHECK(c.frequency.omegas() == std::vector<double>{1.0});
    const Scene s = build_scene(c, 1.0);
    CHECK_NOTHROW(s.validate());
  }

  TEST_CASE("wavelength 2 pi is omega 1") {
    const SceneConfig c = parse_scene_text(R"(
units: nm
frequency: {wavelength: "6.283185307179586 nm"}
sites: []
)");
    CHECK(std::abs(c.frequency.omegas()[0] - 1.0) <= 1e-15);
    CHECK(has_issue(issues_of("units: nm\nfrequency: {wavelength: 5 um}\nsites: []\n"), "unit-mismatch"));
    CHECK(has_issue(issues_of("units: nm\nfrequency: {omega: 1 1/um}\nsites: []\n"), "unit-mismatch"));
    CHECK(parse_scene_text("units: nm\nfrequency: {omega: 2 1/nm}\nsites: []\n").frequency.omegas()[0] == 2.0);
  }

  TEST_CASE("overlapping spheres are reported by pair") {
    const auto v = issues_of(R"(
eta: 1.0
frequency: {omega: 1}
sites:
  - {center: [0, 0, 0], radius: 1, model: pec}
  - {center: [10, 0, 0], radius: 1, model: pec}
  - {center: [1.35, 0, 0], radius: 0.5, model: pec}
)");
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "overlap");
    CHECK(v[0].message.find("sites 0 and 2") != std::string::npos);
    CHECK(v[0].line == 7);
    // Separated, but not by the eta margin.
    CHECK(has_issue(issues_of(R"(
eta: 1.2
frequency: {omega: 1}
sites:
  - {center: [0, 0, 0], radius: 1, model: pec}
  - {center: [2.1, 0, 0], radius: 1, model: pec}
)"),
                    "overlap", "sites 0 and 1"));
  }

  TEST_CASE("every problem in a file is reported") {
    const auto v = issues_of(R"(units: um
colour: red
materials:
  glass: {eps: [2.0, -0.1]}
incident: {direction: [0, 0, 1], polarization: [0, 0, 1]}
p: 0
eta: 0.5
sites:
  - {center: [0, 0, 0], radius: "1 nm", material: glass}
  - {center: [5, 0, 0], radius: 1, material: steel}
  - {center: [9, 0, 0], radius: 1}
outputs: {planes: [{axis: w, u: [0, 1], v: [0, 1], samples: [2, 2]}]}
)");
    CHECK(has_issue(v, "unknown-key", "colour"));
    CHECK(has_issue(v, "range", "Im eps"));
    CHECK(has_issue(v, "range", "transverse"));
    CHECK(has_issue(v, "missing", "frequency"));
    CHECK(has_issue(v, "range", "p must"));
    CHECK(has_issue(v, "range", "eta"));
    CHECK(has_issue(v, "unit-mismatch"));
    CHECK(has_issue(v, "reference", "steel"));
    CHECK(has_issue(v, "missing", "sites[2]"));
    CHECK(has_issue(v, "range", "axis"));
    CHECK(v.size() >= 10);
    for (const auto& i : v) {
      if (i.field == "colour") CHECK(i.line == 2);
      if (i.code == "reference") CHECK(i.line == 10);
    }
  }

  TEST_CASE("syntax errors and unreadable files") {
    const auto v = issues_of("sites: [\n  {center: [0, 0, 0]\n");
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "syntax");
    CHECK_THROWS_AS(parse_scene("/nonexistent/scene.yaml"), IoError);
    try {
      parse_scene_text("frequency: {omega: 1}\nmaterials: {gold: {table: nope.csv}}\nsites: []\n", "/tmp/x.yaml");
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(e.code() == ErrorCode::Io);
    }
  }

  TEST_CASE("write and re-parse is lossless") {
    const fs::path d = scratch("roundtrip");
    write_material_table(synthetic_table(0.5, 3.0, 6), (d / "drude.csv").string());
    write_mesh(ellipsoid_mesh(1, Vec3(0.6, 0.3, 0.3)), (d / "ell.mesh").string());
    const std::string text = R"(
units: nm
exterior: water
materials:
  water: {eps: 1.7689}
  lossy: {eps: [2.5, 0.25], mu: [1.0, 0.01]}
  drude: {table: drude.csv}
incident:
  direction: [0, 1, 1]
  polarization: [[1, 0.5], 0, 0]
frequency:
  wavelength: [3.1, "4.2 nm", 5.3]
p: 5
eta: 1.1
solver: {tol: 1e-8, restart: 30, maxiter: 77}
cache_dir: cache
inclusions:
  ell: {mesh: ell.mesh, center: [0, 0, 0], radius: 0.7, material: drude, rotation: {axis: [0, 0, 1], degrees: 30}}
sites:
  - {center: [0.1, 0.2, 0.3], radius: 0.4, model: pec}
  - {center: [3, 0, 0], radius: 0.5, material: lossy}
  - {center: [0, 3, 0], inclusion: ell}
outputs:
  cross_sections: false
  polarization: true
  planes: [{axis: y, offset: 0.25, u: [-1, 1], v: [-2, 2], samples: [3, 4]}]
  probes: [[0, 0, 9], [1, 2, 3]]
)";
    write_text(d / "scene.yaml", text);
    const SceneConfig a = parse_scene((d / "scene.yaml").string());
    CHECK(std::abs(a.direction.norm() - 1.0) <= 1e-15);
    CHECK(a.sites[2].radius == 0.7);
    const std::string once = write_scene_text(a);
    write_text(d / "again.yaml", once);
    const SceneConfig b = parse_scene((d / "again.yaml").string());
    CHECK(write_scene_text(b) == once);
    CHECK(b.frequency.omegas() == a.frequency.omegas());
    CHECK(b.direction == a.direction);
    CHECK(b.polarization == a.polarization);
    CHECK(b.materials.at("lossy").mu == a.materials.at("lossy").mu);
    CHECK(b.solver.maxiter == 77);
    CHECK(b.outputs.planes[0].nv == 4);
    CHECK(b.inclusions.at("ell").loaded->fingerprint() == a.inclusions.at("ell").loaded->fingerprint());
    CHECK(b.sites.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(b.sites[i].center == a.sites[i].center);
      CHECK(b.sites[i].radius == a.sites[i].radius);
      CHECK(b.sites[i].kind == a.sites[i].kind);
    }
  }

  TEST_CASE("material tables must cover the scan") {
    const fs::path d = scratch("table_range");
    write_material_table(synthetic_table(0.5, 2.0, 6), (d / "m.csv").string());
    write_text(d / "s.yaml", R"(
materials: {m: {table: m.csv}}
frequency: {omega: {start: 1.0, stop: 2.5, count: 4}}
sites: [{center: [0, 0, 0], radius: 1, material: m}]
)");
    try {
      parse_scene((d / "s.yaml").string());
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(has_issue(e.issues(), "range", "outside the table range"));
    }
  }

  TEST_CASE("inclusion geometry is checked at parse time") {
    const fs::path d = scratch("inclusion");
    write_mesh(ellipsoid_mesh(1, Vec3(0.6, 0.3, 0.3)), (d / "ell.mesh").string());
    write_text(d / "s.yaml", R"(
materials: {gold: {eps: [-2, 1]}}
frequency: {omega: 1}
inclusions:
  big: {mesh: ell.mesh, radius: 0.5, material: gold}
  gone: {mesh: missing.mesh, radius: 1, material: gold}
  fine: {mesh: ell.mesh, radius: 0.65, material: gold, rotation: {axis: [1, 1, 0], degrees: 45}}
sites: [{center: [0, 0, 0], inclusion: fine}, {center: [5, 0, 0], inclusion: nope}]
)");
    try {
      parse_scene((d / "s.yaml").string());
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(has_issue(e.issues(), "geometry", "outside the enclosing sphere"));
      CHECK(has_issue(e.issues(), "io", "missing.mesh"));
      CHECK(has_issue(e.issues(), "reference", "nope"));
      CHECK(e.issues().size() == 3);
    }
  }

  TEST_CASE("scatmat sites load the cache file") {
    const fs::path d = scratch("scatmat_site");
    const Medium ext(1.0, 1.0, 1.0);
    const ScatteringMatrix s = mie_dielectric(0.8, ext, Medium(3.0, 1.0, 1.0), 3).scattering;
    cache_scatmat(s, (d / "sphere.smat").string());
    write_text(d / "s.yaml", R"(
frequency: {omega: 1}
p: 3
sites: [{center: [0, 0, 0], scatmat: sphere.smat}, {center: [0, 0, 3], scatmat: sphere.smat}]
)");
    const SceneConfig c = parse_scene((d / "s.yaml").string());
    CHECK(c.sites[1].radius == 0.8);
    const Scene scene = build_scene(c, 1.0);
    CHECK(scene.matrices.size() == 1);
    CHECK_NOTHROW(scene.validate());
    write_text(d / "w.yaml", "frequency: {omega: 2}\np: 3\nsites: [{center: [0, 0, 0], scatmat: sphere.smat}]\n");
    try {
      parse_scene((d / "w.yaml").string());
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(has_issue(e.issues(), "range", "cached matrix is for omega"));
    }
  }

  TEST_CASE("200-site generated scene parses in under a second") {
    const fs::path d = scratch("generated");
    const std::string script = std::string(FMPS_SOURCE_DIR) + "/tools/gen_random_scene.py";
    const std::string cmd = "python3 " + script + " -n 200 --seed 7 -o " + (d / "s.yaml").string();
    REQUIRE(std::system(cmd.c_str()) == 0);
    const auto t0 = std::chrono::steady_clock::now();
    const SceneConfig c = parse_scene((d / "s.yaml").string());
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(c.sites.size() == 200);
    CHECK(sec < 1.0);
    CHECK(std::abs(c.frequency.omegas()[0] - 1.0) <= 1e-15);
    for (const SiteSpec& s : c.sites) {
      CHECK(s.center.x() >= 0.0);
      CHECK(s.center.x() <= 100.0);
      CHECK(s.center.z() <= 20.0);
    }
    // The generator and the parser agree on separation.
    CHECK_NOTHROW(build_scene(c, 1.0).validate());
    write_text(d / "again.yaml", write_scene_text(c));
    CHECK(write_scene_text(parse_scene((d / "again.yaml").string())) == write_scene_text(c));
  }
}

TEST_SUITE("scan") {
  TEST_CASE("single-frequency scan equals a direct solve") {
    const SceneConfig c = parse_scene_text(R"(
materials: {glass: {eps: 2.25}}
frequency: {omega: 1.1}
p: 4
sites:
  - {center: [0, 0, 0], radius: 1, material: glass}
  - {center: [0, 0, 3], radius: 0.7, model: pec}
outputs: {probes: [[0, 0, 6]]}
)");
    const ScanResult r = run_scan(c);
    REQUIRE(r.records.size() == 1);
    REQUIRE(r.records[0].ok);
    const MultipleScattering ms(build_scene(c, 1.1));
    const SolveReport rep = ms.solve(c.solver);
    const CrossSections cs = ms.cross_sections(rep);
    CHECK(r.records[0].cross.scat == cs.scat);
    CHECK(r.records[0].cross.abs == cs.abs);
    CHECK(r.records[0].report.iterations == rep.iterations);
    CHECK(r.records[0].probes[0].E == ms.eval_total_field(rep, Vec3(0, 0, 6)).E);
  }

  TEST_CASE("lossless dielectric pair stays passive across the scan") {
    const SceneConfig c = parse_scene_text(kPair);
    const ScanResult r = run_scan(c);
    REQUIRE(r.records.size() == 5);
    for (const ScanRecord& rec : r.records) {
      REQUIRE(rec.ok);
      CHECK(std::abs(rec.cross.abs) <= 1e-5 * rec.cross.scat);
      CHECK(std::isnan(rec.probes[1].E.x().real()) == false);
    }
    CHECK(r.records[0].omega == 0.8);
    CHECK(r.records[4].omega == 1.2);
  }

  TEST_CASE("output files have the requested shapes and are deterministic") {
    const fs::path d = scratch("outputs");
    const SceneConfig c = parse_scene_text(kPair);
    ScanOptions one, three;
    three.workers = 3;
    const auto files1 = write_outputs(run_scan(c, one), c, (d / "w1").string());
    const auto files3 = write_outputs(run_scan(c, three), c, (d / "w3").string());
    REQUIRE(files1.size() == 3 + 5);
    for (const std::string& f : files1) {
      const fs::path other = d / "w3" / fs::path(f).filename();
      CHECK(read_text(f) == read_text(other));
    }
    std::ifstream grid(d / "w1" / "plane0_w2.csv");
    std::string line;
    std::getline(grid, line);
    CHECK(line.rfind("# S_z", 0) == 0);
    int rows = 0;
    while (std::getline(grid, line)) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') == 8);
    }
    CHECK(rows == 7);

    std::ifstream cs(d / "w1" / "cross_sections.csv");
    std::getline(cs, line);
    CHECK(line == "omega,ok,iterations,residual,c_scat,c_abs,c_ext");
    int n = 0;
    while (std::getline(cs, line)) ++n;
    CHECK(n == 5);
  }

  TEST_CASE("failures are recorded and the scan continues") {
    SceneConfig c = parse_scene_text(kPair);
    c.solver.maxiter = 1;
    c.solver.tol = 1e-14;
    const ScanResult r = run_scan(c);
    REQUIRE(r.records.size() == 5);
    CHECK_FALSE(r.all_ok());
    CHECK(r.records[2].failure == ErrorCode::NonConvergence);
    CHECK(r.records[2].error.find("converge") != std::string::npos);
    ScanOptions abort;
    abort.abort_on_failure = true;
    CHECK_THROWS_AS(run_scan(c, abort), Error);
  }

  TEST_CASE("inclusion matrices are cached per frequency") {
    const fs::path d = scratch("cache");
    write_mesh(sphere_mesh(1, 0.5), (d / "ball.mesh").string());
    write_text(d / "s.yaml", R"(
materials: {glass: {eps: 2.0}}
frequency: {omega: [0.9, 1.0]}
p: 2
cache_dir: cache
inclusions:
  ball: {mesh: ball.mesh, radius: 0.6, material: glass}
sites: [{center: [0, 0, 0], inclusion: ball}, {center: [2, 0, 0], inclusion: ball}]
)");
    SceneConfig c = parse_scene((d / "s.yaml").string());
    const ScanResult first = run_scan(c);
    REQUIRE(first.all_ok());
    CHECK(fs::exists(d / "cache" / scatmat_cache_name("ball", 0.9)));
    CHECK(fs::exists(d / "cache" / scatmat_cache_name("ball", 1.0)));
    const ScanResult second = run_scan(c);
    CHECK(second.records[1].cross.scat == first.records[1].cross.scat);

    // A cache file for a different truncation is stale.
    c.p = 3;
    CHECK_THROWS_AS(run_scan(c), Error);
    ScanOptions rebuild;
    rebuild.rebuild_cache = true;
    CHECK(run_scan(c, rebuild).all_ok());
    CHECK(load_scatmat((d / "cache" / scatmat_cache_name("ball", 1.0)).string()).order() == 3);
  }

  TEST_CASE("plot script reads the cross sections back to 1e-12") {
    const fs::path d = scratch("plot");
    const SceneConfig c = parse_scene_text(kPair);
    const ScanResult r = run_scan(c);
    write_outputs(r, c, (d / "out").string());
    const std::string script = std::string(FMPS_SOURCE_DIR) + "/tools/plot_scan.py";
    const std::string cmd = "python3 " + script + " " + (d / "out").string() + " --dump > " + (d / "dump.json").string();
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::ifstream in(d / "dump.json");
    const nlohmann::json j = nlohmann::json::parse(in);
    const auto& cs = j.at("cross_sections");
    REQUIRE(cs.at("omega").size() == r.records.size());
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      const ScanRecord& rec = r.records[i];
      CHECK(std::abs(cs.at("omega")[i].get<double>() - rec.omega) <= 1e-12 * rec.omega);
      CHECK(std::abs(cs.at("c_scat")[i].get<double>() - rec.cross.scat) <= 1e-12 * rec.cross.scat);
      CHECK(std::abs(cs.at("c_ext")[i].get<double>() - rec.cross.ext) <= 1e-12 * std::abs(rec.cross.ext));
      CHECK(std::abs(cs.at("c_abs")[i].get<double>() - rec.cross.abs) <= 1e-12 * rec.cross.scat);
      const auto& pol = j.at("polarization");
      CHECK(std::abs(pol.at("a1p1_im")[i].get<double>() - rec.dipole.a(1, 1).imag()) <=
            1e-12 * rec.dipole.data.norm());
    }
  }
}
