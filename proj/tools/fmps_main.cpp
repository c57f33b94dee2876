// fmps: command-line front end over the C API.
//
//   fmps validate scene.yaml
//   fmps solve    scene.yaml [--omega W] [--out-dir out]
//   fmps scan     scene.yaml [--out-dir out] [--abort-on-failure] [--rebuild-cache]
//   fmps scatmat  scene.yaml                       (fill the cache directory)
//   fmps scatmat  --mesh m.mesh --radius R --omega W --eps RE IM -o s.smat
//
// Exit codes: 0 success, 2 validation failure, 3 numerical non-convergence, 4 I/O failure.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fmps/fmps.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitIo = 4;

int exit_code(fmps_status s) {
  switch (s) {
    case FMPS_OK:
      return kExitOk;
    case FMPS_E_ARGUMENT:
    case FMPS_E_VALIDATION:
      return kExitValidation;
    case FMPS_E_NONCONVERGENCE:
    case FMPS_E_NUMERICAL:
      return kExitNonConvergence;
    case FMPS_E_IO:
      return kExitIo;
    case FMPS_E_INTERNAL:
      break;
  }
  return 1;
}

int report(fmps_status s) {
  if (s == FMPS_OK) return kExitOk;
  std::fprintf(stderr, "fmps: %s error: %s\n", fmps_status_name(s), fmps_last_error());
  return exit_code(s);
}

struct Common {
  std::string scene;
  std::optional<double> tol;
  std::optional<int> restart, maxiter, p;
  std::optional<double> eta;
  std::optional<std::string> cache_dir;
  std::string out_dir = "out";
  int workers = 1;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c, bool outputs) {
  app->add_option("scene", c.scene, "scene file")->required();
  app->add_option("--tol", c.tol, "GMRES relative residual target")->check(CLI::Range(1e-16, 0.999));
  app->add_option("--restart", c.restart, "GMRES restart length")->check(CLI::Range(10, 100000));
  app->add_option("--maxiter", c.maxiter, "GMRES iteration cap")->check(CLI::PositiveNumber);
  app->add_option("-p,--order", c.p, "multipole truncation degree")->check(CLI::Range(1, 60));
  app->add_option("--eta", c.eta, "separation factor on R_i + R_j")->check(CLI::Range(1.0, 1e6));
  app->add_option("--cache-dir", c.cache_dir, "scattering-matrix cache directory");
  if (outputs) app->add_option("-o,--out-dir", c.out_dir, "output directory")->capture_default_str();
  app->add_option("-j,--workers", c.workers, "worker threads")->capture_default_str()->check(CLI::Range(1, 1024));
  app->add_flag("-q,--quiet", c.quiet, "no progress lines");
}

void log_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

void print_issues() {
  for (size_t i = 0; i < fmps_last_issue_count(); ++i) {
    int line = 0;
    const char *code = nullptr, *field = nullptr, *msg = nullptr;
    fmps_last_issue(i, &line, &code, &field, &msg);
    std::fprintf(stderr, "  line %d: %s%s%s [%s]\n", line, field, *field ? ": " : "", msg, code);
  }
}

// Loads the scene and applies command-line overrides.
fmps_status load(const Common& c, fmps_scene** scene) {
  fmps_status s = fmps_scene_load(c.scene.c_str(), scene);
  if (s != FMPS_OK) {
    if (fmps_last_issue_count() > 0) {
      std::fprintf(stderr, "fmps: %s: %zu problem(s)\n", c.scene.c_str(), fmps_last_issue_count());
      print_issues();
    }
    return s;
  }
  s = fmps_scene_set_solver(*scene, c.tol.value_or(0.0), c.restart.value_or(0), c.maxiter.value_or(0));
  if (s == FMPS_OK && c.p) s = fmps_scene_set_order(*scene, *c.p);
  if (s == FMPS_OK && c.eta) s = fmps_scene_set_eta(*scene, *c.eta);
  if (s == FMPS_OK && c.cache_dir) s = fmps_scene_set_cache_dir(*scene, c.cache_dir->c_str());
  return s;
}

fmps_scan_options options(const Common& c, bool abort, bool rebuild) {
  fmps_scan_options o;
  fmps_scan_options_init(&o);
  o.workers = c.workers;
  o.abort_on_failure = abort ? 1 : 0;
  o.rebuild_cache = rebuild ? 1 : 0;
  if (!c.quiet) o.log = log_line;
  return o;
}

int run(const Common& c, fmps_scene* scene, bool abort, bool rebuild) {
  const fmps_scan_options o = options(c, abort, rebuild);
  fmps_result* result = nullptr;
  fmps_status s = fmps_run_scan(scene, &o, &result);
  if (s != FMPS_OK) return report(s);
  int code = kExitOk;
  for (size_t i = 0; i < fmps_result_count(result); ++i) {
    fmps_record r;
    fmps_result_record(result, i, &r);
    if (r.ok) {
      std::printf("omega %.10g: C_scat %.10g C_abs %.6g C_ext %.10g (%d iterations)\n", r.omega, r.c_scat, r.c_abs,
                  r.c_ext, r.iterations);
    } else {
      std::printf("omega %.10g: failed: %s\n", r.omega, fmps_result_error(result, i));
      if (code == kExitOk) code = exit_code(r.status);
    }
  }
  s = fmps_result_write(result, scene, c.out_dir.c_str());
  fmps_result_free(result);
  if (s != FMPS_OK) return report(s);
  if (!c.quiet) std::fprintf(stderr, "wrote %s\n", c.out_dir.c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-domain multiple scattering of spheres and meshed inclusions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fmps_version());

  Common validate_c, solve_c, scan_c, scatmat_c;
  CLI::App* validate = app.add_subcommand("validate", "check a scene file and report every problem");
  validate->add_option("scene", validate_c.scene, "scene file")->required();

  CLI::App* solve = app.add_subcommand("solve", "solve a scene at one frequency");
  add_common(solve, solve_c, true);
  std::optional<double> solve_omega;
  solve->add_option("--omega", solve_omega, "angular frequency, overriding the scene")->check(CLI::PositiveNumber);

  CLI::App* scan = app.add_subcommand("scan", "solve a scene at every configured frequency");
  add_common(scan, scan_c, true);
  bool abort = false, rebuild = false;
  scan->add_flag("--abort-on-failure", abort, "stop at the first failed frequency");
  scan->add_flag("--rebuild-cache", rebuild, "rebuild stale cache files instead of failing");

  CLI::App* scatmat = app.add_subcommand("scatmat", "build inclusion scattering matrices");
  scatmat->add_option("scene", scatmat_c.scene, "scene file: fill its cache directory");
  std::string mesh, out_file;
  double radius = 0.0, omega = 0.0;
  std::vector<double> center{0.0, 0.0, 0.0}, eps{1.0, 0.0}, mu{1.0, 0.0}, ext_eps{1.0, 0.0}, ext_mu{1.0, 0.0};
  int p = 4;
  bool scatmat_rebuild = false;
  scatmat->add_option("--mesh", mesh, "mesh file (direct mode)");
  scatmat->add_option("--center", center, "enclosing-sphere center")->expected(3);
  scatmat->add_option("--radius", radius, "enclosing-sphere radius");
  scatmat->add_option("--omega", omega, "angular frequency");
  scatmat->add_option("--eps", eps, "interior relative permittivity RE IM")->expected(2);
  scatmat->add_option("--mu", mu, "interior relative permeability RE IM")->expected(2);
  scatmat->add_option("--ext-eps", ext_eps, "exterior relative permittivity RE IM")->expected(2);
  scatmat->add_option("--ext-mu", ext_mu, "exterior relative permeability RE IM")->expected(2);
  scatmat->add_option("-p,--order", p, "truncation degree")->capture_default_str()->check(CLI::Range(1, 60));
  scatmat->add_option("-o,--output", out_file, "cache file to write (direct mode)");
  scatmat->add_option("--cache-dir", scatmat_c.cache_dir, "override the scene's cache directory");
  scatmat->add_option("-j,--workers", scatmat_c.workers, "worker threads")->capture_default_str()->check(CLI::Range(1, 1024));
  scatmat->add_flag("--rebuild-cache", scatmat_rebuild, "rebuild stale cache files instead of failing");
  scatmat->add_flag("-q,--quiet", scatmat_c.quiet, "no progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (*validate) {
    fmps_scene* scene = nullptr;
    const fmps_status s = load(validate_c, &scene);
    if (s != FMPS_OK) return fmps_last_issue_count() > 0 ? exit_code(s) : report(s);
    size_t sites = 0, freqs = 0;
    fmps_scene_site_count(scene, &sites);
    fmps_scene_frequency_count(scene, &freqs);
    std::printf("%s: ok (%zu sites, %zu frequencies)\n", validate_c.scene.c_str(), sites, freqs);
    fmps_scene_free(scene);
    return kExitOk;
  }

  if (*solve || *scan) {
    const Common& c = *solve ? solve_c : scan_c;
    fmps_scene* scene = nullptr;
    fmps_status s = load(c, &scene);
    if (s != FMPS_OK) return fmps_last_issue_count() > 0 ? exit_code(s) : report(s);
    if (*solve) {
      size_t freqs = 0;
      fmps_scene_frequency_count(scene, &freqs);
      if (solve_omega) {
        s = fmps_scene_set_omega(scene, *solve_omega);
        if (s != FMPS_OK) {
          print_issues();
          fmps_scene_free(scene);
          return report(s);
        }
      } else if (freqs != 1) {
        std::fprintf(stderr, "fmps: the scene lists %zu frequencies; use 'scan' or pass --omega\n", freqs);
        fmps_scene_free(scene);
        return kExitValidation;
      }
    }
    const int code = run(c, scene, *scan && abort, *scan && rebuild);
    fmps_scene_free(scene);
    return code;
  }

  // scatmat
  if (!mesh.empty()) {
    if (!scatmat_c.scene.empty()) {
      std::fprintf(stderr, "fmps: give either a scene or --mesh, not both\n");
      return kExitValidation;
    }
    if (out_file.empty() || radius <= 0.0 || omega <= 0.0) {
      std::fprintf(stderr, "fmps: direct mode needs --radius, --omega and -o\n");
      return kExitValidation;
    }
    const fmps_medium inner{eps[0], eps[1], mu[0], mu[1]};
    const fmps_medium outer{ext_eps[0], ext_eps[1], ext_mu[0], ext_mu[1]};
    fmps_scatmat* s = nullptr;
    fmps_status st = fmps_scatmat_build(mesh.c_str(), center.data(), radius, omega, &outer, &inner, p,
                                        scatmat_c.workers, &s);
    if (st != FMPS_OK) return report(st);
    for (size_t i = 0; i < fmps_scatmat_warning_count(s); ++i) {
      std::fprintf(stderr, "warning: %s\n", fmps_scatmat_warning(s, i));
    }
    st = fmps_scatmat_save(s, out_file.c_str());
    std::printf("%s: p %d, fingerprint %016llx\n", out_file.c_str(), fmps_scatmat_order(s),
                static_cast<unsigned long long>(fmps_scatmat_fingerprint(s)));
    fmps_scatmat_free(s);
    return report(st);
  }
  if (scatmat_c.scene.empty()) {
    std::fprintf(stderr, "fmps: scatmat needs a scene file or --mesh\n");
    return kExitValidation;
  }
  fmps_scene* scene = nullptr;
  fmps_status s = load(scatmat_c, &scene);
  if (s != FMPS_OK) return fmps_last_issue_count() > 0 ? exit_code(s) : report(s);
  const fmps_scan_options o = options(scatmat_c, false, scatmat_rebuild);
  s = fmps_scene_precompute(scene, &o);
  fmps_scene_free(scene);
  return report(s);
}
