#include "fmps/fmps.h"

#include <cmath>
#include <exception>
#include <fstream>
#include <new>
#include <set>
#include <string>
#include <vector>

#include "core/scan.hpp"
#include "core/scatmat_io.hpp"

struct fmps_scene {
  fmps::SceneConfig config;
};

struct fmps_result {
  fmps::ScanResult result;
};

struct fmps_scatmat {
  fmps::ScatteringMatrix matrix;
  std::vector<std::string> warnings;
};

namespace {

thread_local std::string g_error;
thread_local std::vector<fmps::ConfigIssue> g_issues;

fmps_status to_status(fmps::ErrorCode c) {
  switch (c) {
    case fmps::ErrorCode::Argument:
      return FMPS_E_ARGUMENT;
    case fmps::ErrorCode::Validation:
      return FMPS_E_VALIDATION;
    case fmps::ErrorCode::NonConvergence:
      return FMPS_E_NONCONVERGENCE;
    case fmps::ErrorCode::Io:
      return FMPS_E_IO;
    case fmps::ErrorCode::Numerical:
      return FMPS_E_NUMERICAL;
  }
  return FMPS_E_INTERNAL;
}

fmps_status fail(fmps_status s, const std::string& msg) {
  g_error = msg;
  return s;
}

// Runs f, translating exceptions into status codes and the thread's error text.
template <class F>
fmps_status guarded(F&& f) {
  g_error.clear();
  g_issues.clear();
  try {
    f();
    return FMPS_OK;
  } catch (const fmps::ConfigError& e) {
    g_issues = e.issues();
    return fail(to_status(e.code()), e.what());
  } catch (const fmps::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FMPS_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FMPS_E_INTERNAL, e.what());
  }
}

fmps::ScanOptions scan_options(const fmps_scan_options* o) {
  fmps::ScanOptions out;
  if (!o) return out;
  if (o->workers < 1) throw fmps::DomainError("workers must be >= 1");
  out.workers = o->workers;
  out.abort_on_failure = o->abort_on_failure != 0;
  out.rebuild_cache = o->rebuild_cache != 0;
  if (o->log) {
    const fmps_log_fn fn = o->log;
    void* user = o->log_user;
    out.log = [fn, user](const std::string& s) { fn(s.c_str(), user); };
  }
  return out;
}

fmps::Medium medium(const fmps_medium* m, double omega) {
  if (!m) return fmps::Medium(1.0, 1.0, omega);
  return fmps::Medium(fmps::cplx(m->eps_re, m->eps_im), fmps::cplx(m->mu_re, m->mu_im), omega);
}

#define FMPS_REQUIRE(cond, what) \
  do {                           \
    if (!(cond)) return fail(FMPS_E_ARGUMENT, what); \
  } while (0)

}  // namespace

extern "C" {

const char* fmps_version(void) { return "1.0.0"; }

const char* fmps_last_error(void) { return g_error.c_str(); }

const char* fmps_status_name(fmps_status status) {
  switch (status) {
    case FMPS_OK:
      return "ok";
    case FMPS_E_ARGUMENT:
      return "argument";
    case FMPS_E_VALIDATION:
      return "validation";
    case FMPS_E_NONCONVERGENCE:
      return "non-convergence";
    case FMPS_E_IO:
      return "io";
    case FMPS_E_NUMERICAL:
      return "numerical";
    case FMPS_E_INTERNAL:
      return "internal";
  }
  return "unknown";
}

fmps_status fmps_scene_load(const char* path, fmps_scene** out) {
  FMPS_REQUIRE(path && out, "fmps_scene_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new fmps_scene{fmps::parse_scene(path)}; });
}

void fmps_scene_free(fmps_scene* scene) { delete scene; }

size_t fmps_last_issue_count(void) { return g_issues.size(); }

fmps_status fmps_last_issue(size_t index, int* line, const char** code, const char** field, const char** message) {
  if (index >= g_issues.size()) {
    g_error = "fmps_last_issue: index out of range";
    return FMPS_E_ARGUMENT;
  }
  const fmps::ConfigIssue& i = g_issues[index];
  if (line) *line = i.line;
  if (code) *code = i.code.c_str();
  if (field) *field = i.field.c_str();
  if (message) *message = i.message.c_str();
  return FMPS_OK;
}

fmps_status fmps_scene_site_count(const fmps_scene* scene, size_t* out) {
  FMPS_REQUIRE(scene && out, "fmps_scene_site_count: null argument");
  *out = scene->config.sites.size();
  return FMPS_OK;
}

fmps_status fmps_scene_frequency_count(const fmps_scene* scene, size_t* out) {
  FMPS_REQUIRE(scene && out, "fmps_scene_frequency_count: null argument");
  *out = scene->config.frequency.omegas().size();
  return FMPS_OK;
}

fmps_status fmps_scene_set_solver(fmps_scene* scene, double tol, int restart, int maxiter) {
  FMPS_REQUIRE(scene, "fmps_scene_set_solver: null scene");
  FMPS_REQUIRE(!(tol >= 1.0), "tol must lie in (0, 1)");
  FMPS_REQUIRE(restart <= 0 || restart >= 10, "restart must be >= 10");
  if (tol > 0.0) scene->config.solver.tol = tol;
  if (restart > 0) scene->config.solver.restart = restart;
  if (maxiter > 0) scene->config.solver.maxiter = maxiter;
  return FMPS_OK;
}

fmps_status fmps_scene_set_order(fmps_scene* scene, int p) {
  FMPS_REQUIRE(scene, "fmps_scene_set_order: null scene");
  FMPS_REQUIRE(p >= 1 && p <= 60, "p must lie in [1, 60]");
  scene->config.p = p;
  return FMPS_OK;
}

fmps_status fmps_scene_set_eta(fmps_scene* scene, double eta) {
  FMPS_REQUIRE(scene, "fmps_scene_set_eta: null scene");
  FMPS_REQUIRE(eta >= 1.0, "eta must be >= 1");
  return guarded([&] {
    fmps::SceneConfig c = scene->config;
    c.eta = eta;
    // Re-run the overlap check through the canonical text.
    scene->config = fmps::parse_scene_text(fmps::write_scene_text(c), c.path);
  });
}

fmps_status fmps_scene_set_cache_dir(fmps_scene* scene, const char* dir) {
  FMPS_REQUIRE(scene && dir, "fmps_scene_set_cache_dir: null argument");
  scene->config.cache_dir = dir;
  return FMPS_OK;
}

fmps_status fmps_scene_set_omega(fmps_scene* scene, double omega) {
  FMPS_REQUIRE(scene, "fmps_scene_set_omega: null scene");
  FMPS_REQUIRE(omega > 0.0 && std::isfinite(omega), "omega must be positive");
  return guarded([&] {
    fmps::SceneConfig c = scene->config;
    c.frequency = fmps::FrequencySpec{};
    c.frequency.values = {omega};
    scene->config = fmps::parse_scene_text(fmps::write_scene_text(c), c.path);
  });
}

fmps_status fmps_scene_write(const fmps_scene* scene, const char* path) {
  FMPS_REQUIRE(scene && path, "fmps_scene_write: null argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fmps::IoError(std::string("cannot write '") + path + "'");
    out << fmps::write_scene_text(scene->config);
    if (!out) throw fmps::IoError(std::string("error writing '") + path + "'");
  });
}

void fmps_scan_options_init(fmps_scan_options* options) {
  if (!options) return;
  options->workers = 1;
  options->abort_on_failure = 0;
  options->rebuild_cache = 0;
  options->log = nullptr;
  options->log_user = nullptr;
}

fmps_status fmps_run_scan(const fmps_scene* scene, const fmps_scan_options* options, fmps_result** out) {
  FMPS_REQUIRE(scene && out, "fmps_run_scan: null argument");
  *out = nullptr;
  return guarded([&] { *out = new fmps_result{fmps::run_scan(scene->config, scan_options(options))}; });
}

void fmps_result_free(fmps_result* result) { delete result; }

size_t fmps_result_count(const fmps_result* result) { return result ? result->result.records.size() : 0; }

fmps_status fmps_result_record(const fmps_result* result, size_t index, fmps_record* out) {
  FMPS_REQUIRE(result && out, "fmps_result_record: null argument");
  FMPS_REQUIRE(index < result->result.records.size(), "fmps_result_record: index out of range");
  const fmps::ScanRecord& r = result->result.records[index];
  out->omega = r.omega;
  out->ok = r.ok ? 1 : 0;
  out->status = r.ok ? FMPS_OK : to_status(r.failure);
  out->iterations = r.report.iterations;
  out->residual = r.report.residual;
  out->c_scat = r.cross.scat;
  out->c_abs = r.cross.abs;
  out->c_ext = r.cross.ext;
  return FMPS_OK;
}

const char* fmps_result_error(const fmps_result* result, size_t index) {
  if (!result || index >= result->result.records.size()) return "";
  return result->result.records[index].error.c_str();
}

fmps_status fmps_result_write(const fmps_result* result, const fmps_scene* scene, const char* outdir) {
  FMPS_REQUIRE(result && scene && outdir, "fmps_result_write: null argument");
  return guarded([&] { fmps::write_outputs(result->result, scene->config, outdir); });
}

fmps_status fmps_scene_precompute(const fmps_scene* scene, const fmps_scan_options* options) {
  FMPS_REQUIRE(scene, "fmps_scene_precompute: null scene");
  return guarded([&] {
    const fmps::SceneConfig& c = scene->config;
    if (c.cache_dir.empty()) throw fmps::DomainError("precompute needs a cache directory");
    const fmps::ScanOptions o = scan_options(options);
    std::set<std::string> used;
    for (const fmps::SiteSpec& s : c.sites) {
      if (s.kind == fmps::SiteSpec::Kind::Inclusion) used.insert(s.ref);
    }
    for (double w : c.frequency.omegas()) {
      for (const std::string& name : used) {
        std::vector<std::string> warnings;
        fmps::inclusion_matrix(c, name, w, c.resolve(c.cache_dir), o.rebuild_cache, o.workers, &warnings);
        if (o.log) {
          o.log("inclusion '" + name + "' at omega " + std::to_string(w) + ": " +
                fmps::scatmat_cache_name(name, w));
          for (const std::string& s : warnings) o.log("warning: " + s);
        }
      }
    }
  });
}

fmps_status fmps_scatmat_build(const char* mesh_path, const double center[3], double radius, double omega,
                               const fmps_medium* exterior, const fmps_medium* interior, int p, int workers,
                               fmps_scatmat** out) {
  FMPS_REQUIRE(mesh_path && center && interior && out, "fmps_scatmat_build: null argument");
  FMPS_REQUIRE(workers >= 1, "workers must be >= 1");
  *out = nullptr;
  return guarded([&] {
    const fmps::TriMesh mesh = fmps::read_mesh(mesh_path);
    fmps::InclusionOptions opts;
    opts.workers = workers;
    fmps::InclusionScatteringMatrix s =
        fmps::build_inclusion_scatmat(mesh, fmps::Vec3(center[0], center[1], center[2]), radius,
                                      medium(exterior, omega), medium(interior, omega), p, opts);
    *out = new fmps_scatmat{std::move(s.scattering), std::move(s.warnings)};
  });
}

fmps_status fmps_scatmat_load(const char* path, fmps_scatmat** out) {
  FMPS_REQUIRE(path && out, "fmps_scatmat_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new fmps_scatmat{fmps::load_scatmat(path), {}}; });
}

fmps_status fmps_scatmat_save(const fmps_scatmat* s, const char* path) {
  FMPS_REQUIRE(s && path, "fmps_scatmat_save: null argument");
  return guarded([&] { fmps::cache_scatmat(s->matrix, path); });
}

void fmps_scatmat_free(fmps_scatmat* s) { delete s; }

int fmps_scatmat_order(const fmps_scatmat* s) { return s ? s->matrix.order() : 0; }

size_t fmps_scatmat_dim(const fmps_scatmat* s) {
  return s ? static_cast<size_t>(2 * fmps::mode_count(s->matrix.order())) : 0;
}

fmps_status fmps_scatmat_entry(const fmps_scatmat* s, size_t row, size_t col, double* re, double* im) {
  FMPS_REQUIRE(s && re && im, "fmps_scatmat_entry: null argument");
  const size_t n = fmps_scatmat_dim(s);
  FMPS_REQUIRE(row < n && col < n, "fmps_scatmat_entry: index out of range");
  const fmps::cplx v = s->matrix.form() == fmps::ScatteringMatrix::Form::Dense
                           ? s->matrix.matrix()(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col))
                           : s->matrix.to_dense()(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  *re = v.real();
  *im = v.imag();
  return FMPS_OK;
}

uint64_t fmps_scatmat_fingerprint(const fmps_scatmat* s) { return s ? s->matrix.mesh_fingerprint() : 0; }

size_t fmps_scatmat_warning_count(const fmps_scatmat* s) { return s ? s->warnings.size() : 0; }

const char* fmps_scatmat_warning(const fmps_scatmat* s, size_t index) {
  if (!s || index >= s->warnings.size()) return "";
  return s->warnings[index].c_str();
}

}  // extern "C"
