#include "core/scan.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <limits>
#include <set>

#include "core/scatmat_io.hpp"

namespace fmps {

namespace {

namespace fs = std::filesystem;

class CsvFile {
 public:
  explicit CsvFile(const std::string& path) : path_(path), f_(std::fopen(path.c_str(), "wb")) {
    if (!f_) throw IoError("cannot write '" + path + "'");
  }
  ~CsvFile() {
    if (f_) std::fclose(f_);
  }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;

  void text(const char* s) { std::fputs(s, f_); }
  void num(double v, bool first = false) {
    if (!first) std::fputc(',', f_);
    std::fprintf(f_, "%.17g", v);
  }
  void cnum(cplx v) {
    num(v.real());
    num(v.imag());
  }
  void end() { std::fputc('\n', f_); }
  void close() {
    const bool bad = std::ferror(f_) != 0;
    if (std::fclose(f_) != 0 || bad) {
      f_ = nullptr;
      throw IoError("error writing '" + path_ + "'");
    }
    f_ = nullptr;
  }

 private:
  std::string path_;
  std::FILE* f_;
};

void say(const ScanOptions& o, const std::string& s) {
  if (o.log) o.log(s);
}

}  // namespace

bool ScanResult::all_ok() const {
  for (const ScanRecord& r : records) {
    if (!r.ok) return false;
  }
  return true;
}

std::string scatmat_cache_name(const std::string& inclusion, double omega) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &omega, sizeof bits);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, bits);
  return inclusion + "-" + buf + ".smat";
}

std::shared_ptr<const ScatteringMatrix> inclusion_matrix(const SceneConfig& config, const std::string& name,
                                                         double omega, const std::string& cache_dir, bool rebuild,
                                                         int workers, std::vector<std::string>* warnings) {
  const auto it = config.inclusions.find(name);
  if (it == config.inclusions.end()) throw DomainError("unknown inclusion '" + name + "'");
  const InclusionSpec& inc = it->second;
  if (!inc.loaded) throw DomainError("inclusion '" + name + "' has no mesh loaded");
  const Medium ext = config.exterior_at(omega);
  const auto [eps, mu] = config.material(inc.material).at(omega);
  const Medium interior(eps, mu, omega);
  const std::uint64_t fp = inclusion_fingerprint(*inc.loaded, interior, inc.center);

  std::string path;
  if (!cache_dir.empty()) {
    path = (fs::path(cache_dir) / scatmat_cache_name(name, omega)).string();
    if (fs::exists(path)) {
      ScatteringMatrix s = load_scatmat(path);
      try {
        require_scatmat_match(s, ext, inc.radius, config.p, fp);
        return std::make_shared<const ScatteringMatrix>(std::move(s));
      } catch (const DomainError& e) {
        if (!rebuild) throw Error(ErrorCode::Validation, "stale cache file '" + path + "': " + e.what());
      }
    }
  }
  InclusionOptions opts;
  opts.workers = workers;
  InclusionScatteringMatrix built = build_inclusion_scatmat(*inc.loaded, inc.center, inc.radius, ext, interior,
                                                            config.p, opts);
  if (warnings) {
    for (const std::string& w : built.warnings) warnings->push_back("inclusion '" + name + "': " + w);
  }
  if (!path.empty()) {
    fs::create_directories(cache_dir);
    cache_scatmat(built.scattering, path);
  }
  return std::make_shared<const ScatteringMatrix>(std::move(built.scattering));
}

ScanResult run_scan(const SceneConfig& config, const ScanOptions& options) {
  ScanResult out;
  const std::string cache_dir = config.cache_dir.empty() ? "" : config.resolve(config.cache_dir);
  std::set<std::string> used;
  for (const SiteSpec& s : config.sites) {
    if (s.kind == SiteSpec::Kind::Inclusion) used.insert(s.ref);
  }
  const std::vector<double> omegas = config.frequency.omegas();
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    ScanRecord rec;
    rec.omega = omegas[i];
    char head[64];
    std::snprintf(head, sizeof head, "omega %.10g (%zu/%zu)", rec.omega, i + 1, omegas.size());
    try {
      Scene scene = build_scene(config, rec.omega);
      for (const std::string& name : used) {
        scene.matrices[name] =
            inclusion_matrix(config, name, rec.omega, cache_dir, options.rebuild_cache, options.workers, &rec.warnings);
      }
      const MultipleScattering ms(std::move(scene), nullptr, options.workers);
      rec.report = ms.solve(config.solver);
      if (!rec.report.converged) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "GMRES did not converge: residual %.3g after %d iterations",
                      rec.report.residual, rec.report.iterations);
        throw Error(ErrorCode::NonConvergence, msg);
      }
      if (config.outputs.cross_sections) rec.cross = ms.cross_sections(rec.report);
      if (config.outputs.polarization) {
        rec.dipole = ms.aggregate_dipole(rec.report);
        rec.dipole_center = ms.centroid();
      }
      for (const Vec3& x : config.outputs.probes) {
        try {
          rec.probes.push_back(ms.eval_total_field(rec.report, x));
        } catch (const DomainError&) {
          const double nan = std::numeric_limits<double>::quiet_NaN();
          FieldSample f;
          f.E.setConstant(cplx(nan, nan));
          f.H.setConstant(cplx(nan, nan));
          rec.probes.push_back(f);
        }
      }
      for (const PlaneSpec& p : config.outputs.planes) rec.planes.push_back(ms.poynting_grid(rec.report, p));
      rec.ok = true;
      char msg[128];
      std::snprintf(msg, sizeof msg, ": %d iterations, residual %.3g", rec.report.iterations, rec.report.residual);
      say(options, head + std::string(msg));
    } catch (const Error& e) {
      // Stale caches, bad geometry and I/O are not per-frequency failures.
      if (options.abort_on_failure || e.code() == ErrorCode::Io || e.code() == ErrorCode::Validation) throw;
      rec.ok = false;
      rec.failure = e.code();
      rec.error = e.what();
      say(options, head + std::string(": FAILED: ") + e.what());
    }
    for (const std::string& w : rec.warnings) say(options, "warning: " + w);
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::string> write_outputs(const ScanResult& result, const SceneConfig& config,
                                       const std::string& outdir) {
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create output directory '" + outdir + "': " + ec.message());
  std::vector<std::string> written;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (config.outputs.cross_sections) {
    const std::string path = (fs::path(outdir) / "cross_sections.csv").string();
    CsvFile f(path);
    f.text("omega,ok,iterations,residual,c_scat,c_abs,c_ext\n");
    for (const ScanRecord& r : result.records) {
      f.num(r.omega, true);
      f.text(r.ok ? ",1" : ",0");
      f.num(r.report.iterations);
      f.num(r.report.residual);
      f.num(r.ok ? r.cross.scat : nan);
      f.num(r.ok ? r.cross.abs : nan);
      f.num(r.ok ? r.cross.ext : nan);
      f.end();
    }
    f.close();
    written.push_back(path);
  }

  if (config.outputs.polarization) {
    const std::string path = (fs::path(outdir) / "polarization.csv").string();
    CsvFile f(path);
    // Artifact convention: degree-1 outgoing coefficients (a: electric, b: magnetic)
    // of the aggregate scattered field about the centroid of the site centers.
    f.text("omega,cx,cy,cz,a1m1_re,a1m1_im,a10_re,a10_im,a1p1_re,a1p1_im,"
           "b1m1_re,b1m1_im,b10_re,b10_im,b1p1_re,b1p1_im\n");
    for (const ScanRecord& r : result.records) {
      f.num(r.omega, true);
      for (int d = 0; d < 3; ++d) f.num(r.dipole_center[d]);
      for (int m = -1; m <= 1; ++m) f.cnum(r.ok ? r.dipole.a(1, m) : cplx(nan, nan));
      for (int m = -1; m <= 1; ++m) f.cnum(r.ok ? r.dipole.b(1, m) : cplx(nan, nan));
      f.end();
    }
    f.close();
    written.push_back(path);
  }

  if (!config.outputs.probes.empty()) {
    const std::string path = (fs::path(outdir) / "probes.csv").string();
    CsvFile f(path);
    f.text("omega,probe,x,y,z,Ex_re,Ex_im,Ey_re,Ey_im,Ez_re,Ez_im,Hx_re,Hx_im,Hy_re,Hy_im,Hz_re,Hz_im\n");
    for (const ScanRecord& r : result.records) {
      for (std::size_t j = 0; j < config.outputs.probes.size(); ++j) {
        f.num(r.omega, true);
        f.num(static_cast<double>(j));
        for (int d = 0; d < 3; ++d) f.num(config.outputs.probes[j][d]);
        for (int d = 0; d < 3; ++d) f.cnum(r.ok ? r.probes[j].E[d] : cplx(nan, nan));
        for (int d = 0; d < 3; ++d) f.cnum(r.ok ? r.probes[j].H[d] : cplx(nan, nan));
        f.end();
      }
    }
    f.close();
    written.push_back(path);
  }

  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const ScanRecord& r = result.records[i];
    if (!r.ok) continue;
    for (std::size_t j = 0; j < r.planes.size(); ++j) {
      const PoyntingGrid& g = r.planes[j];
      const std::string path =
          (fs::path(outdir) / ("plane" + std::to_string(j) + "_w" + std::to_string(i) + ".csv")).string();
      CsvFile f(path);
      char head[256];
      std::snprintf(head, sizeof head, "# S_%c omega=%.17g offset=%.17g u=[%.17g,%.17g] v=[%.17g,%.17g] rows=%d cols=%d\n",
                    'x' + g.plane.axis, r.omega, g.plane.offset, g.plane.u0, g.plane.u1, g.plane.v0, g.plane.v1,
                    g.plane.nv, g.plane.nu);
      f.text(head);
      for (int iv = 0; iv < g.plane.nv; ++iv) {
        for (int iu = 0; iu < g.plane.nu; ++iu) f.num(g.value[static_cast<std::size_t>(iv) * g.plane.nu + iu], iu == 0);
        f.end();
      }
      f.close();
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace fmps
