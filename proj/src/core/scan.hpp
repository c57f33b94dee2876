#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/muller.hpp"
#include "core/scene_config.hpp"

namespace fmps {

struct ScanOptions {
  int workers = 1;
  bool abort_on_failure = false;  ///< throw on the first failed frequency instead of recording it
  bool rebuild_cache = false;     ///< replace cache files that do not match instead of failing
  std::function<void(const std::string&)> log;  ///< progress lines; may be empty
};

struct ScanRecord {
  double omega = 0.0;
  bool ok = false;
  ErrorCode failure = ErrorCode::NonConvergence;  ///< meaningful when !ok
  std::string error;
  SolveReport report;
  CrossSections cross;
  ModeCoeffs dipole;                ///< degree-1 outgoing coefficients of the aggregate field
  Vec3 dipole_center = Vec3::Zero();
  std::vector<FieldSample> probes;  ///< NaN where a probe falls inside a site
  std::vector<PoyntingGrid> planes;
  std::vector<std::string> warnings;
};

struct ScanResult {
  std::vector<ScanRecord> records;  ///< in the config's frequency order

  bool all_ok() const;
};

/// Cache file name for an inclusion at one frequency: <name>-<omega bits in hex>.smat.
std::string scatmat_cache_name(const std::string& inclusion, double omega);

/// Scattering matrix of a configured inclusion at omega, built or taken from
/// cache_dir (empty: no cache). A stale cache file is an error unless `rebuild`.
std::shared_ptr<const ScatteringMatrix> inclusion_matrix(const SceneConfig& config, const std::string& name,
                                                         double omega, const std::string& cache_dir, bool rebuild,
                                                         int workers, std::vector<std::string>* warnings = nullptr);

/// Solves the scene at every configured frequency. Failures at one frequency are
/// recorded and the scan continues unless options.abort_on_failure.
ScanResult run_scan(const SceneConfig& config, const ScanOptions& options = {});

/// Writes cross_sections.csv, polarization.csv, probes.csv and one
/// plane<j>_w<i>.csv grid per plane and frequency, as requested by the config.
/// Returns the paths written.
std::vector<std::string> write_outputs(const ScanResult& result, const SceneConfig& config,
                                       const std::string& outdir);

}  // namespace fmps
