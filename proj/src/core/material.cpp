#include "core/material.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fmps {

MaterialTable::MaterialTable(std::vector<MaterialRow> rows) : rows_(std::move(rows)) {
  std::vector<std::string> problems;
  if (rows_.size() < 2) problems.push_back("needs at least two rows");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const MaterialRow& r = rows_[i];
    const std::string at = "row " + std::to_string(i);
    if (!std::isfinite(r.omega) || !std::isfinite(r.eps.real()) || !std::isfinite(r.eps.imag()) ||
        !std::isfinite(r.mu.real()) || !std::isfinite(r.mu.imag())) {
      problems.push_back(at + ": non-finite value");
      continue;
    }
    if (!(r.omega > 0.0)) problems.push_back(at + ": omega must be positive");
    if (r.eps.imag() < 0.0) problems.push_back(at + ": Im eps < 0 (active medium)");
    if (r.mu.imag() < 0.0) problems.push_back(at + ": Im mu < 0 (active medium)");
    if (i > 0 && !(r.omega > rows_[i - 1].omega)) problems.push_back(at + ": omega not strictly increasing");
  }
  if (!problems.empty()) {
    std::string msg = "material table: ";
    for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
    throw DomainError(msg);
  }
}

std::pair<cplx, cplx> interpolate_material(const MaterialTable& table, double omega) {
  const auto& rows = table.rows();
  if (rows.empty()) throw DomainError("interpolate_material: empty table");
  if (!(omega >= table.omega_min() && omega <= table.omega_max())) {
    std::ostringstream s;
    s << "interpolate_material: omega " << omega << " outside table range [" << table.omega_min() << ", "
      << table.omega_max() << "]";
    throw DomainError(s.str());
  }
  const auto hi = std::lower_bound(rows.begin(), rows.end(), omega,
                                   [](const MaterialRow& r, double w) { return r.omega < w; });
  if (hi->omega == omega) return {hi->eps, hi->mu};
  const auto lo = hi - 1;
  const double t = (omega - lo->omega) / (hi->omega - lo->omega);
  return {(1.0 - t) * lo->eps + t * hi->eps, (1.0 - t) * lo->mu + t * hi->mu};
}

MaterialTable read_material_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open material table '" + path + "'");
  std::vector<MaterialRow> rows;
  std::string line;
  int lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::string cells = line;
    std::replace(cells.begin(), cells.end(), ',', ' ');
    std::istringstream s(cells);
    double v[5];
    std::string extra;
    int got = 0;
    while (got < 5 && (s >> v[got])) ++got;
    s.clear();
    if (got != 5 || (s >> extra)) {
      if (header_allowed && got == 0) {
        header_allowed = false;
        continue;
      }
      throw DomainError(path + ":" + std::to_string(lineno) + ": expected 5 numbers: omega, eps_re, eps_im, mu_re, mu_im");
    }
    header_allowed = false;
    rows.push_back({v[0], {v[1], v[2]}, {v[3], v[4]}});
  }
  try {
    return MaterialTable(std::move(rows));
  } catch (const DomainError& e) {
    throw DomainError(path + ": " + e.what());
  }
}

void write_material_table(const MaterialTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write material table '" + path + "'");
  out << "omega,eps_re,eps_im,mu_re,mu_im\n";
  char buf[160];
  for (const MaterialRow& r : table.rows()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.omega, r.eps.real(), r.eps.imag(),
                  r.mu.real(), r.mu.imag());
    out << buf;
  }
  if (!out) throw IoError("failed writing material table '" + path + "'");
}

}  // namespace fmps
