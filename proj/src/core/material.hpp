#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/types.hpp"

namespace fmps {

struct MaterialRow {
  double omega = 0.0;
  cplx eps{1.0};
  cplx mu{1.0};
};

/// Tabulated relative permittivity and permeability over strictly increasing omega.
/// Rows must be passive: Im eps >= 0 and Im mu >= 0.
class MaterialTable {
 public:
  MaterialTable() = default;
  /// Throws DomainError naming every offending row.
  explicit MaterialTable(std::vector<MaterialRow> rows);

  const std::vector<MaterialRow>& rows() const { return rows_; }
  double omega_min() const { return rows_.front().omega; }
  double omega_max() const { return rows_.back().omega; }

 private:
  std::vector<MaterialRow> rows_;
};

/// Piecewise-linear in omega, real and imaginary parts separately; exact at the nodes.
/// Throws DomainError outside [omega_min, omega_max].
std::pair<cplx, cplx> interpolate_material(const MaterialTable& table, double omega);

/// CSV with columns omega, eps_re, eps_im, mu_re, mu_im. An optional header line,
/// blank lines and '#' comments are skipped. Errors carry "path:line:".
MaterialTable read_material_table(const std::string& path);
void write_material_table(const MaterialTable& table, const std::string& path);

}  // namespace fmps
