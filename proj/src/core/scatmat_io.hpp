#pragma once

#include <cstdint>
#include <string>

#include "core/mie.hpp"

namespace fmps {

/// Cache file layout: text header lines "key value", closed by "end", followed by
/// the raw little-endian complex doubles of the dense matrix, column-major over
/// the flat (n^2 + n + m) index with the a-block before the b-block.
///
///   fmps-scatmat 1
///   p 3
///   omega 0x1p+0        (hexadecimal floats, so the header round-trips exactly)
///   radius ...
///   eps0 <re> <im>
///   mu0 <re> <im>
///   fingerprint 0123456789abcdef
///   size 32
///   end
struct ScatmatHeader {
  int version = 1;
  int p = 0;
  double omega = 0.0;
  double radius = 0.0;
  cplx eps0{1.0};
  cplx mu0{1.0};
  std::uint64_t fingerprint = 0;
};

void cache_scatmat(const ScatteringMatrix& s, const std::string& path);
ScatmatHeader read_scatmat_header(const std::string& path);
ScatteringMatrix load_scatmat(const std::string& path);

/// Throws DomainError listing every field (omega, radius, exterior medium, p,
/// fingerprint) where the stored matrix differs from what the caller needs.
void require_scatmat_match(const ScatteringMatrix& s, const Medium& exterior, double radius, int p,
                           std::uint64_t fingerprint);

}  // namespace fmps
