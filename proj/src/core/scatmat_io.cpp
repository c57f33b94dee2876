#include "core/scatmat_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace fmps {

namespace {

static_assert(std::endian::native == std::endian::little, "cache payload is written in host byte order");

constexpr const char* kMagic = "fmps-scatmat";

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& path, const std::string& key, const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || *end != '\0') throw IoError(path + ": bad value '" + token + "' for " + key);
  return v;
}

}  // namespace

void cache_scatmat(const ScatteringMatrix& s, const std::string& path) {
  const Eigen::MatrixXcd m = s.to_dense();
  const Medium& ext = s.exterior();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write scattering-matrix cache '" + path + "'");
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(s.mesh_fingerprint()));
  out << kMagic << " 1\n"
      << "p " << s.order() << "\n"
      << "omega " << hexfloat(ext.omega()) << "\n"
      << "radius " << hexfloat(s.radius()) << "\n"
      << "eps0 " << hexfloat(ext.eps().real()) << " " << hexfloat(ext.eps().imag()) << "\n"
      << "mu0 " << hexfloat(ext.mu().real()) << " " << hexfloat(ext.mu().imag()) << "\n"
      << "fingerprint " << fp << "\n"
      << "size " << m.rows() << "\n"
      << "end\n";
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(cplx)));
  if (!out) throw IoError("failed writing scattering-matrix cache '" + path + "'");
}

namespace {

ScatmatHeader read_header(std::istream& in, const std::string& path, long long& size) {
  ScatmatHeader h;
  std::string line;
  bool magic = false, done = false;
  int seen = 0;
  size = -1;
  while (std::getline(in, line)) {
    std::istringstream s(line);
    std::string key;
    s >> key;
    std::vector<std::string> vals;
    for (std::string v; s >> v;) vals.push_back(v);
    auto need = [&](std::size_t n) {
      if (vals.size() != n) throw IoError(path + ": malformed header line '" + line + "'");
    };
    if (!magic) {
      if (key != kMagic) throw IoError(path + ": not a scattering-matrix cache");
      need(1);
      h.version = static_cast<int>(parse_double(path, key, vals[0]));
      if (h.version != 1) throw IoError(path + ": unsupported cache version " + vals[0]);
      magic = true;
      continue;
    }
    if (key == "end") {
      done = true;
      break;
    }
    if (key == "p") {
      need(1);
      h.p = static_cast<int>(parse_double(path, key, vals[0]));
    } else if (key == "omega") {
      need(1);
      h.omega = parse_double(path, key, vals[0]);
    } else if (key == "radius") {
      need(1);
      h.radius = parse_double(path, key, vals[0]);
    } else if (key == "eps0") {
      need(2);
      h.eps0 = {parse_double(path, key, vals[0]), parse_double(path, key, vals[1])};
    } else if (key == "mu0") {
      need(2);
      h.mu0 = {parse_double(path, key, vals[0]), parse_double(path, key, vals[1])};
    } else if (key == "fingerprint") {
      need(1);
      char* end = nullptr;
      h.fingerprint = std::strtoull(vals[0].c_str(), &end, 16);
      if (*end != '\0') throw IoError(path + ": bad fingerprint '" + vals[0] + "'");
    } else if (key == "size") {
      need(1);
      size = static_cast<long long>(parse_double(path, key, vals[0]));
    } else {
      throw IoError(path + ": unknown header key '" + key + "'");
    }
    ++seen;
  }
  if (!magic) throw IoError(path + ": empty or truncated cache");
  if (!done || seen != 7) throw IoError(path + ": incomplete header");
  if (h.p < 1 || size != 2LL * mode_count(h.p)) throw IoError(path + ": matrix size does not match p");
  return h;
}

}  // namespace

ScatmatHeader read_scatmat_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scattering-matrix cache '" + path + "'");
  long long size = 0;
  return read_header(in, path, size);
}

ScatteringMatrix load_scatmat(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scattering-matrix cache '" + path + "'");
  long long size = 0;
  const ScatmatHeader h = read_header(in, path, size);
  Eigen::MatrixXcd m(size, size);
  const auto bytes = static_cast<std::streamsize>(m.size() * sizeof(cplx));
  in.read(reinterpret_cast<char*>(m.data()), bytes);
  if (in.gcount() != bytes) throw IoError(path + ": truncated payload");
  if (in.peek() != std::char_traits<char>::eof()) throw IoError(path + ": trailing bytes after payload");
  return ScatteringMatrix::dense(h.p, std::move(m), Medium(h.eps0, h.mu0, h.omega), h.radius, h.fingerprint);
}

void require_scatmat_match(const ScatteringMatrix& s, const Medium& exterior, double radius, int p,
                           std::uint64_t fingerprint) {
  std::vector<std::string> bad;
  if (s.omega() != exterior.omega()) bad.push_back("omega");
  if (s.radius() != radius) bad.push_back("radius");
  if (s.exterior().eps() != exterior.eps() || s.exterior().mu() != exterior.mu()) bad.push_back("exterior medium");
  if (s.order() != p) bad.push_back("p");
  if (s.mesh_fingerprint() != fingerprint) bad.push_back("fingerprint");
  if (bad.empty()) return;
  std::string msg = "cached scattering matrix does not match:";
  for (std::size_t i = 0; i < bad.size(); ++i) msg += (i ? ", " : " ") + bad[i];
  throw DomainError(msg);
}

}  // namespace fmps
