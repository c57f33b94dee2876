#include "core/translate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <string>

namespace fmps {

namespace {

// Grid order large enough that source content aliasing onto degrees <= p_t stays at roundoff.
int translation_grid_order(const Vec3& d, const Medium& medium, int p_s, int p_t, double radius) {
  const double ratio = d.norm() / radius;
  const int tail = static_cast<int>(std::ceil(36.0 / std::log(ratio)));
  const int content = p_s + static_cast<int>(std::ceil(std::abs(medium.k()) * radius)) + tail;
  const int q = static_cast<int>(std::ceil((p_t + content + 1) / 2.0));
  return std::clamp(q, 2 * p_t + 4, 4 * p_t + 60);
}

long long bits_of(double v) { return std::bit_cast<long long>(v); }

}  // namespace

TranslationOperator build_translation(const Vec3& d, const Medium& medium, int p_s, int p_t, double target_radius) {
  if (p_s < 0 || p_t < 0) throw DomainError("build_translation: negative order");
  if (!(target_radius > 0.0)) throw DomainError("build_translation: target radius must be positive");
  if (!(d.norm() > target_radius)) {
    throw GeometryError("build_translation: |d| = " + std::to_string(d.norm()) +
                        " does not exceed the target radius " + std::to_string(target_radius));
  }

  // The regular coefficients do not depend on the projection radius; shrink it if the
  // requested one sits on an interior resonance.
  double radius = target_radius;
  for (int attempt = 0; attempt < 30; ++attempt) {
    if (projection_conditioning(p_t, FieldKind::Regular, medium.k() * radius).worst >= 1e-8) break;
    radius *= 0.9;
  }
  const int order = translation_grid_order(d, medium, p_s, p_t, radius);
  const SurfaceProjector proj(medium, d, radius, p_t, FieldKind::Regular, order);

  // Accumulate projector * fields over node chunks to bound memory at high order.
  constexpr std::size_t kChunk = 256;
  Eigen::MatrixXcd matrix = Eigen::MatrixXcd::Zero(2 * mode_count(p_t), 2 * mode_count(p_s));
  ModeFieldBlock blk;
  for (std::size_t first = 0; first < proj.node_count(); first += kChunk) {
    const std::size_t count = std::min(kChunk, proj.node_count() - first);
    Eigen::MatrixXcd fields(3 * static_cast<Eigen::Index>(count), 2 * mode_count(p_s));
    for (std::size_t i = 0; i < count; ++i) {
      mode_fields(p_s, FieldKind::Outgoing, medium, Vec3::Zero(), proj.nodes()[first + i], blk, false);
      fields.middleRows<3>(3 * static_cast<Eigen::Index>(i)) = blk.e;
    }
    matrix.noalias() += proj.e_matrix(first, count) * fields;
  }

  TranslationOperator t;
  t.p_s = p_s;
  t.p_t = p_t;
  t.d = d;
  t.target_radius = target_radius;
  t.medium = medium;
  t.matrix = std::move(matrix);
  return t;
}

ModeCoeffs apply_translation(const TranslationOperator& t, const ModeCoeffs& outgoing) {
  if (outgoing.p != t.p_s) {
    throw DomainError("apply_translation: operator expects p = " + std::to_string(t.p_s) + ", got " +
                      std::to_string(outgoing.p));
  }
  ModeCoeffs out(t.p_t);
  out.data.noalias() = t.matrix * outgoing.data;
  return out;
}

ModeCoeffs apply_translation(const TranslationOperator& t, const ModeCoeffs& outgoing, const Medium& medium) {
  if (!t.medium.same_as(medium)) throw DomainError("apply_translation: medium mismatch");
  return apply_translation(t, outgoing);
}

std::shared_ptr<const TranslationOperator> TranslationCache::get(const Vec3& d, const Medium& medium, int p_s,
                                                                 int p_t, double target_radius) {
  const double quantum = 1e-12 * target_radius;
  Key key{std::llround(d.x() / quantum),
          std::llround(d.y() / quantum),
          std::llround(d.z() / quantum),
          p_s,
          p_t,
          bits_of(target_radius),
          bits_of(medium.omega()),
          bits_of(medium.eps().real()),
          bits_of(medium.eps().imag()),
          bits_of(medium.mu().real()),
          bits_of(medium.mu().imag())};
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  const Vec3 dq(key[0] * quantum, key[1] * quantum, key[2] * quantum);
  auto op = std::make_shared<const TranslationOperator>(build_translation(dq, medium, p_s, p_t, target_radius));
  std::unique_lock lock(mutex_);
  return entries_.emplace(key, std::move(op)).first->second;
}

std::size_t TranslationCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::size_t TranslationCache::hits() const { return hits_.load(); }

void TranslationCache::clear() {
  std::unique_lock lock(mutex_);
  entries_.clear();
  hits_ = 0;
}

}  // namespace fmps
