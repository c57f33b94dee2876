#pragma once

#include <array>
#include <atomic>
#include <map>
#include <memory>
#include <shared_mutex>

#include "core/vswf.hpp"

namespace fmps {

/// Outgoing expansion about a source center -> regular expansion about a target
/// center displaced by d = target - source. Stored as one (2 K_t) x (2 K_s) matrix
/// whose quadrants are the (a, b) -> (gamma, delta) blocks.
struct TranslationOperator {
  int p_s = 0;
  int p_t = 0;
  Vec3 d = Vec3::Zero();
  double target_radius = 0.0;
  Medium medium;
  Eigen::MatrixXcd matrix;

  auto a_to_gamma() const { return matrix.topLeftCorner(mode_count(p_t), mode_count(p_s)); }
  auto b_to_gamma() const { return matrix.topRightCorner(mode_count(p_t), mode_count(p_s)); }
  auto a_to_delta() const { return matrix.bottomLeftCorner(mode_count(p_t), mode_count(p_s)); }
  auto b_to_delta() const { return matrix.bottomRightCorner(mode_count(p_t), mode_count(p_s)); }
};

/// Builds the operator column by column: every outgoing unit mode is evaluated on
/// the target sphere (radius target_radius about d) and projected onto regular modes.
/// Throws GeometryError when |d| <= target_radius.
TranslationOperator build_translation(const Vec3& d, const Medium& medium, int p_s, int p_t, double target_radius);

ModeCoeffs apply_translation(const TranslationOperator& t, const ModeCoeffs& outgoing);

/// Same, additionally rejecting coefficients that live in a different medium.
ModeCoeffs apply_translation(const TranslationOperator& t, const ModeCoeffs& outgoing, const Medium& medium);

/// Thread-safe memo of operators keyed by the displacement quantized to 1e-12 of the
/// target radius, the orders, the target radius and the medium. Each entry is built
/// from the quantized displacement, so the stored value does not depend on which
/// caller got there first.
class TranslationCache {
 public:
  std::shared_ptr<const TranslationOperator> get(const Vec3& d, const Medium& medium, int p_s, int p_t,
                                                 double target_radius);

  std::size_t size() const;
  std::size_t hits() const;
  void clear();

 private:
  using Key = std::array<long long, 11>;
  mutable std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const TranslationOperator>> entries_;
  std::atomic<std::size_t> hits_{0};
};

}  // namespace fmps
