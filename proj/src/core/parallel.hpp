#pragma once

#include <cstddef>
#include <functional>

namespace fmps {

/// Runs f(i) for i in [0, n) on up to `workers` threads with static blocks.
/// The first exception by index is rethrown after all threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& f);

}  // namespace fmps
