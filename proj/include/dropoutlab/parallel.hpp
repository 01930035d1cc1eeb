#pragma once

#include <cstddef>
#include <functional>

namespace dropoutlab {

/// Worker count: hardware concurrency, capped by DROPOUTLAB_THREADS when set.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) across workers. Each index is written by
/// exactly one task, so results stored by index merge deterministically. The
/// exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace dropoutlab
