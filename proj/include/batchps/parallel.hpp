#pragma once

#include <cstddef>
#include <functional>

namespace batchps {

// Runs fn(i) for i in [0,n). Work is split into contiguous chunks; results
// must be written to per-index slots so the outcome is independent of
// scheduling. threads == 1 (or small n) runs inline.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

unsigned default_threads();

}  // namespace batchps
