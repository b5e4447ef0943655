#pragma once

#include <cstddef>
#include <functional>

namespace fulldit {

// Worker cap: min(hardware_concurrency, FULLDIT_THREADS) with FULLDIT_THREADS
// read once at first use. Always >= 1.
size_t worker_count();

// Runs fn(i) for i in [0, n). Work is split across at most worker_count()
// threads; each index writes only its own outputs, so callers get
// deterministic results as long as they reduce in index order.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace fulldit
