#pragma once

#include <cstddef>
#include <functional>

namespace multiren {

/// Worker count used when a caller passes 0. Starts at the hardware
/// concurrency; the CLI overrides it with --threads.
int default_threads();
void set_default_threads(int threads);

/// Calls body(i) for i in [0, count) on up to `threads` workers. Indices are
/// handed out dynamically, so body must only write to slot i of its output.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int threads = 0);

}  // namespace multiren
