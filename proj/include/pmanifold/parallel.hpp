#pragma once

#include <cstddef>
#include <functional>

namespace pmanifold {

/// Number of worker threads used by library loops; 0 selects
/// std::thread::hardware_concurrency().
void set_thread_count(std::size_t threads);
std::size_t thread_count();

/// Runs body(i) for i in [0, count). Each index must write only to its own
/// output slot, so results do not depend on scheduling. The first exception
/// thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace pmanifold
