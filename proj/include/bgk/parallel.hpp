#pragma once

#include <functional>
#include <vector>

namespace bgk {

// Process-wide worker cap for sweep parallelism. Results are always reduced
// in index order, so the count never affects output bytes.
void set_worker_count(int workers);
int worker_count();

// Runs fn(i) for i in [0, count) across workers. fn must be safe to call
// concurrently for distinct i.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace bgk
