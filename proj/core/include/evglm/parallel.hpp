#pragma once

#include <functional>

namespace evglm {

/// Worker count: hardware concurrency, capped by EVGLM_THREADS when set.
int worker_count();

/// Runs body(c) for c in [0, chunks). Callers write into per-chunk slots and
/// reduce in chunk order, so results do not depend on the worker count.
void for_each_chunk(int chunks, const std::function<void(int)>& body);

}  // namespace evglm
