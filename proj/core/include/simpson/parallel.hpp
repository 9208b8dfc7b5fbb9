#pragma once

#include <cstddef>
#include <functional>

namespace simpson {

// Worker count: hardware concurrency, capped by SIMPSON_SCOPE_THREADS when set.
std::size_t thread_budget();

// Runs body(shard) for shard in [0, shards) on up to thread_budget() threads.
// Callers own result slots per shard and merge them in index order.
void parallel_shards(std::size_t shards, const std::function<void(std::size_t)>& body);

}  // namespace simpson
