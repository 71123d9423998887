#pragma once

#include <cstdint>
#include <functional>

namespace bridgelab {

/// Worker count: `requested` if positive, else BRIDGELAB_WORKERS, else the
/// hardware concurrency.
int resolve_workers(int requested = 0);

/// SplitMix64 finaliser; used to derive one RNG seed per block of work.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream);

constexpr long long kBlockSize = 1024;

/// Split [0, n) into fixed blocks of kBlockSize and run fn(block, begin, end)
/// on up to `workers` threads. Block boundaries do not depend on the worker
/// count, so per-block seeding gives worker-independent results.
void for_each_block(long long n, int workers,
                    const std::function<void(long long block, long long begin, long long end)>& fn);

}  // namespace bridgelab
