#include "wat/memory.hpp"

#include <atomic>

namespace wat::memory {
namespace {

std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};
std::atomic<std::size_t> g_allocations{0};

}  // namespace

WeightStorageStats weight_storage_stats() noexcept {
    return {g_live.load(), g_peak.load(), g_allocations.load()};
}

void reset_weight_storage_peak() noexcept { g_peak.store(g_live.load()); }

namespace detail {

void record_allocation(std::size_t bytes) noexcept {
    g_allocations.fetch_add(1, std::memory_order_relaxed);
    const std::size_t live = g_live.fetch_add(bytes) + bytes;
    std::size_t peak = g_peak.load();
    while (live > peak && !g_peak.compare_exchange_weak(peak, live)) {
    }
}

void record_deallocation(std::size_t bytes) noexcept { g_live.fetch_sub(bytes); }

}  // namespace detail
}  // namespace wat::memory
