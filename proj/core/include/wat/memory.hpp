#pragma once

#include <cstddef>
#include <memory>

namespace wat::memory {

// Byte counters for weight-vector storage. Every WeightVector allocates through
// TrackingAllocator, so these numbers bound how many dense model copies a run
// holds at once.
struct WeightStorageStats {
    std::size_t live_bytes = 0;
    std::size_t peak_bytes = 0;
    std::size_t allocations = 0;
};

WeightStorageStats weight_storage_stats() noexcept;

// Sets peak to the current live byte count.
void reset_weight_storage_peak() noexcept;

namespace detail {
void record_allocation(std::size_t bytes) noexcept;
void record_deallocation(std::size_t bytes) noexcept;
}  // namespace detail

template <typename T>
struct TrackingAllocator {
    using value_type = T;

    TrackingAllocator() noexcept = default;
    template <typename U>
    TrackingAllocator(const TrackingAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        T* p = std::allocator<T>{}.allocate(n);
        detail::record_allocation(n * sizeof(T));
        return p;
    }

    void deallocate(T* p, std::size_t n) noexcept {
        detail::record_deallocation(n * sizeof(T));
        std::allocator<T>{}.deallocate(p, n);
    }

    template <typename U>
    bool operator==(const TrackingAllocator<U>&) const noexcept { return true; }
};

}  // namespace wat::memory
