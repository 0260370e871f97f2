#pragma once

#include <cstddef>
#include <functional>

namespace kamforge {

// Worker count: hardware concurrency, capped by KAMFORGE_THREADS when set.
unsigned thread_count();

// Runs body(i) for i in [0, count) on up to thread_count() workers using contiguous chunks.
// The body must not write shared state except through index-disjoint slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace kamforge
