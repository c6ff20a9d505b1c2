#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace nncdf {

// Deterministic parallel helpers.
//
// Work is split into chunks whose boundaries depend only on the range size,
// never on the thread count; each index writes to its own slot and reductions
// run in fixed index order (pairwise), so results are bit-identical for any
// thread count, including 1.

// Global worker count (1 = serial). Set once at startup (CLI --threads).
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs fn(i) for i in [begin, end). fn must only touch per-index state.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

// Pairwise (cascade) summation in fixed index order; deterministic and more
// accurate than sequential accumulation for long series.
double pairwise_sum(const double* values, std::size_t n);
double pairwise_sum(const std::vector<double>& values);

} // namespace nncdf
