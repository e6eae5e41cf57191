#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fincap {

/// Sums a span in a fixed order: consecutive blocks of kBlock values are
/// accumulated left to right, then the block sums are combined pairwise.
/// The result depends only on the data, never on how many threads
/// produced it.
double ordered_sum(std::span<const double> values);

/// Same block layout as ordered_sum, with the per-block partial sums
/// computed in parallel when OpenMP is available.
double ordered_sum_parallel(std::span<const double> values);

inline constexpr std::size_t kReduceBlock = 1024;

/// Pairwise combination of already computed partials.
double pairwise_sum(std::span<const double> partials);

/// Number of OpenMP worker threads (1 without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace fincap
