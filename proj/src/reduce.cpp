#include "fincap/reduce.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fincap {

double pairwise_sum(std::span<const double> partials) {
  if (partials.empty()) return 0.0;
  std::vector<double> work(partials.begin(), partials.end());
  std::size_t n = work.size();
  while (n > 1) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) work[i] = work[2 * i] + work[2 * i + 1];
    if (n % 2 == 1) {
      work[half] = work[n - 1];
      n = half + 1;
    } else {
      n = half;
    }
  }
  return work[0];
}

double ordered_sum(std::span<const double> values) {
  const std::size_t nb = (values.size() + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = b * kReduceBlock;
    const std::size_t hi = std::min(values.size(), lo + kReduceBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    partial[b] = s;
  }
  return pairwise_sum(partial);
}

double ordered_sum_parallel(std::span<const double> values) {
  const std::ptrdiff_t nb =
      static_cast<std::ptrdiff_t>((values.size() + kReduceBlock - 1) / kReduceBlock);
  std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = std::min(values.size(), lo + kReduceBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  return pairwise_sum(partial);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace fincap
