#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace weylkit {

// Worker count: WEYLKIT_THREADS if set to a positive integer, else the
// hardware concurrency (at least 1).
int thread_count();

// Runs fn(i) for i in [0, n) on thread_count() workers.  The first exception
// thrown by any call is rethrown on the calling thread after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Fixed-order pairwise summation, independent of the thread count.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace weylkit
