#pragma once

#include "sensas/linsolve.hpp"
#include "sensas/types.hpp"

#include <exception>
#include <numeric>
#include <vector>

namespace sensas::detail {

// Runs body(i) for i in [0, count). Under Execution::parallel the iterations
// are spread over OpenMP threads; the first exception thrown by any iteration
// is rethrown on the calling thread after the loop.
template <typename Body>
void for_each_index(Execution exec, Index count, Body&& body) {
  if (exec == Execution::serial || count < 2) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(sensas_for_each_index)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Sum of per-iteration ledgers, in index order.
inline SolveLedger merge(const std::vector<SolveLedger>& parts) {
  return std::accumulate(parts.begin(), parts.end(), SolveLedger{});
}

}  // namespace sensas::detail
