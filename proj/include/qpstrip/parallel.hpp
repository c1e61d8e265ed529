#pragma once

#include <exception>

#include <omp.h>

namespace qps {

// Serial runs are the reference; parallel runs must reproduce them exactly.
enum class Exec { Serial, Parallel };

// Runs f(i) for i in [0, n). Each index writes only its own result slot, so the
// outcome does not depend on scheduling. The first exception thrown is rethrown.
template <class F>
void for_each_index(long n, Exec exec, F&& f) {
  if (exec == Exec::Serial || n < 2) {
    for (long i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
#pragma omp critical(qps_for_each_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

inline void set_jobs(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

}  // namespace qps
