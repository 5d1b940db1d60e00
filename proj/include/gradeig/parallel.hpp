#pragma once

#include <cstddef>
#include <functional>

namespace gradeig {

/// Worker count used by parallel_for. Defaults to 1.
void set_num_threads(unsigned n);
unsigned num_threads();

/// Runs body(i) for i in [0, n). Each index is processed exactly once; the
/// caller is responsible for writing results into per-index slots so that
/// any reduction happens afterwards in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gradeig
