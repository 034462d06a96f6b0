#pragma once

#include <cstddef>
#include <functional>

namespace biphoton {

/// Caps worker threads for block-parallel loops. 0 restores auto
/// (hardware concurrency). Honors the BIPHOTON_SIM_THREADS convention
/// when the CLI applies it at startup.
void set_max_threads(int n);
int max_threads();

/// Runs fn(begin, end) over fixed-size blocks of [0, n). Each index is
/// written by exactly one worker and block boundaries do not depend on the
/// thread count, so results are bitwise reproducible for any thread setting.
void parallel_for_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace biphoton
