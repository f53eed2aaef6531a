#pragma once

namespace facekit {

/// Caps the number of OpenMP threads used by the parallel kernels.
/// Values < 1 are ignored. No effect in builds without OpenMP.
void set_thread_cap(int threads);

/// Current maximum number of threads the kernels may use (1 without OpenMP).
int max_threads();

}  // namespace facekit
