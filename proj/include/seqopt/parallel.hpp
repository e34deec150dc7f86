#pragma once

namespace seqopt {

/// Caps the worker threads used by the parallel kernels. n <= 0 restores the
/// runtime default. Results never depend on this setting.
void set_thread_count(int n);
int thread_count();

} // namespace seqopt
