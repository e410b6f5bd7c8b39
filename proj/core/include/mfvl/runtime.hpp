#pragma once

namespace mfvl {

/// Thread count for the BLAS/LAPACK backend. FFTs and the solvers' own loops
/// are serial, so results do not depend on it beyond BLAS reduction order.
void set_thread_count(int threads);
int thread_count();

}  // namespace mfvl
