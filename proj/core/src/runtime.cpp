#include "mfvl/runtime.hpp"

#include "mfvl/errors.hpp"

extern "C" void openblas_set_num_threads(int);

namespace mfvl {

namespace {
int g_threads = 1;
}

void set_thread_count(int threads) {
  require(threads >= 1, "thread count must be at least 1");
  g_threads = threads;
  openblas_set_num_threads(threads);
}

int thread_count() { return g_threads; }

}  // namespace mfvl
