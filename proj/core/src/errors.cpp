#include "mfvl/errors.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace mfvl {

namespace {
std::mutex sink_mutex;
WarningSink current_sink;
std::atomic<std::size_t> warnings{0};
}  // namespace

void set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex);
  current_sink = std::move(sink);
}

void warn(const std::string& message) {
  ++warnings;
  std::lock_guard lock(sink_mutex);
  if (current_sink) {
    current_sink(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

std::size_t warning_count() { return warnings.load(); }

}  // namespace mfvl
