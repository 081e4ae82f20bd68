#include "dlp/parallel.hpp"

#include <memory>

#include <tbb/global_control.h>

namespace dlp {

void set_max_threads(std::size_t n) {
  static std::unique_ptr<tbb::global_control> control;
  control.reset();
  if (n > 0) {
    control = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, n);
  }
}

}  // namespace dlp
