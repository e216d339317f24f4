#include "specbreak/parallel.hpp"

#include <cstdlib>
#include <string>

namespace specbreak {

int default_workers() {
  if (const char* env = std::getenv("SPECBREAK_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int resolve_workers(int requested) { return requested > 0 ? requested : default_workers(); }

}  // namespace specbreak
