#include "lmdp/parallel.hpp"

#include <cstdlib>
#include <string>

namespace lmdp {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LMDP_NPG_WORKERS")) {
    try {
      int w = std::stoi(env);
      if (w > 0) return w;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace lmdp
