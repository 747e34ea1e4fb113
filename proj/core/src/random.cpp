#include "lmdp/random.hpp"

#include <cmath>

namespace lmdp {

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                          std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(parent ^ mix64(hash_label(label)));
  for (std::uint64_t c : coords) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

double RandomStream::normal() {
  // Box-Muller; one value per call keeps the stream position simple to reason about.
  double u1 = uniform();
  double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace lmdp
