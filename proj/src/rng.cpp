#include "tcmv/rng.hpp"

#include <cmath>

namespace tcmv::rng {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::array<double, 2> normal_pair(std::uint64_t seed, Stream stream, std::uint32_t period,
                                  std::uint64_t index, std::uint32_t slot) {
  const auto words = raw_block(seed, stream, period, index, slot);
  const double u1 = to_unit_open(join(words[0], words[1]));
  const double u2 = to_unit_open(join(words[2], words[3]));
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

void fill_normals(std::uint64_t seed, Stream stream, std::uint32_t period, std::uint64_t index,
                  double* out, int n) {
  for (int k = 0; k < n; k += 2) {
    const auto z = normal_pair(seed, stream, period, index, static_cast<std::uint32_t>(k / 2));
    out[k] = z[0];
    if (k + 1 < n) out[k + 1] = z[1];
  }
}

std::uint64_t uniform_index(std::uint64_t seed, Stream stream, std::uint32_t period,
                            std::uint64_t index, std::uint64_t bound) {
  const auto words = raw_block(seed, stream, period, index, 0x1Du);
  const double u = to_unit_open(join(words[0], words[1]));
  auto k = static_cast<std::uint64_t>(u * static_cast<double>(bound));
  return k < bound ? k : bound - 1;
}

}  // namespace tcmv::rng
