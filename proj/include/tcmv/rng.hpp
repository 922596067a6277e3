#pragma once

#include <array>
#include <cstdint>

// Counter-based random streams (Philox4x32-10). Every draw is a pure function
// of (seed, counter words), so scenario generation and path simulation give
// identical output no matter how the work is scheduled across threads.

namespace tcmv::rng {

struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kKeyBump0 = 0x9E3779B9u;
  static constexpr std::uint32_t kKeyBump1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round != 0) {
        key[0] += kKeyBump0;
        key[1] += kKeyBump1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

// Independent sub-streams of one seed. Keeping solver scenarios, simulation
// paths and test perturbations on distinct tags means they never share draws.
enum class Stream : std::uint32_t {
  scenarios = 0,
  simulation = 1,
  bootstrap = 2,
  perturbation = 3,
};

inline std::array<std::uint32_t, 4> raw_block(std::uint64_t seed, Stream stream,
                                              std::uint32_t period, std::uint64_t index,
                                              std::uint32_t slot) {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(index),
      static_cast<std::uint32_t>(index >> 32),
      (static_cast<std::uint32_t>(stream) << 24) | (period & 0xFFFFFFu),
      slot,
  };
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  return Philox4x32::block(ctr, key);
}

// Maps a 64-bit word to (0, 1); both endpoints are excluded so the value is
// always safe inside log().
inline double to_unit_open(std::uint64_t word) {
  return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// Two standard normals per counter block via Box-Muller.
std::array<double, 2> normal_pair(std::uint64_t seed, Stream stream, std::uint32_t period,
                                  std::uint64_t index, std::uint32_t slot);

// Fills out[0..n) with standard normals tied to (seed, stream, period, index).
void fill_normals(std::uint64_t seed, Stream stream, std::uint32_t period, std::uint64_t index,
                  double* out, int n);

// Uniform integer in [0, bound) for bootstrap resampling.
std::uint64_t uniform_index(std::uint64_t seed, Stream stream, std::uint32_t period,
                            std::uint64_t index, std::uint64_t bound);

}  // namespace tcmv::rng
