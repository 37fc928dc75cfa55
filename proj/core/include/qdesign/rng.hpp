#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace qdesign {

// Philox4x32-10 counter-based generator. A stream is identified by
// (seed, stream): the seed is the key and the stream index occupies the top
// half of the counter, so trial t of a simulation draws the same numbers no
// matter which thread runs it.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  static Block block(Block counter, Key key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  Key key_;
  Block counter_;
  Block buffer_{};
  int used_ = 4;
};

}  // namespace qdesign
