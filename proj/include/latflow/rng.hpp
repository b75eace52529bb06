#pragma once

#include <array>
#include <cstdint>

namespace latflow {

/// Philox4x32-10 counter-based generator. A draw is a pure function of
/// (key, counter), so sample i of stream k is the same on any thread.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const {
    Key k = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = round_once(ctr, k);
      k[0] += kW0;
      k[1] += kW1;
    }
    return ctr;
  }

  /// Uniform double in [0, 1) with 53 random bits for (index, stream).
  double uniform(std::uint64_t index, std::uint32_t stream = 0, std::uint32_t draw = 0) const {
    const Counter out = (*this)(Counter{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                        stream, draw});
    const std::uint64_t hi = out[0] >> 5;  // 27 bits
    const std::uint64_t lo = out[1] >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * 0x1p-53;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57;
  static constexpr std::uint32_t kW0 = 0x9E3779B9;
  static constexpr std::uint32_t kW1 = 0xBB67AE85;

  static Counter round_once(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }

  Key key_;
};

}  // namespace latflow
