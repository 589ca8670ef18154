#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11) and a small
// stream wrapper. A stream is addressed by (seed, substream); replica r of an
// experiment uses substream r, so its draws never depend on other replicas.
//
// Counter layout: words 0-1 hold the block index, words 2-3 the substream.
// Key: the 64-bit seed split into two 32-bit words.

#include <array>
#include <cstdint>

namespace circgossip {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr int kRounds = 10;

  static constexpr Block generate(Block ctr, Key key) {
    ctr = round(ctr, key);
    for (int r = 1; r < kRounds; ++r) {
      key[0] += kW0;
      key[1] += kW1;
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static constexpr Block round(const Block& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

class RandomStream {
 public:
  RandomStream() : RandomStream(0, 0) {}
  RandomStream(std::uint64_t seed, std::uint64_t substream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        substream_(substream) {}

  std::uint64_t seed() const {
    return static_cast<std::uint64_t>(key_[1]) << 32 | key_[0];
  }
  std::uint64_t substream() const { return substream_; }
  /// Number of 32-bit words consumed so far.
  std::uint64_t position() const { return block_ * 4 + lane_ - 4; }

  std::uint32_t next_u32() {
    if (lane_ == 4) {
      refill();
    }
    return buffer_[lane_++];
  }

  /// Unbiased integer in [0, n), n >= 1 (Lemire's multiply-and-reject).
  std::uint32_t uniform_index(std::uint32_t n) {
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
    auto low = static_cast<std::uint32_t>(m);
    if (low < n) {
      const std::uint32_t threshold = (0u - n) % n;
      while (low < threshold) {
        m = static_cast<std::uint64_t>(next_u32()) * n;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  /// Double in [0, 1) with 53 random bits (two words).
  double uniform_unit() {
    const std::uint64_t a = next_u32() >> 5;  // 27 bits
    const std::uint64_t b = next_u32() >> 6;  // 26 bits
    return static_cast<double>(a << 26 | b) * 0x1.0p-53;
  }

  bool fair_bit() { return (next_u32() >> 31) != 0; }

  bool operator==(const RandomStream&) const = default;

 private:
  void refill() {
    const Philox4x32::Block ctr{static_cast<std::uint32_t>(block_),
                                static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(substream_),
                                static_cast<std::uint32_t>(substream_ >> 32)};
    buffer_ = Philox4x32::generate(ctr, key_);
    ++block_;
    lane_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  Philox4x32::Block buffer_{};
  unsigned lane_ = 4;
};

}  // namespace circgossip
