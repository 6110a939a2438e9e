#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "trunclab/ring.hpp"

namespace trunclab {

using Seed = std::array<std::uint8_t, 32>;

// keyed BLAKE2b-256 of the label under the seed; one ChaCha20 key per label
using StreamKey = std::array<std::uint8_t, 32>;
StreamKey derive_stream_key(const Seed& seed, std::string_view label);

// ChaCha20 keystream read as little-endian 64-bit words. Output at a given
// (seed, label, lane, counter) never depends on what was drawn before.
class RandomStream {
 public:
  RandomStream(const Seed& seed, std::string_view label, u64 lane = 0);
  RandomStream(const StreamKey& key, u64 lane);

  u64 next_u64();
  bool next_bit() { return (next_u64() & 1U) != 0; }
  u64 next_bits(unsigned bits) { return next_u64() & mask_bits(bits); }
  u64 next_ring(RingSpec r) { return r.reduce(next_u64()); }
  // uniform in [0, bound)
  u64 next_below(u64 bound);
  u64 next_nonzero(const PrimeFieldSpec& f);
  std::vector<std::uint32_t> permutation(std::size_t n);

  u64 counter() const { return counter_; }
  // same stream, positioned at pos
  RandomStream fork_at(u64 pos) const;

 private:
  void refill();
  StreamKey key_{};
  u64 lane_ = 0;
  u64 counter_ = 0;
  u64 block_ = ~u64{0};
  std::array<u64, 8> buf_{};
};

// one key per label, cheap per-lane streams
class StreamFactory {
 public:
  StreamFactory(const Seed& seed, std::string_view label)
      : key_(derive_stream_key(seed, label)) {}
  RandomStream lane(u64 l) const { return {key_, l}; }

 private:
  StreamKey key_;
};

enum class SeedId { s01, s02, s12, s012, s2 };

struct SeedSet {
  Seed seed01{}, seed02{}, seed12{}, seed012{}, seed2{};

  static SeedSet derive(u64 master, u64 index = 0);
  const Seed& get(SeedId id) const;
};

std::string_view seed_name(SeedId id);

}  // namespace trunclab
