#include "trunclab/random.hpp"

#include <sodium.h>

#include <cstring>

namespace trunclab {

namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw Error("libsodium failed to initialise");
}

}  // namespace

StreamKey derive_stream_key(const Seed& seed, std::string_view label) {
  ensure_sodium();
  StreamKey k{};
  crypto_generichash_blake2b(k.data(), k.size(),
                             reinterpret_cast<const unsigned char*>(label.data()), label.size(),
                             seed.data(), seed.size());
  return k;
}

RandomStream::RandomStream(const Seed& seed, std::string_view label, u64 lane)
    : key_(derive_stream_key(seed, label)), lane_(lane) {}

RandomStream::RandomStream(const StreamKey& key, u64 lane) : key_(key), lane_(lane) {
  ensure_sodium();
}

void RandomStream::refill() {
  // nonce = lane (LE) || 0^4, block counter = word position / 8
  std::array<unsigned char, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
  for (int i = 0; i < 8; ++i) nonce[i] = static_cast<unsigned char>(lane_ >> (8 * i));
  const u64 blk = counter_ / 8;
  if (blk > 0xffffffffULL) throw Error("random stream exhausted");
  std::array<unsigned char, 64> zeros{}, out{};
  crypto_stream_chacha20_ietf_xor_ic(out.data(), zeros.data(), out.size(), nonce.data(),
                                     static_cast<std::uint32_t>(blk), key_.data());
  for (int w = 0; w < 8; ++w) {
    u64 v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | out[8 * w + b];
    buf_[w] = v;
  }
  block_ = blk;
}

u64 RandomStream::next_u64() {
  if (counter_ / 8 != block_) refill();
  return buf_[counter_++ % 8];
}

u64 RandomStream::next_below(u64 bound) {
  if (bound == 0) throw ParameterError("next_below: empty range");
  if (bound == 1) return 0;
  const unsigned bits = 64 - static_cast<unsigned>(__builtin_clzll(bound - 1));
  for (;;) {
    const u64 v = next_bits(bits);
    if (v < bound) return v;
  }
}

u64 RandomStream::next_nonzero(const PrimeFieldSpec& f) {
  for (;;) {
    const u64 v = next_bits(f.width);
    if (v != 0 && v < f.p) return v;
  }
}

std::vector<std::uint32_t> RandomStream::permutation(std::size_t n) {
  std::vector<std::uint32_t> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(next_below(i));
    std::swap(pi[i - 1], pi[j]);
  }
  return pi;
}

RandomStream RandomStream::fork_at(u64 pos) const {
  RandomStream s(key_, lane_);
  s.counter_ = pos;
  return s;
}

SeedSet SeedSet::derive(u64 master, u64 index) {
  ensure_sodium();
  SeedSet s;
  auto one = [&](Seed& out, std::string_view name) {
    unsigned char in[16];
    for (int i = 0; i < 8; ++i) {
      in[i] = static_cast<unsigned char>(master >> (8 * i));
      in[8 + i] = static_cast<unsigned char>(index >> (8 * i));
    }
    crypto_generichash_blake2b(out.data(), out.size(), in, sizeof in,
                               reinterpret_cast<const unsigned char*>(name.data()), name.size());
  };
  one(s.seed01, "seed01");
  one(s.seed02, "seed02");
  one(s.seed12, "seed12");
  one(s.seed012, "seed012");
  one(s.seed2, "seed2");
  return s;
}

const Seed& SeedSet::get(SeedId id) const {
  switch (id) {
    case SeedId::s01: return seed01;
    case SeedId::s02: return seed02;
    case SeedId::s12: return seed12;
    case SeedId::s012: return seed012;
    case SeedId::s2: return seed2;
  }
  throw ParameterError("unknown seed id");
}

std::string_view seed_name(SeedId id) {
  switch (id) {
    case SeedId::s01: return "seed01";
    case SeedId::s02: return "seed02";
    case SeedId::s12: return "seed12";
    case SeedId::s012: return "seed012";
    case SeedId::s2: return "seed2";
  }
  return "?";
}

}  // namespace trunclab
