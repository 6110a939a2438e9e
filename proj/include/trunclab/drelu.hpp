#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "trunclab/modswitch.hpp"
#include "trunclab/net.hpp"
#include "trunclab/sharing.hpp"

namespace trunclab {

// literal keeps the ladder in Z_{2^ellx}; guard_bit widens it to
// Z_{2^(ellx+1)} so negative inputs can never produce a zero v_i
enum class DreluMode { literal, guard_bit };

struct KeyBits {
  unsigned int_bits = 0;
  unsigned frac_bits = 0;
  unsigned ellx() const { return int_bits + frac_bits; }
};

struct DreluConfig {
  FixedPointSpec precision;
  DreluMode mode = DreluMode::guard_bit;
  std::optional<KeyBits> keybits;
  std::optional<RingSpec> out_ring;

  DreluConfig() = default;
  DreluConfig(FixedPointSpec fp, DreluMode m, std::optional<KeyBits> kb = std::nullopt,
              std::optional<RingSpec> out = std::nullopt);

  unsigned guard() const { return mode == DreluMode::guard_bit ? 1 : 0; }
  // low fraction bits dropped before the ladder
  unsigned drop_bits() const;
  // L: the ladder has L+1 rungs u_0..u_L
  unsigned ladder_bits() const;
  // ring of the share the ladder reads
  RingSpec ladder_ring() const;
  // width of the v domain
  unsigned domain_bits() const { return ladder_bits() + guard(); }
  PrimeFieldSpec field() const { return select_prime(domain_bits() + 1); }
  RingSpec output_ring() const { return out_ring.value_or(precision.ring); }
  // logical bits each of P0, P1 sends to P2 per input
  u64 bits_per_input() const { return (ladder_bits() + 1) * u64{field().width}; }
  void validate() const;
};

// largest key fraction that fits the ladder in ring ell (ell >= drop + 2L + guard)
std::optional<KeyBits> fit_keybits(const FixedPointSpec& fp, DreluMode mode);

// local deterministic truncation of the low (full.frac - key.frac) bits
u64 keybits_extract_local(PartyId p, u64 share, const FixedPointSpec& full, KeyBits key);
Share2 keybits_extract(const Share2& x, const FixedPointSpec& full, KeyBits key);

// rungs u_0..u_L of one share, no sign flip; each over Z_{2^domain_bits}
std::vector<u64> ladder_local(PartyId p, u64 share, const DreluConfig& cfg);
std::vector<Share2> truncation_ladder(const Share2& x, const DreluConfig& cfg);
// v_i = u_i + u_{i+1} - 1, v_L = u_L - 1; the constant is P0's
std::vector<u64> ladder_v_local(PartyId p, std::span<const u64> u, unsigned domain_bits);

// P0/P1 work before anything is sent: flip, ladder, switch, shuffle, mask, reshare.
struct DreluLocal {
  std::vector<u64> w;            // n * (L+1) field elements
  std::vector<std::uint8_t> t;  // flip bits (identical on P0 and P1)
};
DreluLocal drelu_local_kernel(PartyId p, std::span<const u64> x, const DreluConfig& cfg,
                              const Seed& seed01, u64 lane_base, Exec ex);

struct DreluLocalView {
  std::vector<std::uint8_t> t;
  std::vector<FieldShare> w;
};
DreluLocalView drelu_local_phase(std::span<const Share2> x, const DreluConfig& cfg,
                                 const SeedSet& seeds, u64 lane_base = 0,
                                 Exec ex = Exec::parallel);

// P2: 1 iff some w_i opens to zero
std::vector<std::uint8_t> drelu_assist(std::span<const u64> w0, std::span<const u64> w1,
                                       const PrimeFieldSpec& f, unsigned per_input);

Local2 drelu_ubl(Party& p, const Local2& x, const DreluConfig& cfg);
Local2 relu_ubl(Party& p, const Local2& x, const DreluConfig& cfg);
LocalRss drelu_rss(Party& p, const LocalRss& x, const DreluConfig& cfg);
LocalRss relu_rss(Party& p, const LocalRss& x, const DreluConfig& cfg);

}  // namespace trunclab
