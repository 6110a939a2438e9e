#pragma once

#include <cstdint>
#include <string>

#include "trunclab/errors.hpp"

namespace trunclab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline constexpr u64 mask_bits(unsigned bits) {
  return bits >= 64 ? ~u64{0} : ((u64{1} << bits) - 1);
}

// Z_{2^ell}. Widths below 2 only show up as ladder domains for tiny bands.
struct RingSpec {
  unsigned ell = 64;

  RingSpec() = default;
  explicit RingSpec(unsigned bits);

  u64 mask() const { return mask_bits(ell); }
  u64 reduce(u64 v) const { return v & mask(); }
  u64 add(u64 a, u64 b) const { return (a + b) & mask(); }
  u64 sub(u64 a, u64 b) const { return (a - b) & mask(); }
  u64 mul(u64 a, u64 b) const { return (a * b) & mask(); }
  u64 neg(u64 a) const { return (u64{0} - a) & mask(); }
  // two's complement view
  i64 to_signed(u64 v) const;
  u64 from_signed(i64 v) const { return static_cast<u64>(v) & mask(); }
  // the sign bit set
  bool msb(u64 v) const { return ((v >> (ell - 1)) & 1U) != 0; }

  bool operator==(const RingSpec&) const = default;
};

class RingElement {
 public:
  RingElement() = default;
  RingElement(u64 v, RingSpec r) : value_(r.reduce(v)), ring_(r) {}

  u64 value() const { return value_; }
  RingSpec ring() const { return ring_; }

  RingElement operator+(const RingElement& o) const;
  RingElement operator-(const RingElement& o) const;
  RingElement operator*(const RingElement& o) const;
  RingElement operator-() const { return {ring_.neg(value_), ring_}; }
  bool operator==(const RingElement& o) const {
    return ring_ == o.ring_ && value_ == o.value_;
  }

 private:
  void check(const RingElement& o) const;
  u64 value_ = 0;
  RingSpec ring_;
};

// ell total bits, int_bits + frac_bits = ellx magnitude bits. Encoding only
// needs ellx < ell; the truncation analysis also wants the slack ellx + 1 < ell.
struct FixedPointSpec {
  RingSpec ring;
  unsigned int_bits = 0;
  unsigned frac_bits = 0;

  FixedPointSpec() = default;
  FixedPointSpec(RingSpec r, unsigned ib, unsigned fb);

  unsigned ellx() const { return int_bits + frac_bits; }
  bool has_slack() const { return ellx() + 1 < ring.ell; }
  // positive band [0, 2^ellx), negative band (2^ell - 2^ellx, 2^ell)
  bool in_band(u64 v) const;
  bool operator==(const FixedPointSpec&) const = default;
};

struct PrimeFieldSpec {
  u64 p = 0;
  unsigned width = 0;

  u64 add(u64 a, u64 b) const { return static_cast<u64>((u128{a} + b) % p); }
  u64 sub(u64 a, u64 b) const { return add(a, p - b % p); }
  u64 mul(u64 a, u64 b) const { return static_cast<u64>((u128{a} * b) % p); }
  bool operator==(const PrimeFieldSpec&) const = default;
};

RingElement encode_fixed(double r, const FixedPointSpec& fp);
double decode_fixed(const RingElement& e, const FixedPointSpec& fp);

// magnitude: x for the positive band, 2^ell - x for the negative one
u64 magnitude(u64 x, RingSpec r);

// logical shift, a >> k
u64 cut(u64 a, unsigned k, RingSpec r);
// bits [k1, ell - k2) of a, shifted down
u64 cut_mid(u64 a, unsigned k1, unsigned k2, RingSpec r);
RingElement cut(const RingElement& a, unsigned k);
RingElement cut_mid(const RingElement& a, unsigned k1, unsigned k2);

inline bool lt(u64 a, u64 b) { return a < b; }

bool is_prime(u64 n);
// smallest prime above 2^(width-1); it is below 2^width
PrimeFieldSpec select_prime(unsigned width);

std::string to_binary(u64 v, unsigned bits);

}  // namespace trunclab
