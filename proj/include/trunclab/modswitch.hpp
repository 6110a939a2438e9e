#pragma once

#include "trunclab/net.hpp"
#include "trunclab/sharing.hpp"

namespace trunclab {

struct FieldShare {
  u64 part0 = 0, part1 = 0;
  PrimeFieldSpec field;
};

// Z_{2^lp} -> Z_p, p > 2^lp. Zero maps to zero; nonzero x maps to x or x + p - 2^lp.
// P0: p0 == 0 ? 2^lp mod p : p0 mod p.  P1: (p + p1 - 2^lp) mod p.
u64 mod_switch_local(PartyId p, u64 share, unsigned lp, const PrimeFieldSpec& f);
FieldShare mod_switch(const Share2& x, const PrimeFieldSpec& f);
u64 open_field(const FieldShare& s);

}  // namespace trunclab
