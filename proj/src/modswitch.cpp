#include "trunclab/modswitch.hpp"

namespace trunclab {

u64 mod_switch_local(PartyId p, u64 share, unsigned lp, const PrimeFieldSpec& f) {
  if (lp >= 64 || f.p <= (u64{1} << lp)) throw ParameterError("mod_switch: need p > 2^l'");
  const u64 two = u64{1} << lp;
  share &= two - 1;
  if (p == PartyId::P0) return share == 0 ? two % f.p : share % f.p;
  return (f.p + share - two) % f.p;
}

FieldShare mod_switch(const Share2& x, const PrimeFieldSpec& f) {
  const unsigned lp = x.ring().ell;
  return {mod_switch_local(PartyId::P0, x.part0.value(), lp, f),
          mod_switch_local(PartyId::P1, x.part1.value(), lp, f), f};
}

u64 open_field(const FieldShare& s) { return s.field.add(s.part0, s.part1); }

}  // namespace trunclab
