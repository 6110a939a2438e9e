#include "trunclab/ring.hpp"

#include <cmath>

namespace trunclab {

RingSpec::RingSpec(unsigned bits) : ell(bits) {
  if (bits < 1 || bits > 64) throw ParameterError("ring width must be in [1, 64]");
}

i64 RingSpec::to_signed(u64 v) const {
  v = reduce(v);
  if (ell == 64) return static_cast<i64>(v);
  if (msb(v)) return static_cast<i64>(v) - static_cast<i64>(u64{1} << ell);
  return static_cast<i64>(v);
}

void RingElement::check(const RingElement& o) const {
  if (!(ring_ == o.ring_)) throw SpecMismatch("ring elements from different rings");
}

RingElement RingElement::operator+(const RingElement& o) const {
  check(o);
  return {ring_.add(value_, o.value_), ring_};
}

RingElement RingElement::operator-(const RingElement& o) const {
  check(o);
  return {ring_.sub(value_, o.value_), ring_};
}

RingElement RingElement::operator*(const RingElement& o) const {
  check(o);
  return {ring_.mul(value_, o.value_), ring_};
}

FixedPointSpec::FixedPointSpec(RingSpec r, unsigned ib, unsigned fb)
    : ring(r), int_bits(ib), frac_bits(fb) {
  if (ib + fb < 1 || ib + fb >= r.ell)
    throw ParameterError("fixed-point band needs 1 <= int+frac < ell");
}

bool FixedPointSpec::in_band(u64 v) const {
  v = ring.reduce(v);
  const u64 lim = u64{1} << ellx();
  if (v < lim) return true;
  return ring.neg(v) < lim;
}

RingElement encode_fixed(double r, const FixedPointSpec& fp) {
  if (!std::isfinite(r)) throw RangeError("non-finite value");
  if (std::fabs(r) >= std::ldexp(1.0, static_cast<int>(fp.int_bits)))
    throw RangeError("value outside the integer range");
  const double scaled = std::round(std::ldexp(r, static_cast<int>(fp.frac_bits)));
  if (std::fabs(scaled) >= std::ldexp(1.0, static_cast<int>(fp.ellx())))
    throw RangeError("rounded value outside the band");
  return {fp.ring.from_signed(static_cast<i64>(scaled)), fp.ring};
}

double decode_fixed(const RingElement& e, const FixedPointSpec& fp) {
  if (!(e.ring() == fp.ring)) throw SpecMismatch("element ring differs from spec ring");
  if (!fp.in_band(e.value())) throw PrecisionError("value outside the legal band");
  return std::ldexp(static_cast<double>(fp.ring.to_signed(e.value())),
                    -static_cast<int>(fp.frac_bits));
}

u64 magnitude(u64 x, RingSpec r) {
  x = r.reduce(x);
  return r.msb(x) ? r.neg(x) : x;
}

u64 cut(u64 a, unsigned k, RingSpec r) {
  if (k > r.ell) throw ParameterError("cut: k exceeds ring width");
  if (k >= 64) return 0;
  return r.reduce(a) >> k;
}

u64 cut_mid(u64 a, unsigned k1, unsigned k2, RingSpec r) {
  if (k1 + k2 > r.ell) throw ParameterError("cut_mid: k1 + k2 exceeds ring width");
  if (k1 + k2 == r.ell) return 0;
  return (r.reduce(a) >> k1) & mask_bits(r.ell - k1 - k2);
}

RingElement cut(const RingElement& a, unsigned k) {
  return {cut(a.value(), k, a.ring()), a.ring()};
}

RingElement cut_mid(const RingElement& a, unsigned k1, unsigned k2) {
  return {cut_mid(a.value(), k1, k2, a.ring()), a.ring()};
}

namespace {

u64 powmod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = static_cast<u64>(u128{r} * b % m);
    b = static_cast<u64>(u128{b} * b % m);
    e >>= 1;
  }
  return r;
}

}  // namespace

// deterministic Miller-Rabin, these bases cover all 64-bit n
bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = static_cast<u64>(u128{x} * x % n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeFieldSpec select_prime(unsigned width) {
  if (width < 2 || width > 63) throw ParameterError("prime width must be in [2, 63]");
  u64 c = (u64{1} << (width - 1)) + 1;
  while (!is_prime(c)) ++c;
  return {c, width};
}

std::string to_binary(u64 v, unsigned bits) {
  std::string s(bits, '0');
  for (unsigned i = 0; i < bits; ++i)
    if ((v >> i) & 1U) s[bits - 1 - i] = '1';
  return s;
}

}  // namespace trunclab
