#include <gtest/gtest.h>

#include <cmath>

#include "trunclab/ring.hpp"

using namespace trunclab;

namespace {

// shift-and-mask reference, written independently of ring.cpp
u64 ref_mid(u64 a, unsigned k1, unsigned k2, unsigned ell) {
  u64 out = 0;
  for (unsigned i = k1; i + k2 < ell; ++i) out |= ((a >> i) & 1U) << (i - k1);
  return out;
}

}  // namespace

TEST(Ring, WrapsAtWidth) {
  const RingSpec r(8);
  EXPECT_EQ(r.add(200, 100), 44U);
  EXPECT_EQ(r.sub(3, 5), 254U);
  EXPECT_EQ(r.mul(16, 16), 0U);
  EXPECT_EQ(r.neg(1), 255U);
  EXPECT_EQ(r.to_signed(255), -1);
  EXPECT_EQ(r.to_signed(127), 127);
  const RingSpec w(64);
  EXPECT_EQ(w.add(~u64{0}, 2), 1U);
  EXPECT_EQ(w.to_signed(~u64{0}), -1);
}

TEST(Ring, RejectsBadWidth) {
  EXPECT_THROW(RingSpec(0), ParameterError);
  EXPECT_THROW(RingSpec(65), ParameterError);
}

TEST(Ring, ElementMismatchThrows) {
  const RingElement a(3, RingSpec(8)), b(3, RingSpec(16));
  EXPECT_THROW((void)(a + b), SpecMismatch);
  EXPECT_EQ((a * a).value(), 9U);
  EXPECT_EQ((-a).value(), 253U);
}

TEST(Fixed, EncodeExamples) {
  const FixedPointSpec fp(RingSpec(8), 3, 4);
  EXPECT_EQ(encode_fixed(1.5, fp).value(), 24U);
  EXPECT_EQ(encode_fixed(0.0, fp).value(), 0U);
  EXPECT_EQ(encode_fixed(-1.375, fp).value(), 234U);
  EXPECT_DOUBLE_EQ(decode_fixed(RingElement(24, fp.ring), fp), 1.5);
  EXPECT_DOUBLE_EQ(decode_fixed(RingElement(234, fp.ring), fp), -1.375);
  EXPECT_DOUBLE_EQ(decode_fixed(RingElement(255, fp.ring), fp), -1.0 / 16);
}

TEST(Fixed, RoundTripAllRepresentable) {
  const FixedPointSpec fp(RingSpec(8), 3, 4);
  for (int q = -127; q <= 127; ++q) {
    const double v = q / 16.0;
    EXPECT_DOUBLE_EQ(decode_fixed(encode_fixed(v, fp), fp), v) << q;
  }
}

TEST(Fixed, RangeAndBand) {
  const FixedPointSpec fp(RingSpec(8), 3, 4);
  EXPECT_THROW(encode_fixed(8.0, fp), RangeError);
  EXPECT_THROW(encode_fixed(-8.0, fp), RangeError);
  // 7.99 rounds to 128 = 2^ellx, outside the band
  EXPECT_THROW(encode_fixed(7.99, fp), RangeError);
  EXPECT_THROW(decode_fixed(RingElement(128, fp.ring), fp), PrecisionError);
  EXPECT_THROW(decode_fixed(RingElement(200, RingSpec(10)), FixedPointSpec(RingSpec(10), 3, 4)), PrecisionError);
  EXPECT_THROW(FixedPointSpec(RingSpec(8), 4, 4), ParameterError);
  EXPECT_FALSE(fp.has_slack());
}

TEST(Fixed, RoundsHalfAwayFromZero) {
  const FixedPointSpec fp(RingSpec(16), 4, 1);
  EXPECT_EQ(encode_fixed(0.25, fp).value(), 1U);
  EXPECT_EQ(encode_fixed(-0.25, fp).value(), fp.ring.neg(1));
}

TEST(Cut, Examples) {
  const RingSpec r(8);
  EXPECT_EQ(cut(0x4B, 4, r), 0x04U);
  EXPECT_EQ(cut(0x4B, 0, r), 0x4BU);
  EXPECT_EQ(cut(0xFF, 8, r), 0U);
  EXPECT_THROW(cut(1, 9, r), ParameterError);
  EXPECT_EQ(cut_mid(0x4B, 4, 1, r), 0b100U);
  EXPECT_EQ(cut_mid(0xFF, 2, 2, r), 15U);
  EXPECT_THROW(cut_mid(1, 5, 4, r), ParameterError);
  EXPECT_EQ(cut(~u64{0}, 64, RingSpec(64)), 0U);
}

TEST(Cut, MidMatchesReferenceExhaustive) {
  for (unsigned ell : {6U, 8U}) {
    const RingSpec r(ell);
    for (u64 a = 0; a <= r.mask(); ++a)
      for (unsigned k1 = 0; k1 <= ell; ++k1)
        for (unsigned k2 = 0; k1 + k2 <= ell; ++k2) {
          const u64 m = cut_mid(a, k1, k2, r);
          ASSERT_EQ(m, ref_mid(a, k1, k2, ell));
          ASSERT_LT(m, u64{1} << (ell - k1 - k2));
          if (k2 == 0) ASSERT_EQ(m, cut(a, k1, r));
        }
  }
}

TEST(Prime, SelectPrime) {
  EXPECT_EQ(select_prime(8).p, 131U);
  EXPECT_EQ(select_prime(4).p, 11U);
  EXPECT_EQ(select_prime(2).p, 3U);
  EXPECT_EQ(select_prime(8).width, 8U);
  EXPECT_THROW(select_prime(1), ParameterError);
  EXPECT_THROW(select_prime(64), ParameterError);
  // trial division cross-check of the band property
  for (unsigned w = 2; w <= 30; ++w) {
    const u64 p = select_prime(w).p;
    ASSERT_GT(p, u64{1} << (w - 1));
    ASSERT_LT(p, u64{1} << w);
    for (u64 d = 2; d * d <= p; ++d) ASSERT_NE(p % d, 0U) << w;
    for (u64 q = (u64{1} << (w - 1)) + 1; q < p; ++q) ASSERT_FALSE(is_prime(q)) << q;
  }
  EXPECT_TRUE(is_prime(2305843009213693951ULL));  // 2^61 - 1
  EXPECT_FALSE(is_prime(3215031751ULL));          // strong pseudoprime to 2,3,5,7
}

TEST(Prime, FieldOps) {
  const PrimeFieldSpec f = select_prime(8);
  EXPECT_EQ(f.add(130, 5), 4U);
  EXPECT_EQ(f.sub(3, 5), 129U);
  EXPECT_EQ(f.mul(130, 130), 1U);
}

TEST(Misc, Binary) { EXPECT_EQ(to_binary(0x4B, 8), "01001011"); }
