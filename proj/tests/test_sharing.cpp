#include <gtest/gtest.h>

#include "trunclab/modswitch.hpp"
#include "trunclab/session.hpp"
#include "trunclab/sharing.hpp"

using namespace trunclab;

namespace {

Share2 sh(u64 x, u64 R, unsigned ell) {
  const RingSpec r(ell);
  return share2(RingElement(x, r), RingElement(R, r));
}

std::vector<Share2> share_all(const std::vector<u64>& xs, RingSpec r, RandomStream& rng) {
  std::vector<Share2> out;
  for (u64 x : xs) out.push_back(share2(RingElement(x, r), RingElement(rng.next_ring(r), r)));
  return out;
}

}  // namespace

TEST(Share2, WorkedExamples) {
  const Share2 a = sh(0x4B, 0xAA, 8);
  EXPECT_EQ(a.part0.value(), 0xF5U);
  EXPECT_EQ(a.part1.value(), 0x56U);
  const Share2 b = sh(0x4B, 0xE0, 8);
  EXPECT_EQ(b.part0.value(), 0x2BU);
  EXPECT_EQ(b.part1.value(), 0x20U);
  const Share2 c = sh(0x4B, 0, 8);
  EXPECT_EQ(c.part0.value(), 0x4BU);
  EXPECT_EQ(c.part1.value(), 0U);
  for (const auto& s : {a, b, c}) EXPECT_EQ(open2(s).value(), 0x4BU);
}

TEST(Share2, OpenShareExhaustive8) {
  for (u64 x = 0; x < 256; ++x)
    for (u64 R = 0; R < 256; ++R) ASSERT_EQ(open2(sh(x, R, 8)).value(), x);
}

TEST(Share2, Reshare) {
  RandomStream rng(Seed{}, "reshare");
  Share2 s = sh(1234, 99, 32);
  for (int i = 0; i < 1000; ++i) s = reshare2(s, rng);
  EXPECT_EQ(open2(s).value(), 1234U);
  RandomStream a(Seed{}, "pin"), b(Seed{}, "pin");
  const Share2 t = sh(5, 6, 32);
  const u64 rho = b.next_ring(RingSpec(32));
  EXPECT_EQ(reshare2(t, a).part0.value(), RingSpec(32).add(t.part0.value(), rho));
}

TEST(Share2, MismatchedRingsThrow) {
  const Share2 bad{RingElement(1, RingSpec(8)), RingElement(1, RingSpec(16))};
  EXPECT_THROW(open2(bad), SpecMismatch);
}

TEST(Rss, OpenShareExhaustive8) {
  RandomStream rng(Seed{}, "rss");
  const RingSpec r(8);
  for (u64 x = 0; x < 256; ++x) {
    const RssShare s = rss_share(RingElement(x, r), rng);
    ASSERT_EQ(rss_open(s).value(), x);
    // bridge: P0 holds c0 + c1, P1 holds c2
    ASSERT_EQ(r.add(r.add(s.c[0], s.c[1]), s.c[2]), x);
  }
  const RssShare a = rss_share(RingElement(3, r), rng), b = rss_share(RingElement(5, r), rng);
  EXPECT_EQ(rss_open(rss_add(a, b)).value(), 8U);
}

TEST(Rss, LocalViewRoundTrip) {
  RandomStream rng(Seed{}, "view");
  const RingSpec r(16);
  std::vector<RssShare> xs;
  for (int i = 0; i < 10; ++i) xs.push_back(rss_share(RingElement(i * 77, r), rng));
  const auto l0 = local_view(xs, PartyId::P0), l1 = local_view(xs, PartyId::P1),
             l2 = local_view(xs, PartyId::P2);
  const auto back = join(l0, l1, l2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(rss_open(back[i]).value(), static_cast<u64>(i * 77));
  auto broken = l1;
  broken.b[3] ^= 1;
  EXPECT_THROW(join(l0, broken, l2), ContractError);
}

class Protocols : public ::testing::Test {
 protected:
  InProcTransport net;
  CommMeter meter;
  Session session{net, meter, SeedSet::derive(11)};
};

TEST_F(Protocols, RssMulReshare) {
  RandomStream rng(Seed{}, "mul");
  const RingSpec r(8);
  std::vector<RssShare> x{rss_share(RingElement(3, r), rng)}, y{rss_share(RingElement(5, r), rng)};
  std::array<LocalRss, 3> yl;
  for (unsigned i = 0; i < 3; ++i) yl[i] = local_view(y, party(i));
  const auto z = run_rss(session, x, [&](Party& p, const LocalRss& xl) {
    return rss_mul_reshare(p, xl, yl[p.index()], Tag::rss_reshare);
  });
  EXPECT_EQ(rss_open(z[0]).value(), 15U);
  EXPECT_EQ(meter.rounds(), 1U);
  for (unsigned i = 0; i < 3; ++i)
    EXPECT_EQ(meter.online(party(i), party(i + 2)).bits, 8U) << i;
}

TEST_F(Protocols, TriplesHold) {
  const RingSpec r(64);
  const std::size_t n = 10000;
  std::array<LocalTriples, 3> t;
  run_parties(net, meter, session.seeds,
              [&](Party& p) { t[p.index()] = triples_from_seeds(p, n, r); });
  for (std::size_t j = 0; j < n; ++j) {
    const u64 a = r.add(t[0].a[j], t[1].a[j]), b = r.add(t[0].b[j], t[1].b[j]);
    ASSERT_EQ(r.add(t[0].c[j], t[1].c[j]), r.mul(a, b));
    ASSERT_EQ(t[2].a[j], a);
    ASSERT_EQ(t[2].b[j], b);
  }
  EXPECT_EQ(meter.offline(PartyId::P2, PartyId::P1).bits, 64U * n);
  EXPECT_EQ(meter.rounds(), 0U);
  // replay
  std::array<LocalTriples, 3> again;
  run_parties(net, meter, session.seeds,
              [&](Party& p) { again[p.index()] = triples_from_seeds(p, n, r); });
  EXPECT_EQ(again[1].c, t[1].c);
}

TEST_F(Protocols, TriplesTinyRing) {
  const RingSpec r(2);
  std::array<LocalTriples, 3> t;
  run_parties(net, meter, session.seeds,
              [&](Party& p) { t[p.index()] = triples_from_seeds(p, 256, r); });
  for (std::size_t j = 0; j < 256; ++j)
    ASSERT_EQ(r.add(t[0].c[j], t[1].c[j]),
              r.mul(r.add(t[0].a[j], t[1].a[j]), r.add(t[0].b[j], t[1].b[j])));
}

TEST_F(Protocols, BeaverExhaustive4) {
  const RingSpec r(4);
  RandomStream rng(Seed{}, "bv");
  std::vector<u64> xv, yv;
  for (u64 x = 0; x < 16; ++x)
    for (u64 y = 0; y < 16; ++y) {
      xv.push_back(x);
      yv.push_back(y);
    }
  const auto xs = share_all(xv, r, rng), ys = share_all(yv, r, rng);
  std::array<Local2, 3> yl;
  for (unsigned i = 0; i < 3; ++i) yl[i] = local_view(ys, party(i));
  const auto z = run_ubl(session, xs, [&](Party& p, const Local2& xl) {
    const auto t = triples_from_seeds(p, xl.size(), r);
    return beaver_mul(p, xl, yl[p.index()], t);
  });
  for (std::size_t j = 0; j < z.size(); ++j) ASSERT_EQ(open2(z[j]).value(), r.mul(xv[j], yv[j]));
  // d and e travel together: 2 elements each way per product, 1 round
  EXPECT_EQ(meter.online(PartyId::P0, PartyId::P1).bits, 2U * 4 * z.size());
  EXPECT_EQ(meter.online(PartyId::P1, PartyId::P0).bits, 2U * 4 * z.size());
  EXPECT_EQ(meter.online(PartyId::P0, PartyId::P1).messages, 1U);
  EXPECT_EQ(meter.rounds(), 1U);
}

TEST_F(Protocols, BeaverRandom64) {
  const RingSpec r(64);
  RandomStream rng(Seed{}, "bv64");
  std::vector<u64> xv, yv;
  for (int i = 0; i < 100000; ++i) {
    xv.push_back(rng.next_u64());
    yv.push_back(i % 17 == 0 ? 0 : rng.next_u64());
  }
  const auto xs = share_all(xv, r, rng), ys = share_all(yv, r, rng);
  std::array<Local2, 3> yl;
  for (unsigned i = 0; i < 3; ++i) yl[i] = local_view(ys, party(i));
  const auto z = run_ubl(session, xs, [&](Party& p, const Local2& xl) {
    return beaver_mul(p, xl, yl[p.index()], triples_from_seeds(p, xl.size(), r));
  });
  for (std::size_t j = 0; j < z.size(); ++j) ASSERT_EQ(open2(z[j]).value(), xv[j] * yv[j]);
}

TEST(ModSwitch, Examples) {
  const PrimeFieldSpec f{17, 5};
  const RingSpec r(4);
  const Share2 a{RingElement(5, r), RingElement(11, r)};
  const FieldShare fa = mod_switch(a, f);
  EXPECT_EQ(fa.part0, 5U);
  EXPECT_EQ(fa.part1, 12U);
  EXPECT_EQ(open_field(fa), 0U);
  const FieldShare fb = mod_switch({RingElement(0, r), RingElement(0, r)}, f);
  EXPECT_EQ(fb.part0, 16U);
  EXPECT_EQ(fb.part1, 1U);
  EXPECT_EQ(open_field(fb), 0U);
  EXPECT_EQ(open_field(mod_switch({RingElement(7, r), RingElement(12, r)}, f)), 3U);
  EXPECT_THROW(mod_switch(a, PrimeFieldSpec{13, 4}), ParameterError);
}

TEST(ModSwitch, ZeroPreservationExhaustive) {
  for (unsigned lp = 3; lp <= 10; ++lp) {
    const RingSpec r(lp);
    const PrimeFieldSpec f = select_prime(lp + 1);
    for (u64 x = 0; x <= r.mask(); ++x)
      for (u64 s0 = 0; s0 <= r.mask(); ++s0) {
        const Share2 s{RingElement(s0, r), RingElement(r.sub(x, s0), r)};
        const u64 v = open_field(mod_switch(s, f));
        if (x == 0) {
          ASSERT_EQ(v, 0U);
        } else {
          ASSERT_TRUE(v == x % f.p || v == (x + f.p - (u64{1} << lp)) % f.p) << x;
          ASSERT_NE(v, 0U);
        }
      }
  }
}

TEST(ModSwitch, MaskingKeepsNonzero) {
  // 16 * 16 vanishes mod 2^8 but never mod p
  EXPECT_EQ(RingSpec(8).mul(16, 16), 0U);
  for (unsigned w = 2; w <= 8; ++w) {
    const PrimeFieldSpec f = select_prime(w);
    for (u64 v = 1; v < f.p; ++v)
      for (u64 m = 1; m < f.p; ++m) ASSERT_NE(f.mul(v, m), 0U);
  }
}
