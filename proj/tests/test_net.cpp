#include <gtest/gtest.h>

#include "trunclab/drelu.hpp"
#include "trunclab/oracle.hpp"
#include "trunclab/session.hpp"

using namespace trunclab;

TEST(Wire, GoldenFrame) {
  const Envelope e{PartyId::P0, PartyId::P2, Tag::drelu_w, 12, {0xABC, 0x001}};
  const std::vector<std::uint8_t> want{0x00, 0x00, 0x00, 0x08, 0x03, 0x0c, 0x00, 0x02,
                                       0xbc, 0x0a, 0x01, 0x00};
  EXPECT_EQ(encode_frames(e), want);
  EXPECT_EQ(wire_bytes(2, 12), want.size());
  const Envelope one{PartyId::P2, PartyId::P1, Tag::drelu_bcast, 1, {1, 0, 1}};
  const std::vector<std::uint8_t> w1{0, 0, 0, 7, 10, 1, 0, 3, 1, 0, 1};
  EXPECT_EQ(encode_frames(one), w1);
  const Envelope empty{PartyId::P0, PartyId::P1, Tag::open_alpha, 64, {}};
  EXPECT_EQ(encode_frames(empty), (std::vector<std::uint8_t>{0, 0, 0, 4, 1, 64, 0, 0}));
}

TEST(Wire, RejectsOverwideElement) {
  const Envelope e{PartyId::P0, PartyId::P1, Tag::open_alpha, 4, {16}};
  EXPECT_THROW(encode_frames(e), RangeError);
}

TEST(Wire, RoundTripAcrossFrames) {
  Envelope e{PartyId::P1, PartyId::P2, Tag::drelu_w, 33, {}};
  for (u64 i = 0; i < 140000; ++i) e.elems.push_back((i * 2654435761ULL) & mask_bits(33));
  const auto bytes = encode_frames(e);
  EXPECT_EQ(bytes.size(), wire_bytes(e.elems.size(), 33));
  EXPECT_EQ(bytes[4], static_cast<std::uint8_t>(3 | kMoreFrames));
  FrameDecoder d(PartyId::P1, PartyId::P2);
  std::vector<Envelope> got;
  // feed in uneven chunks
  for (std::size_t off = 0; off < bytes.size(); off += 9973) {
    const std::size_t n = std::min<std::size_t>(9973, bytes.size() - off);
    auto part = d.feed(std::span(bytes).subspan(off, n));
    for (auto& x : part) got.push_back(std::move(x));
  }
  ASSERT_EQ(got.size(), 1U);
  EXPECT_EQ(got[0].tag, Tag::drelu_w);
  EXPECT_EQ(got[0].width, 33);
  EXPECT_EQ(got[0].elems, e.elems);
}

TEST(Wire, MalformedFrame) {
  FrameDecoder d(PartyId::P0, PartyId::P1);
  const std::vector<std::uint8_t> bad{0, 0, 0, 9, 1, 8, 0, 2, 1, 2, 3, 4, 5};
  EXPECT_THROW(d.feed(bad), ParseError);
}

TEST(Transport, FifoAndClose) {
  for (const char* kind : {"inproc", "tcp"}) {
    auto t = make_transport(kind);
    t->send({PartyId::P0, PartyId::P1, Tag::open_alpha, 8, {1, 2, 3}});
    t->send({PartyId::P0, PartyId::P1, Tag::beaver_open, 16, {400}});
    const auto a = t->recv(PartyId::P1, PartyId::P0, std::chrono::milliseconds(5000));
    const auto b = t->recv(PartyId::P1, PartyId::P0, std::chrono::milliseconds(5000));
    EXPECT_EQ(a.elems, (std::vector<u64>{1, 2, 3}));
    EXPECT_EQ(a.tag, Tag::open_alpha);
    EXPECT_EQ(b.elems, std::vector<u64>{400});
    t->close();
    EXPECT_THROW(t->recv(PartyId::P1, PartyId::P0, std::chrono::milliseconds(100)),
                 TransportError);
  }
  EXPECT_THROW(make_transport("carrier-pigeon"), ParameterError);
}

TEST(Transport, TagMismatchFails) {
  InProcTransport t;
  CommMeter m;
  const SeedSet s = SeedSet::derive(1);
  RunOptions opt;
  opt.timeout = std::chrono::milliseconds(2000);
  EXPECT_THROW(run_parties(t, m, s,
                           [](Party& p) {
                             if (p.id() == PartyId::P0)
                               p.send(PartyId::P1, Tag::open_alpha, 8, std::vector<u64>{1});
                             if (p.id() == PartyId::P1) p.recv(PartyId::P0, Tag::relu_e);
                           },
                           opt),
               TransportError);
}

TEST(Transport, SeedEntitlement) {
  InProcTransport t;
  CommMeter m;
  EXPECT_THROW(run_parties(t, m, SeedSet::derive(1),
                           [](Party& p) {
                             if (p.id() == PartyId::P2) p.seed(SeedId::s01);
                           }),
               ContractError);
}

TEST(Meter, RoundsFollowDependencies) {
  InProcTransport t;
  CommMeter m;
  // P0 -> P1, then P1 -> P2 after receiving, P2 -> P0 after receiving: 3 rounds
  run_parties(t, m, SeedSet::derive(1), [](Party& p) {
    const std::vector<u64> v{7};
    if (p.id() == PartyId::P0) {
      p.send(PartyId::P1, Tag::open_alpha, 8, v);
      p.recv(PartyId::P2, Tag::relu_e);
    } else if (p.id() == PartyId::P1) {
      p.recv(PartyId::P0, Tag::open_alpha);
      p.send(PartyId::P2, Tag::drelu_w, 8, v);
    } else {
      p.recv(PartyId::P1, Tag::drelu_w);
      p.send(PartyId::P0, Tag::relu_e, 8, v);
    }
  });
  EXPECT_EQ(m.rounds(), 3U);
  m.reset();
  // a parallel exchange is one round; offline traffic is not a round
  run_parties(t, m, SeedSet::derive(1), [](Party& p) {
    const std::vector<u64> v{7, 8};
    if (p.id() == PartyId::P2) {
      p.send(PartyId::P1, Tag::triple_c, 64, v);
      return;
    }
    const PartyId o = p.id() == PartyId::P0 ? PartyId::P1 : PartyId::P0;
    if (p.id() == PartyId::P1) p.recv(PartyId::P2, Tag::triple_c);
    p.send(o, Tag::beaver_open, 16, v);
    p.recv(o, Tag::beaver_open);
  });
  EXPECT_EQ(m.rounds(), 1U);
  EXPECT_EQ(m.offline(PartyId::P2, PartyId::P1).bits, 128U);
  EXPECT_EQ(m.online(PartyId::P0, PartyId::P1).bits, 32U);
  EXPECT_EQ(m.online(PartyId::P0, PartyId::P1).bytes, wire_bytes(2, 16));
}

TEST(Latency, Model) {
  EXPECT_NEAR(simulate_latency(2, 64, link_profile("wan")), 80.00064, 1e-9);
  EXPECT_EQ(simulate_latency(0, 0, link_profile("lan1")), 0.0);
  const LinkProfile l = link_profile("lan2");
  EXPECT_NEAR(simulate_latency(0, 2000, l), 2 * simulate_latency(0, 1000, l), 1e-12);
  EXPECT_THROW(link_profile("moon"), ParameterError);
}

namespace {

struct RunResult {
  std::vector<u64> opened;
  std::string meter;
  unsigned rounds;
};

RunResult relu_run(const std::string& kind) {
  auto t = make_transport(kind);
  CommMeter m;
  Session s{*t, m, SeedSet::derive(99)};
  const FixedPointSpec fp(RingSpec(32), 4, 8);
  const DreluConfig cfg(fp, DreluMode::guard_bit);
  RandomStream rng(Seed{}, "relu-in");
  std::vector<Share2> xs;
  for (int i = -200; i <= 200; ++i)
    xs.push_back(share2(RingElement(fp.ring.from_signed(i * 9), fp.ring),
                        RingElement(rng.next_ring(fp.ring), fp.ring)));
  const auto out = run_ubl(s, xs, [&](Party& p, const Local2& x) { return relu_ubl(p, x, cfg); });
  RunResult r;
  for (const auto& z : out) r.opened.push_back(open2(z).value());
  r.meter = m.table_csv();
  r.rounds = m.rounds();
  return r;
}

}  // namespace

TEST(Transport, InProcAndTcpAgree) {
  const RunResult a = relu_run("inproc"), b = relu_run("tcp");
  EXPECT_EQ(a.opened, b.opened);
  EXPECT_EQ(a.meter, b.meter);
  EXPECT_EQ(a.rounds, b.rounds);
}
