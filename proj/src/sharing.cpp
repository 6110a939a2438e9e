#include "trunclab/sharing.hpp"

namespace trunclab {

Share2 share2(const RingElement& x, const RingElement& R) {
  if (!(x.ring() == R.ring())) throw SpecMismatch("share2: mask from another ring");
  return {x + R, -R};
}

RingElement open2(const Share2& s) { return s.part0 + s.part1; }

Share2 reshare2(const Share2& s, RandomStream& rng) {
  const RingElement rho(rng.next_ring(s.ring()), s.ring());
  return {s.part0 + rho, s.part1 - rho};
}

RssShare rss_share(const RingElement& x, RandomStream& rng) {
  const RingSpec r = x.ring();
  RssShare s{{}, r};
  s.c[0] = rng.next_ring(r);
  s.c[1] = rng.next_ring(r);
  s.c[2] = r.sub(r.sub(x.value(), s.c[0]), s.c[1]);
  return s;
}

RingElement rss_open(const RssShare& s) {
  return {s.ring.add(s.ring.add(s.c[0], s.c[1]), s.c[2]), s.ring};
}

RssShare rss_add(const RssShare& a, const RssShare& b) {
  if (!(a.ring == b.ring)) throw SpecMismatch("rss_add: different rings");
  RssShare s{{}, a.ring};
  for (int i = 0; i < 3; ++i) s.c[i] = a.ring.add(a.c[i], b.c[i]);
  return s;
}

Local2 local_view(std::span<const Share2> xs, PartyId p) {
  Local2 l;
  if (xs.empty()) return l;
  l.ring = xs[0].ring();
  if (p == PartyId::P2) {
    l.v.assign(xs.size(), 0);
    return l;
  }
  l.v.reserve(xs.size());
  for (const auto& s : xs) {
    if (!(s.ring() == l.ring)) throw SpecMismatch("batch mixes rings");
    l.v.push_back(p == PartyId::P0 ? s.part0.value() : s.part1.value());
  }
  return l;
}

std::vector<Share2> join(const Local2& l0, const Local2& l1) {
  if (l0.size() != l1.size() || !(l0.ring == l1.ring)) throw SpecMismatch("join: views disagree");
  std::vector<Share2> out;
  out.reserve(l0.size());
  for (std::size_t i = 0; i < l0.size(); ++i)
    out.push_back({RingElement(l0.v[i], l0.ring), RingElement(l1.v[i], l1.ring)});
  return out;
}

LocalRss local_view(std::span<const RssShare> xs, PartyId p) {
  LocalRss l;
  if (xs.empty()) return l;
  l.ring = xs[0].ring;
  const unsigned i = idx(p);
  for (const auto& s : xs) {
    l.a.push_back(s.c[i]);
    l.b.push_back(s.c[(i + 1) % 3]);
  }
  return l;
}

std::vector<RssShare> join(const LocalRss& l0, const LocalRss& l1, const LocalRss& l2) {
  const std::size_t n = l0.size();
  if (l1.size() != n || l2.size() != n) throw SpecMismatch("join: views disagree");
  std::vector<RssShare> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (l0.b[j] != l1.a[j] || l1.b[j] != l2.a[j] || l2.b[j] != l0.a[j])
      throw ContractError("replicated components disagree");
    out[j] = RssShare{{l0.a[j], l1.a[j], l2.a[j]}, l0.ring};
  }
  return out;
}

LocalTriples triples_from_seeds(Party& p, std::size_t n, RingSpec ring) {
  const u64 base = p.reserve_lanes(n);
  LocalTriples t;
  auto draw3 = [&](const Seed& s, std::vector<u64>& a, std::vector<u64>& b, std::vector<u64>* c) {
    a.resize(n);
    b.resize(n);
    if (c) c->resize(n);
    const StreamFactory fa(s, "triple-a"), fb(s, "triple-b"), fc(s, "triple-c");
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = fa.lane(base + j).next_ring(ring);
      b[j] = fb.lane(base + j).next_ring(ring);
      if (c) (*c)[j] = fc.lane(base + j).next_ring(ring);
    }
  };
  switch (p.id()) {
    case PartyId::P0:
      draw3(p.seed(SeedId::s02), t.a, t.b, &t.c);
      break;
    case PartyId::P1:
      draw3(p.seed(SeedId::s12), t.a, t.b, nullptr);
      t.c = p.recv(PartyId::P2, Tag::triple_c);
      break;
    case PartyId::P2: {
      std::vector<u64> a0, b0, c0, a1, b1;
      draw3(p.seed(SeedId::s02), a0, b0, &c0);
      draw3(p.seed(SeedId::s12), a1, b1, nullptr);
      std::vector<u64> c1(n);
      for (std::size_t j = 0; j < n; ++j)
        c1[j] = ring.sub(ring.mul(ring.add(a0[j], a1[j]), ring.add(b0[j], b1[j])), c0[j]);
      p.send(PartyId::P1, Tag::triple_c, ring.ell, c1);
      // P2 keeps the opened a and b
      t.a.resize(n);
      t.b.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        t.a[j] = ring.add(a0[j], a1[j]);
        t.b[j] = ring.add(b0[j], b1[j]);
      }
      break;
    }
  }
  return t;
}

Local2 beaver_mul(Party& p, const Local2& x, const Local2& y, const LocalTriples& t) {
  const RingSpec r = x.ring;
  const std::size_t n = x.size();
  Local2 z{r, std::vector<u64>(n)};
  if (p.id() == PartyId::P2) return z;
  if (y.size() != n || t.a.size() != n) throw ParameterError("beaver_mul: batch sizes differ");
  std::vector<u64> de(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    de[2 * j] = r.sub(x.v[j], t.a[j]);
    de[2 * j + 1] = r.sub(y.v[j], t.b[j]);
  }
  const PartyId other = p.id() == PartyId::P0 ? PartyId::P1 : PartyId::P0;
  p.send(other, Tag::beaver_open, r.ell, de);
  const auto theirs = p.recv(other, Tag::beaver_open);
  const bool lead = p.id() == PartyId::P0;
  for (std::size_t j = 0; j < n; ++j) {
    const u64 d = r.add(de[2 * j], theirs[2 * j]);
    const u64 e = r.add(de[2 * j + 1], theirs[2 * j + 1]);
    u64 s = r.add(r.add(r.mul(d, t.b[j]), r.mul(e, t.a[j])), t.c[j]);
    if (lead) s = r.add(s, r.mul(d, e));
    z.v[j] = s;
  }
  return z;
}

LocalRss rss_mul_reshare(Party& p, const LocalRss& x, const LocalRss& y, Tag tag) {
  const RingSpec r = x.ring;
  const std::size_t n = x.size();
  if (y.size() != n) throw ParameterError("rss_mul_reshare: batch sizes differ");
  const u64 base = p.reserve_lanes(n);
  // k_0 = seed01, k_1 = seed12, k_2 = seed02; party i knows k_i and k_{i-1}
  static constexpr SeedId key[3] = {SeedId::s01, SeedId::s12, SeedId::s02};
  const unsigned i = p.index();
  const StreamFactory mine(p.seed(key[i]), "rss-zero");
  const StreamFactory prev(p.seed(key[(i + 2) % 3]), "rss-zero");
  std::vector<u64> z(n);
  for (std::size_t j = 0; j < n; ++j) {
    const u64 alpha = r.sub(mine.lane(base + j).next_ring(r), prev.lane(base + j).next_ring(r));
    u64 t = r.mul(x.a[j], y.a[j]);
    t = r.add(t, r.mul(x.a[j], y.b[j]));
    t = r.add(t, r.mul(x.b[j], y.a[j]));
    z[j] = r.add(t, alpha);
  }
  p.send(party(i + 2), tag, r.ell, z);
  auto next = p.recv(party(i + 1), tag);
  return {r, std::move(z), std::move(next)};
}

std::vector<u64> open_local(Party& p, const Local2& x, Tag tag) {
  if (p.id() == PartyId::P2) return {};
  const PartyId other = p.id() == PartyId::P0 ? PartyId::P1 : PartyId::P0;
  p.send(other, tag, x.ring.ell, x.v);
  const auto theirs = p.recv(other, tag);
  std::vector<u64> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x.ring.add(x.v[j], theirs[j]);
  return out;
}

std::vector<u64> open_local(Party& p, const LocalRss& x) {
  // party i misses c[i+2], the first component of party i+2
  const unsigned i = p.index();
  p.send(party(i + 1), Tag::rss_open, x.ring.ell, x.a);
  const auto missing = p.recv(party(i + 2), Tag::rss_open);
  std::vector<u64> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    out[j] = x.ring.add(x.ring.add(x.a[j], x.b[j]), missing[j]);
  return out;
}

}  // namespace trunclab
