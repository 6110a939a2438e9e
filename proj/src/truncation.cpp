#include "trunclab/truncation.hpp"

namespace trunclab {

namespace {

void need_k_below(unsigned k, RingSpec r) {
  if (k >= r.ell) throw ParameterError("truncation: k must be below the ring width");
}

u64 sign_extend(u64 v, unsigned bits, RingSpec r) {
  if (bits >= 64) return r.reduce(v);
  const RingSpec src(bits);
  return r.from_signed(src.to_signed(v));
}

}  // namespace

u64 trc_secureml_local(PartyId p, u64 share, unsigned k, RingSpec r) {
  if (k > r.ell) throw ParameterError("trc_secureml: k exceeds ring width");
  if (p == PartyId::P0) return cut(share, k, r);
  return r.neg(cut(r.neg(share), k, r));
}

u64 trc_det_local(PartyId p, u64 share, unsigned k, RingSpec r) {
  need_k_below(k, r);
  return trc_secureml_local(p, share, k, r) & mask_bits(r.ell - k);
}

u64 trc_det_mid_local(PartyId p, u64 share, unsigned k1, unsigned k2, RingSpec r) {
  if (k1 + k2 >= r.ell) throw ParameterError("trc_det_mid: k1 + k2 must be below the ring width");
  const u64 m = mask_bits(r.ell - k1 - k2);
  if (p == PartyId::P0) return cut_mid(share, k1, k2, r);
  return (u64{0} - cut_mid(r.neg(share), k1, k2, r)) & m;
}

u64 shift_signed(u64 alpha, unsigned k, RingSpec r) {
  need_k_below(k, r);
  return r.from_signed(r.to_signed(alpha) >> k);
}

u64 aby3_finish_local(PartyId p, u64 alpha, u64 rp_share, unsigned k, RingSpec r) {
  if (p == PartyId::P0) return r.sub(shift_signed(alpha, k, r), rp_share);
  return r.neg(rp_share);
}

void trc_secureml_batch(PartyId p, std::span<const u64> in, std::span<u64> out, unsigned k,
                        RingSpec r, Exec ex) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = trc_secureml_local(p, in[j], k, r);
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = trc_secureml_local(p, in[j], k, r);
  }
}

void trc_det_mid_batch(PartyId p, std::span<const u64> in, std::span<u64> out, unsigned k1,
                       unsigned k2, RingSpec r, Exec ex) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = trc_det_mid_local(p, in[j], k1, k2, r);
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = trc_det_mid_local(p, in[j], k1, k2, r);
  }
}

Share2 trc_secureml(const Share2& x, unsigned k) {
  const RingSpec r = x.ring();
  return {RingElement(trc_secureml_local(PartyId::P0, x.part0.value(), k, r), r),
          RingElement(trc_secureml_local(PartyId::P1, x.part1.value(), k, r), r)};
}

Share2 trc_det(const Share2& x, unsigned k) {
  const RingSpec r = x.ring();
  need_k_below(k, r);
  const RingSpec out(r.ell - k);
  return {RingElement(trc_det_local(PartyId::P0, x.part0.value(), k, r), out),
          RingElement(trc_det_local(PartyId::P1, x.part1.value(), k, r), out)};
}

Share2 trc_det_mid(const Share2& x, unsigned k1, unsigned k2) {
  const RingSpec r = x.ring();
  if (k1 + k2 >= r.ell) throw ParameterError("trc_det_mid: k1 + k2 must be below the ring width");
  const RingSpec out(r.ell - k1 - k2);
  return {RingElement(trc_det_mid_local(PartyId::P0, x.part0.value(), k1, k2, r), out),
          RingElement(trc_det_mid_local(PartyId::P1, x.part1.value(), k1, k2, r), out)};
}

TruncPair draw_trunc_pair(RingSpec ring, unsigned k, MaskMode mode, RandomStream& rng) {
  need_k_below(k, ring);
  if (mode == MaskMode::fixed) return {RingElement(u64{1} << k, ring), RingElement(1, ring)};
  const u64 rp = sign_extend(rng.next_bits(ring.ell - k), ring.ell - k, ring);
  const u64 low = k == 0 ? 0 : rng.next_bits(k);
  return {RingElement(ring.add(ring.mul(rp, u64{1} << k), low), ring), RingElement(rp, ring)};
}

LocalPairs trunc_pairs(Party& p, std::size_t n, RingSpec ring, unsigned k, MaskMode mode) {
  need_k_below(k, ring);
  const u64 base = p.reserve_lanes(n);
  LocalPairs out;
  if (mode == MaskMode::fixed) {
    if (p.id() == PartyId::P0) {
      out.r.assign(n, ring.reduce(u64{1} << k));
      out.rp.assign(n, 1);
    } else if (p.id() == PartyId::P1) {
      out.r.assign(n, 0);
      out.rp.assign(n, 0);
    }
    return out;
  }
  auto p0_part = [&](std::vector<u64>& r0, std::vector<u64>& rp0) {
    const StreamFactory f(p.seed(SeedId::s02), "pair-share");
    r0.resize(n);
    rp0.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      auto s = f.lane(base + j);
      r0[j] = s.next_ring(ring);
      rp0[j] = s.next_ring(ring);
    }
  };
  switch (p.id()) {
    case PartyId::P0:
      p0_part(out.r, out.rp);
      break;
    case PartyId::P1: {
      const auto m = p.recv(PartyId::P2, Tag::trunc_pair);
      out.r.assign(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(n));
      out.rp.assign(m.begin() + static_cast<std::ptrdiff_t>(n), m.end());
      break;
    }
    case PartyId::P2: {
      std::vector<u64> r0, rp0;
      p0_part(r0, rp0);
      const StreamFactory f(p.seed(SeedId::s2), "pair-value");
      std::vector<u64> m(2 * n);
      for (std::size_t j = 0; j < n; ++j) {
        auto s = f.lane(base + j);
        const TruncPair tp = draw_trunc_pair(ring, k, MaskMode::random, s);
        m[j] = ring.sub(tp.r.value(), r0[j]);
        m[n + j] = ring.sub(tp.rp.value(), rp0[j]);
      }
      p.send(PartyId::P1, Tag::trunc_pair, ring.ell, m);
      break;
    }
  }
  return out;
}

Local2 trc_aby3(Party& p, const Local2& x, const LocalPairs& pairs, unsigned k) {
  const RingSpec r = x.ring;
  const std::size_t n = x.size();
  Local2 out{r, std::vector<u64>(n)};
  if (p.id() == PartyId::P2) return out;
  std::vector<u64> a(n);
  for (std::size_t j = 0; j < n; ++j) a[j] = r.add(x.v[j], pairs.r[j]);
  const PartyId other = p.id() == PartyId::P0 ? PartyId::P1 : PartyId::P0;
  p.send(other, Tag::open_alpha, r.ell, a);
  const auto theirs = p.recv(other, Tag::open_alpha);
  for (std::size_t j = 0; j < n; ++j)
    out.v[j] = aby3_finish_local(p.id(), r.add(a[j], theirs[j]), pairs.rp[j], k, r);
  return out;
}

Local2 trc_aby3(Party& p, const Local2& x, unsigned k, MaskMode mode) {
  const LocalPairs pairs = trunc_pairs(p, x.size(), x.ring, k, mode);
  return trc_aby3(p, x, pairs, k);
}

RssPairs rss_trunc_pairs(std::size_t n, RingSpec ring, unsigned k, MaskMode mode,
                         RandomStream& rng) {
  RssPairs out;
  for (std::size_t j = 0; j < n; ++j) {
    const TruncPair tp = draw_trunc_pair(ring, k, mode, rng);
    out.r.push_back(rss_share(tp.r, rng));
    out.rp.push_back(rss_share(tp.rp, rng));
  }
  return out;
}

LocalRss trc_aby3_rss(Party& p, const LocalRss& x, const LocalRss& r, const LocalRss& rp,
                      unsigned k) {
  const RingSpec ring = x.ring;
  const std::size_t n = x.size();
  LocalRss a{ring, std::vector<u64>(n), std::vector<u64>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    a.a[j] = ring.add(x.a[j], r.a[j]);
    a.b[j] = ring.add(x.b[j], r.b[j]);
  }
  const auto alpha = open_local(p, a);
  LocalRss out{ring, std::vector<u64>(n), std::vector<u64>(n)};
  const unsigned i = p.index();
  for (std::size_t j = 0; j < n; ++j) {
    const u64 pub = shift_signed(alpha[j], k, ring);
    out.a[j] = ring.neg(rp.a[j]);
    out.b[j] = ring.neg(rp.b[j]);
    // the public part goes into component 0
    if (i == 0) out.a[j] = ring.add(out.a[j], pub);
    if (i == 2) out.b[j] = ring.add(out.b[j], pub);
  }
  return out;
}

Local2 trc_det_lift(Party& p, const Local2& x, unsigned k) {
  const RingSpec r = x.ring;
  if (k + 2 > r.ell) throw ParameterError("trc_det_lift: k leaves no room for the offset");
  const unsigned m = r.ell - k;
  const RingSpec rm(m);
  const u64 offset = u64{1} << (m - 2);
  const std::size_t n = x.size();
  const bool lead = p.id() == PartyId::P0;
  std::vector<u64> a(n);
  Local2 mx{r, std::vector<u64>(n)}, my{r, std::vector<u64>(n)};
  if (p.id() != PartyId::P2) {
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = trc_det_local(p.id(), x.v[j], k, r);
      if (lead) a[j] = rm.add(a[j], offset);
      const u64 msb = a[j] >> (m - 1);
      (lead ? mx : my).v[j] = msb;
    }
  }
  const LocalTriples t = triples_from_seeds(p, n, r);
  const Local2 both = beaver_mul(p, mx, my, t);
  Local2 out{r, std::vector<u64>(n)};
  if (p.id() == PartyId::P2) return out;
  const u64 top = m >= 64 ? 0 : r.reduce(u64{1} << m);
  for (std::size_t j = 0; j < n; ++j) {
    const u64 own = lead ? mx.v[j] : my.v[j];
    // a - msb * 2^m + [msb0 msb1] * 2^m, P0 removes the offset
    u64 v = r.add(r.sub(a[j], r.mul(own, top)), r.mul(both.v[j], top));
    if (lead) v = r.sub(v, offset);
    out.v[j] = v;
  }
  return out;
}

Local2 trc_then_mult(Party& p, const Local2& x, const Local2& y, unsigned frac,
                     TrcProtocol trc, MaskMode mode) {
  const unsigned hx = (frac + 1) / 2, hy = frac / 2;
  Local2 xt{x.ring, std::vector<u64>(x.size())}, yt{y.ring, std::vector<u64>(y.size())};
  if (trc == TrcProtocol::secureml) {
    if (p.id() != PartyId::P2) {
      trc_secureml_batch(p.id(), x.v, xt.v, hx, x.ring, p.exec());
      trc_secureml_batch(p.id(), y.v, yt.v, hy, y.ring, p.exec());
    }
  } else if (trc == TrcProtocol::aby3) {
    xt = trc_aby3(p, x, hx, mode);
    yt = trc_aby3(p, y, hy, mode);
  } else {
    throw ParameterError("trc_then_mult: deterministic truncation changes the ring");
  }
  const LocalTriples t = triples_from_seeds(p, xt.size(), x.ring);
  return beaver_mul(p, xt, yt, t);
}

}  // namespace trunclab
