#include "trunclab/drelu.hpp"

#include "trunclab/truncation.hpp"

namespace trunclab {

DreluConfig::DreluConfig(FixedPointSpec fp, DreluMode m, std::optional<KeyBits> kb,
                         std::optional<RingSpec> out)
    : precision(fp), mode(m), keybits(kb), out_ring(out) {
  validate();
}

unsigned DreluConfig::drop_bits() const {
  return keybits ? precision.frac_bits - keybits->frac_bits : 0;
}

unsigned DreluConfig::ladder_bits() const {
  return keybits ? keybits->ellx() : precision.ellx();
}

RingSpec DreluConfig::ladder_ring() const { return RingSpec(precision.ring.ell - drop_bits()); }

void DreluConfig::validate() const {
  if (keybits) {
    if (keybits->int_bits > precision.int_bits || keybits->frac_bits > precision.frac_bits)
      throw ParameterError("key bits exceed the full precision");
    if (keybits->ellx() < 1) throw ParameterError("key precision is empty");
  }
  const unsigned L = ladder_bits();
  if (precision.ring.ell < drop_bits() + 2 * L + guard())
    throw ParameterError("ladder does not fit: need ell >= drop + 2*ellx + guard");
  if (domain_bits() + 1 > 63) throw ParameterError("ladder domain too wide for the field");
}

std::optional<KeyBits> fit_keybits(const FixedPointSpec& fp, DreluMode mode) {
  const unsigned g = mode == DreluMode::guard_bit ? 1 : 0;
  const unsigned ell = fp.ring.ell;
  if (ell >= 2 * fp.ellx() + g) return std::nullopt;
  for (unsigned f = fp.frac_bits; f-- > 0;) {
    const unsigned L = fp.int_bits + f;
    if (L >= 1 && ell >= (fp.frac_bits - f) + 2 * L + g) return KeyBits{fp.int_bits, f};
  }
  throw ParameterError("no key precision fits the ring");
}

u64 keybits_extract_local(PartyId p, u64 share, const FixedPointSpec& full, KeyBits key) {
  if (key.frac_bits > full.frac_bits) throw ParameterError("key fraction exceeds full fraction");
  return trc_det_local(p, share, full.frac_bits - key.frac_bits, full.ring);
}

Share2 keybits_extract(const Share2& x, const FixedPointSpec& full, KeyBits key) {
  if (key.frac_bits > full.frac_bits || key.int_bits > full.int_bits)
    throw ParameterError("key bits exceed the full precision");
  return trc_det(x, full.frac_bits - key.frac_bits);
}

std::vector<u64> ladder_local(PartyId p, u64 share, const DreluConfig& cfg) {
  RingSpec r = cfg.precision.ring;
  if (cfg.keybits) {
    share = keybits_extract_local(p, share, cfg.precision, *cfg.keybits);
    r = cfg.ladder_ring();
  }
  const unsigned L = cfg.ladder_bits(), w = cfg.domain_bits();
  std::vector<u64> u(L + 1);
  for (unsigned i = 0; i <= L; ++i) u[i] = trc_det_mid_local(p, share, i, r.ell - i - w, r);
  return u;
}

std::vector<Share2> truncation_ladder(const Share2& x, const DreluConfig& cfg) {
  if (!(x.ring() == cfg.precision.ring)) throw SpecMismatch("ladder: input ring differs");
  const auto u0 = ladder_local(PartyId::P0, x.part0.value(), cfg);
  const auto u1 = ladder_local(PartyId::P1, x.part1.value(), cfg);
  const RingSpec d(cfg.domain_bits());
  std::vector<Share2> out;
  for (std::size_t i = 0; i < u0.size(); ++i)
    out.push_back({RingElement(u0[i], d), RingElement(u1[i], d)});
  return out;
}

std::vector<u64> ladder_v_local(PartyId p, std::span<const u64> u, unsigned domain_bits) {
  const RingSpec d(domain_bits);
  const u64 one = p == PartyId::P0 ? 1 : 0;
  std::vector<u64> v(u.size());
  for (std::size_t i = 0; i + 1 < u.size(); ++i) v[i] = d.sub(d.add(u[i], u[i + 1]), one);
  v.back() = d.sub(u.back(), one);
  return v;
}

namespace {

struct KernelStreams {
  StreamFactory t, perm, mask, reshare;
  explicit KernelStreams(const Seed& s)
      : t(s, "drelu-t"), perm(s, "drelu-perm"), mask(s, "drelu-mask"), reshare(s, "drelu-reshare") {}
};

void kernel_one(PartyId p, u64 x, const DreluConfig& cfg, const PrimeFieldSpec& f,
                const KernelStreams& ks, u64 lane, u64* w, std::uint8_t& t) {
  const RingSpec r = cfg.precision.ring;
  t = ks.t.lane(lane).next_bit() ? 1 : 0;
  const u64 s = t ? r.neg(x) : x;
  const unsigned w_bits = cfg.domain_bits();
  const auto u = ladder_local(p, s, cfg);
  const auto v = ladder_v_local(p, u, w_bits);
  const std::size_t m = v.size();
  auto pr = ks.perm.lane(lane);
  const auto pi = pr.permutation(m);
  auto mr = ks.mask.lane(lane);
  auto rr = ks.reshare.lane(lane);
  for (std::size_t k = 0; k < m; ++k) {
    const u64 sw = mod_switch_local(p, v[pi[k]], w_bits, f);
    const u64 masked = f.mul(sw, mr.next_nonzero(f));
    const u64 rho = rr.next_below(f.p);
    w[k] = p == PartyId::P0 ? f.add(masked, rho) : f.sub(masked, rho);
  }
}

}  // namespace

DreluLocal drelu_local_kernel(PartyId p, std::span<const u64> x, const DreluConfig& cfg,
                              const Seed& seed01, u64 lane_base, Exec ex) {
  if (p == PartyId::P2) throw ParameterError("P2 has no local DReLU phase");
  cfg.validate();
  const PrimeFieldSpec f = cfg.field();
  const std::size_t m = cfg.ladder_bits() + 1;
  const KernelStreams ks(seed01);
  DreluLocal out;
  out.w.resize(x.size() * m);
  out.t.resize(x.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j)
      kernel_one(p, x[j], cfg, f, ks, lane_base + j, &out.w[j * m], out.t[j]);
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j)
      kernel_one(p, x[j], cfg, f, ks, lane_base + j, &out.w[j * m], out.t[j]);
  }
  return out;
}

DreluLocalView drelu_local_phase(std::span<const Share2> x, const DreluConfig& cfg,
                                 const SeedSet& seeds, u64 lane_base, Exec ex) {
  const Local2 l0 = local_view(x, PartyId::P0), l1 = local_view(x, PartyId::P1);
  const auto a = drelu_local_kernel(PartyId::P0, l0.v, cfg, seeds.seed01, lane_base, ex);
  const auto b = drelu_local_kernel(PartyId::P1, l1.v, cfg, seeds.seed01, lane_base, ex);
  DreluLocalView v;
  v.t = a.t;
  const PrimeFieldSpec f = cfg.field();
  for (std::size_t i = 0; i < a.w.size(); ++i) v.w.push_back({a.w[i], b.w[i], f});
  return v;
}

std::vector<std::uint8_t> drelu_assist(std::span<const u64> w0, std::span<const u64> w1,
                                       const PrimeFieldSpec& f, unsigned per_input) {
  if (w0.size() != w1.size() || per_input == 0 || w0.size() % per_input != 0)
    throw ParameterError("drelu_assist: malformed w batch");
  const std::size_t n = w0.size() / per_input;
  std::vector<std::uint8_t> bit(n, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (unsigned k = 0; k < per_input; ++k)
      if (f.add(w0[j * per_input + k], w1[j * per_input + k]) == 0) bit[j] = 1;
  return bit;
}

namespace {

// P2 side of the one-pass: both w batches in, DReLU' bits out
std::vector<std::uint8_t> p2_collect(Party& p, const DreluConfig& cfg) {
  const auto w0 = p.recv(PartyId::P0, Tag::drelu_w);
  const auto w1 = p.recv(PartyId::P1, Tag::drelu_w);
  return drelu_assist(w0, w1, cfg.field(), cfg.ladder_bits() + 1);
}

DreluLocal p01_send(Party& p, const Local2& x, const DreluConfig& cfg, u64 base) {
  auto loc = drelu_local_kernel(p.id(), x.v, cfg, p.seed(SeedId::s01), base, p.exec());
  p.send(PartyId::P2, Tag::drelu_w, cfg.field().width, loc.w);
  return loc;
}

}  // namespace

Local2 drelu_ubl(Party& p, const Local2& x, const DreluConfig& cfg) {
  cfg.validate();
  const std::size_t n = x.size();
  const u64 base = p.reserve_lanes(n);
  const RingSpec out = cfg.output_ring();
  Local2 res{out, std::vector<u64>(n)};
  // [DReLU']_0 comes from seed02, P2 sends [DReLU']_1 to P1
  if (p.id() == PartyId::P2) {
    const StreamFactory resp(p.seed(SeedId::s02), "drelu-resp");
    const auto bit = p2_collect(p, cfg);
    std::vector<u64> s1(n);
    for (std::size_t j = 0; j < n; ++j) s1[j] = out.sub(bit[j], resp.lane(base + j).next_ring(out));
    p.send(PartyId::P1, Tag::drelu_resp, out.ell, s1);
    return res;
  }
  const auto loc = p01_send(p, x, cfg, base);
  if (p.id() == PartyId::P0) {
    const StreamFactory resp(p.seed(SeedId::s02), "drelu-resp");
    for (std::size_t j = 0; j < n; ++j) {
      const u64 s0 = resp.lane(base + j).next_ring(out);
      res.v[j] = loc.t[j] ? out.add(1, out.neg(s0)) : s0;
    }
  } else {
    const auto s1 = p.recv(PartyId::P2, Tag::drelu_resp);
    for (std::size_t j = 0; j < n; ++j) res.v[j] = loc.t[j] ? out.neg(s1[j]) : s1[j];
  }
  return res;
}

Local2 relu_ubl(Party& p, const Local2& x, const DreluConfig& cfg) {
  cfg.validate();
  const RingSpec r = x.ring;
  if (!(cfg.output_ring() == r)) throw SpecMismatch("relu: DReLU output ring must match x");
  const std::size_t n = x.size();
  const LocalTriples tr = triples_from_seeds(p, n, r);
  const u64 base = p.reserve_lanes(n);
  Local2 res{r, std::vector<u64>(n)};
  if (p.id() == PartyId::P2) {
    const auto bit = p2_collect(p, cfg);
    std::vector<u64> e(n);
    for (std::size_t j = 0; j < n; ++j) e[j] = r.sub(bit[j], tr.b[j]);
    p.send(PartyId::P0, Tag::relu_e, r.ell, e);
    p.send(PartyId::P1, Tag::relu_e, r.ell, e);
    return res;
  }
  const auto loc = p01_send(p, x, cfg, base);
  const PartyId other = p.id() == PartyId::P0 ? PartyId::P1 : PartyId::P0;
  std::vector<u64> d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = r.sub(x.v[j], tr.a[j]);
  p.send(other, Tag::beaver_open, r.ell, d);
  const auto d_other = p.recv(other, Tag::beaver_open);
  const auto e = p.recv(PartyId::P2, Tag::relu_e);
  const bool lead = p.id() == PartyId::P0;
  for (std::size_t j = 0; j < n; ++j) {
    const u64 dj = r.add(d[j], d_other[j]);
    u64 z = r.add(r.add(r.mul(dj, tr.b[j]), r.mul(e[j], tr.a[j])), tr.c[j]);
    if (lead) z = r.add(z, r.mul(dj, e[j]));
    // t[x] + (1 - 2t)[x * DReLU']
    res.v[j] = loc.t[j] ? r.sub(x.v[j], z) : z;
  }
  return res;
}

LocalRss drelu_rss(Party& p, const LocalRss& x, const DreluConfig& cfg) {
  cfg.validate();
  const std::size_t n = x.size();
  const RingSpec out = cfg.output_ring();
  const RingSpec in = cfg.precision.ring;
  const u64 base = p.reserve_lanes(n);
  const unsigned i = p.index();

  // [t]: components (a0 - a2, a1 - a0 + t, a2 - a1), alphas from seed012
  std::vector<std::uint8_t> t(n, 0);
  if (p.id() != PartyId::P2) {
    const StreamFactory ft(p.seed(SeedId::s01), "drelu-t");
    for (std::size_t j = 0; j < n; ++j) t[j] = ft.lane(base + j).next_bit() ? 1 : 0;
  }
  const StreamFactory fa(p.seed(SeedId::s012), "rss-t-alpha");
  auto t_comp = [&](std::size_t j, unsigned c) {
    auto s = fa.lane(base + j);
    const u64 a0 = s.next_ring(out), a1 = s.next_ring(out), a2 = s.next_ring(out);
    if (c == 0) return out.sub(a0, a2);
    if (c == 1) return out.add(out.sub(a1, a0), t[j]);
    return out.sub(a2, a1);
  };
  LocalRss ts{out, std::vector<u64>(n), std::vector<u64>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    ts.a[j] = t_comp(j, i);
    ts.b[j] = t_comp(j, (i + 1) % 3);
  }

  // [s]: s_1 from seed012, s_2 from seed12, P2 draws s and sends s_0 to P0
  const StreamFactory fs1(p.seed(SeedId::s012), "rss-s1");
  LocalRss ss{out, std::vector<u64>(n), std::vector<u64>(n)};
  std::vector<std::uint8_t> s_bit;
  if (p.id() == PartyId::P2) {
    const StreamFactory fs2(p.seed(SeedId::s12), "rss-s2");
    const StreamFactory fs(p.seed(SeedId::s2), "rss-s");
    s_bit.resize(n);
    std::vector<u64> s0(n);
    for (std::size_t j = 0; j < n; ++j) {
      s_bit[j] = fs.lane(base + j).next_bit() ? 1 : 0;
      const u64 s1 = fs1.lane(base + j).next_ring(out);
      const u64 s2 = fs2.lane(base + j).next_ring(out);
      s0[j] = out.sub(out.sub(s_bit[j], s1), s2);
      ss.a[j] = s2;
      ss.b[j] = s0[j];
    }
    p.send(PartyId::P0, Tag::rss_s0, out.ell, s0);
  } else if (p.id() == PartyId::P0) {
    const auto s0 = p.recv(PartyId::P2, Tag::rss_s0);
    for (std::size_t j = 0; j < n; ++j) {
      ss.a[j] = s0[j];
      ss.b[j] = fs1.lane(base + j).next_ring(out);
    }
  } else {
    const StreamFactory fs2(p.seed(SeedId::s12), "rss-s2");
    for (std::size_t j = 0; j < n; ++j) {
      ss.a[j] = fs1.lane(base + j).next_ring(out);
      ss.b[j] = fs2.lane(base + j).next_ring(out);
    }
  }

  // [s xor t] = [s] + [t] - 2[s][t]
  const LocalRss st = rss_mul_reshare(p, ss, ts, Tag::rss_reshare_pre);
  LocalRss u{out, std::vector<u64>(n), std::vector<u64>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    u.a[j] = out.sub(out.add(ss.a[j], ts.a[j]), out.mul(2, st.a[j]));
    u.b[j] = out.sub(out.add(ss.b[j], ts.b[j]), out.mul(2, st.b[j]));
  }

  // online: P0 uses c0 + c1, P1 uses c2 as 2-of-2 shares of x
  std::vector<std::uint8_t> d2(n);
  if (p.id() == PartyId::P2) {
    const auto bit = p2_collect(p, cfg);
    std::vector<u64> msg(n);
    for (std::size_t j = 0; j < n; ++j) msg[j] = d2[j] = bit[j] ^ s_bit[j];
    p.send(PartyId::P0, Tag::drelu_bcast, 1, msg);
    p.send(PartyId::P1, Tag::drelu_bcast, 1, msg);
  } else {
    Local2 bridge{in, std::vector<u64>(n)};
    for (std::size_t j = 0; j < n; ++j)
      bridge.v[j] = p.id() == PartyId::P0 ? in.add(x.a[j], x.b[j]) : x.b[j];
    p01_send(p, bridge, cfg, base);
    const auto msg = p.recv(PartyId::P2, Tag::drelu_bcast);
    for (std::size_t j = 0; j < n; ++j) d2[j] = static_cast<std::uint8_t>(msg[j]);
  }

  // D'' + [s xor t] - 2 D'' [s xor t]; the constant lands in component 0
  LocalRss res{out, std::vector<u64>(n), std::vector<u64>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    res.a[j] = d2[j] ? out.neg(u.a[j]) : u.a[j];
    res.b[j] = d2[j] ? out.neg(u.b[j]) : u.b[j];
    if (i == 0) res.a[j] = out.add(res.a[j], d2[j]);
    if (i == 2) res.b[j] = out.add(res.b[j], d2[j]);
  }
  return res;
}

LocalRss relu_rss(Party& p, const LocalRss& x, const DreluConfig& cfg) {
  if (!(cfg.output_ring() == x.ring)) throw SpecMismatch("relu: DReLU output ring must match x");
  const LocalRss d = drelu_rss(p, x, cfg);
  return rss_mul_reshare(p, x, d, Tag::rss_reshare);
}

}  // namespace trunclab
