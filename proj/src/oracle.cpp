#include "trunclab/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

namespace trunclab {

RingElement oracle_trc(const RingElement& x, unsigned k) {
  const RingSpec r = x.ring();
  if (k > r.ell) throw ParameterError("oracle_trc: k exceeds ring width");
  if (!r.msb(x.value())) return {cut(x.value(), k, r), r};
  return {r.neg(cut(r.neg(x.value()), k, r)), r};
}

Sign oracle_sign(const RingElement& x, const FixedPointSpec& fp) {
  if (!(x.ring() == fp.ring)) throw SpecMismatch("oracle_sign: ring differs");
  if (!fp.in_band(x.value())) throw RangeError("oracle_sign: value outside the band");
  if (x.value() == 0) return Sign::zero;
  return fp.ring.msb(x.value()) ? Sign::negative : Sign::positive;
}

i64 signed_error(u64 result, u64 expected, RingSpec r) {
  return r.to_signed(r.sub(result, expected));
}

bool is_e1(i64 err, unsigned ell, unsigned k) {
  if (k == 0 || k >= ell) return false;
  const u64 mag = err < 0 ? u64{0} - static_cast<u64>(err) : static_cast<u64>(err);
  return mag >= (u64{1} << (ell - k - 1));
}

RingSpec result_ring(RingSpec r, unsigned k, TrcProtocol proto) {
  return proto == TrcProtocol::det ? RingSpec(r.ell - k) : r;
}

u64 truncate_with_mask(u64 x, u64 mask, unsigned k, RingSpec r, TrcProtocol proto) {
  switch (proto) {
    case TrcProtocol::secureml:
      return r.add(trc_secureml_local(PartyId::P0, r.add(x, mask), k, r),
                   trc_secureml_local(PartyId::P1, r.neg(mask), k, r));
    case TrcProtocol::det: {
      const RingSpec out(r.ell - k);
      return out.add(trc_det_local(PartyId::P0, r.add(x, mask), k, r),
                     trc_det_local(PartyId::P1, r.neg(mask), k, r));
    }
    case TrcProtocol::aby3:
      return r.sub(shift_signed(r.add(x, mask), k, r), shift_signed(mask, k, r));
  }
  return 0;
}

u64 E1Table::total_failures() const {
  u64 t = 0;
  for (const auto& row : rows) t += row.failures;
  return t;
}

u64 E1Table::max_failures() const {
  u64 m = 0;
  for (const auto& row : rows) m = std::max(m, row.failures);
  return m;
}

double E1Table::aggregate_rate() const {
  if (rows.empty() || masks == 0) return 0.0;
  return static_cast<double>(total_failures()) / (static_cast<double>(rows.size()) * masks);
}

namespace {

std::vector<u64> band_values(const FixedPointSpec& fp) {
  const RingSpec r = fp.ring;
  const u64 top = u64{1} << fp.ellx();
  std::vector<u64> xs;
  xs.reserve(2 * top);
  for (u64 v = 0; v < top; ++v) xs.push_back(v);
  for (u64 v = 1; v < top; ++v) xs.push_back(r.neg(v));
  return xs;
}

u64 fixed_mask(unsigned k, RingSpec r) { return r.reduce(u64{1} << k); }

u64 count_failures(u64 x, unsigned k, RingSpec r, TrcProtocol proto, MaskMode mode) {
  const RingSpec out = result_ring(r, k, proto);
  const u64 want = out.reduce(oracle_trc(RingElement(x, r), k).value());
  auto fails = [&](u64 m) {
    return is_e1(signed_error(truncate_with_mask(x, m, k, r, proto), want, out), r.ell, k);
  };
  if (mode == MaskMode::fixed) return fails(fixed_mask(k, r)) ? 1 : 0;
  u64 n = 0;
  for (u64 m = 0; m <= r.mask(); ++m) n += fails(m) ? 1 : 0;
  return n;
}

}  // namespace

E1Table enumerate_e1(const FixedPointSpec& fp, unsigned k, TrcProtocol proto, MaskMode mode,
                     Exec ex) {
  const RingSpec r = fp.ring;
  if (r.ell > 16) throw ParameterError("enumerate_e1: ring too large, use sampling");
  if (k > fp.ellx()) throw ParameterError("enumerate_e1: k exceeds ellx");
  if (!fp.has_slack()) throw ParameterError("enumerate_e1: needs ellx + 1 < ell");
  E1Table t;
  t.fp = fp;
  t.k = k;
  t.proto = proto;
  t.mode = mode;
  t.masks = mode == MaskMode::fixed ? 1 : (u64{1} << r.ell);
  const auto xs = band_values(fp);
  t.rows.resize(xs.size());
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  auto one = [&](std::ptrdiff_t j) {
    t.rows[j] = {xs[j], magnitude(xs[j], r), count_failures(xs[j], k, r, proto, mode)};
  };
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t j = 0; j < n; ++j) one(j);
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) one(j);
  }
  return t;
}

double e1_bound(const FixedPointSpec& fp) {
  return std::ldexp(1.0, -static_cast<int>(fp.ring.ell - fp.ellx() - 1));
}

double e1_law_rate(const FixedPointSpec& fp) {
  // mean of xi / 2^ell over the 2T - 1 band values, T = 2^ellx
  const double t = std::ldexp(1.0, static_cast<int>(fp.ellx()));
  return t * (t - 1) / (2 * t - 1) * std::ldexp(1.0, -static_cast<int>(fp.ring.ell));
}

E1Sample sample_e1(const FixedPointSpec& fp, unsigned k, TrcProtocol proto, MaskMode mode,
                   u64 trials, RandomStream& rng, const u64* x_fixed) {
  const RingSpec r = fp.ring;
  const RingSpec out = result_ring(r, k, proto);
  const u64 top = u64{1} << fp.ellx();
  E1Sample s;
  s.trials = trials;
  for (u64 i = 0; i < trials; ++i) {
    u64 x;
    if (x_fixed) {
      x = r.reduce(*x_fixed);
    } else {
      // uniform over the 2^(ellx+1) - 1 band values
      const u64 j = rng.next_below(2 * top - 1);
      x = j < top ? j : r.neg(j - top + 1);
    }
    const u64 m = mode == MaskMode::fixed ? fixed_mask(k, r) : rng.next_ring(r);
    const u64 want = out.reduce(oracle_trc(RingElement(x, r), k).value());
    if (is_e1(signed_error(truncate_with_mask(x, m, k, r, proto), want, out), r.ell, k))
      ++s.failures;
  }
  return s;
}

LadderOracle ladder_oracle(const RingElement& x, const DreluConfig& cfg) {
  if (cfg.keybits) throw ParameterError("ladder_oracle: key bits are not modeled");
  const FixedPointSpec& fp = cfg.precision;
  if (!(x.ring() == fp.ring)) throw SpecMismatch("ladder_oracle: ring differs");
  if (!fp.in_band(x.value())) throw RangeError("ladder_oracle: value outside the band");
  const RingSpec r = fp.ring;
  const unsigned L = cfg.ladder_bits();
  const RingSpec d(cfg.domain_bits());
  LadderOracle o;
  o.negative = r.msb(x.value());
  o.xi = magnitude(x.value(), r);
  o.lambda = static_cast<unsigned>(std::bit_width(o.xi));
  o.lambda_lo = o.lambda == 0 ? 0 : o.lambda - 1;
  o.lambda_hi = std::min(o.lambda, L);
  o.u_exact.resize(L + 1);
  o.u_candidates.resize(L + 1);
  for (unsigned i = 0; i <= L; ++i) {
    const u64 c = d.reduce(cut(o.xi, i, r));
    o.u_exact[i] = o.negative ? d.neg(c) : c;
    o.u_candidates[i] = {o.u_exact[i]};
    // rung 0 cuts nothing and carries no e0
    if (i > 0) o.u_candidates[i].push_back(o.negative ? d.sub(o.u_exact[i], 1)
                                                      : d.add(o.u_exact[i], 1));
  }
  o.v_exact = ladder_v_local(PartyId::P0, o.u_exact, d.ell);
  if (o.negative) {
    for (unsigned i = 0; i <= L && !o.false_zero_possible; ++i) {
      for (u64 a : o.u_candidates[i]) {
        if (i == L) {
          if (d.sub(a, 1) == 0) o.false_zero_possible = true;
          continue;
        }
        for (u64 b : o.u_candidates[i + 1])
          if (d.sub(d.add(a, b), 1) == 0) o.false_zero_possible = true;
      }
    }
  }
  return o;
}

namespace {

unsigned log2_ceil(unsigned v) { return static_cast<unsigned>(std::bit_width(v - 1U)); }

}  // namespace

Cost cost_model(CostProtocol proto, unsigned ell, unsigned ellx, DreluMode mode) {
  if (ell == 0 || ellx == 0) throw ParameterError("cost_model: parameters must be positive");
  const u64 l = ell, x = ellx, g = mode == DreluMode::guard_bit ? 1 : 0;
  switch (proto) {
    case CostProtocol::falcon: return {4 + log2_ceil(ell), 17 * l};
    case CostProtocol::edabits: return {4 + log2_ceil(ell), 4 * l - 2};
    case CostProtocol::wide_ladder: return {2, x * l};
    case CostProtocol::narrow_ladder: return {2, (x + 1) * (x + 1 + g)};
  }
  return {};
}

Cost cost_model_keybits(CostProtocol proto, unsigned ell, unsigned drop, unsigned key_ellx,
                        DreluMode mode) {
  if (ell == 0 || key_ellx == 0 || drop >= ell)
    throw ParameterError("cost_model_keybits: bad parameters");
  const u64 l = ell, d = drop;
  switch (proto) {
    case CostProtocol::falcon: return {4 + log2_ceil(ell), 16 * (l - d) + l};
    case CostProtocol::edabits: return {4 + log2_ceil(ell), 2 * (l - d - 1) + 2 * l};
    case CostProtocol::wide_ladder:
    case CostProtocol::narrow_ladder: return cost_model(proto, ell, key_ellx, mode);
  }
  return {};
}

CostProtocol parse_cost_protocol(const std::string& s) {
  if (s == "falcon") return CostProtocol::falcon;
  if (s == "edabits") return CostProtocol::edabits;
  if (s == "wide_ladder") return CostProtocol::wide_ladder;
  if (s == "narrow_ladder") return CostProtocol::narrow_ladder;
  throw ParseError("unknown cost protocol: " + s);
}

// ---- exhaustive identity suite ----

namespace {

using Check = std::function<u64(u64 a)>;  // failures for one outer operand

TheoremResult run_outer(const std::string& name, u64 outer, u64 inner_per, const Check& f,
                        Exec ex) {
  TheoremResult res{name, outer * inner_per, 0};
  u64 fails = 0;
  const auto n = static_cast<std::ptrdiff_t>(outer);
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : fails)
    for (std::ptrdiff_t a = 0; a < n; ++a) fails += f(static_cast<u64>(a));
  } else {
    for (std::ptrdiff_t a = 0; a < n; ++a) fails += f(static_cast<u64>(a));
  }
  res.failures = fails;
  return res;
}

bool is_bit(i64 v) { return v == 0 || v == 1; }

}  // namespace

std::vector<TheoremResult> check_theorems(unsigned ell, Exec ex) {
  if (ell < 2 || ell > 12) throw ParameterError("check_theorems: ell must be in [2, 12]");
  const RingSpec r(ell);
  const u64 size = u64{1} << ell;
  std::vector<TheoremResult> out;

  auto icut = [&](u64 a, unsigned k) { return static_cast<i64>(cut(a, k, r)); };
  auto full = [&](unsigned k) { return i64{1} << (ell - k); };  // cut(2^ell, k)

  // cut(a+b) = cut a + cut b - LT(a+b, a) cut(2^ell) + bit, as integers
  out.push_back(run_outer("cut_add", size, size * (ell + 1), [&](u64 a) {
    u64 f = 0;
    for (u64 b = 0; b < size; ++b) {
      const u64 s = r.add(a, b);
      for (unsigned k = 0; k <= ell; ++k) {
        const i64 d = icut(s, k) - icut(a, k) - icut(b, k) + (s < a ? full(k) : 0);
        f += is_bit(d) ? 0 : 1;
      }
    }
    return f;
  }, ex));

  // cut(a-b) = cut a - cut b + LT(a, a-b) cut(2^ell) - bit
  out.push_back(run_outer("cut_sub", size, size * (ell + 1), [&](u64 a) {
    u64 f = 0;
    for (u64 b = 0; b < size; ++b) {
      const u64 s = r.sub(a, b);
      for (unsigned k = 0; k <= ell; ++k) {
        const i64 d = icut(a, k) - icut(b, k) + (a < s ? full(k) : 0) - icut(s, k);
        f += is_bit(d) ? 0 : 1;
      }
    }
    return f;
  }, ex));

  // no wrap: plain additivity up to one carry
  out.push_back(run_outer("cut_add_no_wrap", size, size * (ell + 1), [&](u64 a) {
    u64 f = 0;
    for (u64 b = 0; b < size; ++b) {
      const u64 s = r.add(a, b);
      if (s < a) continue;
      for (unsigned k = 0; k <= ell; ++k)
        f += is_bit(icut(s, k) - icut(a, k) - icut(b, k)) ? 0 : 1;
    }
    return f;
  }, ex));
  out.push_back(run_outer("cut_sub_no_wrap", size, size * (ell + 1), [&](u64 a) {
    u64 f = 0;
    for (u64 b = 0; b < size; ++b) {
      const u64 s = r.sub(a, b);
      if (s > a) continue;
      for (unsigned k = 0; k <= ell; ++k)
        f += is_bit(icut(a, k) - icut(b, k) - icut(s, k)) ? 0 : 1;
    }
    return f;
  }, ex));

  // with wrap: the cut(2^ell) term appears; subtraction adds it back
  out.push_back(run_outer("cut_add_wrap", size, size * (ell + 1), [&](u64 a) {
    u64 f = 0;
    for (u64 b = 0; b < size; ++b) {
      const u64 s = r.add(a, b);
      if (s >= a) continue;
      for (unsigned k = 0; k <= ell; ++k)
        f += is_bit(icut(s, k) - icut(a, k) - icut(b, k) + full(k)) ? 0 : 1;
    }
    return f;
  }, ex));
  out.push_back(run_outer("cut_sub_wrap", size, size * (ell + 1), [&](u64 a) {
    u64 f = 0;
    for (u64 b = 0; b < size; ++b) {
      const u64 s = r.sub(a, b);
      if (s <= a) continue;
      for (unsigned k = 0; k <= ell; ++k)
        f += is_bit(icut(a, k) - icut(b, k) + full(k) - icut(s, k)) ? 0 : 1;
    }
    return f;
  }, ex));

  // cut(-g) = cut(2^ell) - cut(g) - [low k bits of g nonzero], g != 0
  out.push_back(run_outer("cut_negation", size, ell + 1, [&](u64 g) {
    if (g == 0) return u64{0};
    u64 f = 0;
    for (unsigned k = 0; k <= ell; ++k) {
      const i64 low = (g & mask_bits(k)) != 0 ? 1 : 0;
      f += icut(r.neg(g), k) == full(k) - icut(g, k) - low ? 0 : 1;
    }
    return f;
  }, ex));

  // cut_mid(a +- b) = cut_mid a +- cut_mid b +- bit mod 2^(ell-k1-k2)
  auto mid_pairs = [&] {
    u64 n = 0;
    for (unsigned k1 = 0; k1 < ell; ++k1) n += ell - k1;
    return n;
  }();
  out.push_back(run_outer("cut_mid_add", size, size * mid_pairs, [&](u64 a) {
    u64 f = 0;
    for (u64 b = 0; b < size; ++b)
      for (unsigned k1 = 0; k1 < ell; ++k1)
        for (unsigned k2 = 0; k1 + k2 < ell; ++k2) {
          const RingSpec w(ell - k1 - k2);
          const u64 d = w.sub(cut_mid(r.add(a, b), k1, k2, r),
                              w.add(cut_mid(a, k1, k2, r), cut_mid(b, k1, k2, r)));
          f += d <= 1 ? 0 : 1;
        }
    return f;
  }, ex));
  out.push_back(run_outer("cut_mid_sub", size, size * mid_pairs, [&](u64 a) {
    u64 f = 0;
    for (u64 b = 0; b < size; ++b)
      for (unsigned k1 = 0; k1 < ell; ++k1)
        for (unsigned k2 = 0; k1 + k2 < ell; ++k2) {
          const RingSpec w(ell - k1 - k2);
          const u64 d = w.sub(w.sub(cut_mid(a, k1, k2, r), cut_mid(b, k1, k2, r)),
                              cut_mid(r.sub(a, b), k1, k2, r));
          f += d <= 1 ? 0 : 1;
        }
    return f;
  }, ex));

  // protocol level, band ellx = ell - 2, every mask R
  const FixedPointSpec fp(r, 0, ell - 2);
  const auto xs = band_values(fp);
  const auto nx = static_cast<u64>(xs.size());

  // SecureML output in LT form; R = 0 joins the wrap term for negative x
  out.push_back(run_outer("secureml_lt_form", nx, size * (ell - 1), [&](u64 j) {
    const u64 x = xs[j];
    const bool neg = r.msb(x);
    u64 f = 0;
    for (u64 R = 0; R < size; ++R)
      for (unsigned k = 0; k + 1 < ell; ++k) {
        const u64 t = truncate_with_mask(x, R, k, r, TrcProtocol::secureml);
        const u64 wrap = r.reduce(u64{1} << (ell - k));
        if (!neg) {
          const u64 lt = r.add(x, R) < x ? wrap : 0;
          f += r.sub(r.add(t, lt), cut(x, k, r)) <= 1 ? 0 : 1;
        } else {
          const u64 lt = (x < r.add(x, R) || R == 0) ? wrap : 0;
          f += r.sub(r.add(r.neg(cut(r.neg(x), k, r)), lt), t) <= 1 ? 0 : 1;
        }
      }
    return f;
  }, ex));

  // deterministic mid truncation: +-cut_mid(xi) +- bit for every mask
  out.push_back(run_outer("det_trc_mid_band", nx, size * mid_pairs, [&](u64 j) {
    const u64 x = xs[j];
    const bool neg = r.msb(x);
    const u64 xi = magnitude(x, r);
    u64 f = 0;
    for (u64 R = 0; R < size; ++R) {
      const u64 s0 = r.add(x, R), s1 = r.neg(R);
      for (unsigned k1 = 0; k1 < ell; ++k1)
        for (unsigned k2 = 0; k1 + k2 < ell; ++k2) {
          const RingSpec w(ell - k1 - k2);
          const u64 t = w.add(trc_det_mid_local(PartyId::P0, s0, k1, k2, r),
                              trc_det_mid_local(PartyId::P1, s1, k1, k2, r));
          const u64 c = cut_mid(xi, k1, k2, r);
          const u64 d = neg ? w.sub(w.neg(c), t) : w.sub(t, c);
          f += d <= 1 ? 0 : 1;
        }
    }
    return f;
  }, ex));

  // exact e0 condition on the low k1 bits
  out.push_back(run_outer("det_trc_e0_condition", nx, size * mid_pairs, [&](u64 j) {
    const u64 x = xs[j];
    const bool neg = r.msb(x);
    const u64 xi = magnitude(x, r);
    u64 f = 0;
    for (u64 R = 0; R < size; ++R) {
      const u64 s0 = r.add(x, R), s1 = r.neg(R);
      for (unsigned k1 = 0; k1 < ell; ++k1) {
        const u64 xl = xi & mask_bits(k1), rl = R & mask_bits(k1);
        const u64 bit = neg ? (rl < xl ? 1 : 0) : (xl + rl >= (u64{1} << k1) ? 1 : 0);
        for (unsigned k2 = 0; k1 + k2 < ell; ++k2) {
          const RingSpec w(ell - k1 - k2);
          const u64 t = w.add(trc_det_mid_local(PartyId::P0, s0, k1, k2, r),
                              trc_det_mid_local(PartyId::P1, s1, k1, k2, r));
          const u64 c = cut_mid(xi, k1, k2, r);
          const u64 want = neg ? w.sub(w.neg(c), bit) : w.add(c, bit);
          f += t == want ? 0 : 1;
        }
      }
    }
    return f;
  }, ex));

  // ladder shape over both DReLU domains
  for (DreluMode mode : {DreluMode::literal, DreluMode::guard_bit}) {
    const unsigned g = mode == DreluMode::guard_bit ? 1 : 0;
    const unsigned L = (ell - g) / 2;
    if (L < 1) continue;
    const DreluConfig cfg(FixedPointSpec(r, 0, L), mode);
    const RingSpec d(cfg.domain_bits());
    const auto lx = band_values(cfg.precision);
    const std::string tag = mode == DreluMode::guard_bit ? "_guard" : "_literal";
    // a +-1 at rung lambda-1 or lambda starts a run of +-1 followed only by
    // zeros; for negatives the run may reach the top rung
    out.push_back(run_outer("ladder_pattern" + tag, lx.size(), size, [&, cfg, d](u64 j) {
      const u64 x = lx[j];
      if (x == 0) return u64{0};
      const bool neg = r.msb(x);
      const unsigned lam = static_cast<unsigned>(std::bit_width(magnitude(x, r)));
      const u64 one = neg ? d.mask() : 1;
      u64 f = 0;
      for (u64 R = 0; R < size; ++R) {
        const auto u0 = ladder_local(PartyId::P0, r.add(x, R), cfg);
        const auto u1 = ladder_local(PartyId::P1, r.neg(R), cfg);
        std::vector<u64> u(u0.size());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = d.add(u0[i], u1[i]);
        const std::size_t start = u[lam - 1] == one ? lam - 1 : lam;
        bool ok = start < u.size() && u[start] == one;
        for (std::size_t i = start + 1; ok && i < u.size(); ++i)
          ok = u[i] == 0 || (u[i] == one && u[i - 1] == one);
        f += ok ? 0 : 1;
      }
      return f;
    }, ex));
  }
  return out;
}

}  // namespace trunclab
