#include "trunclab/inference.hpp"

#include <cmath>
#include <cstdio>

#include "trunclab/oracle.hpp"

namespace trunclab {

StrategyKind parse_strategy(const std::string& s) {
  if (s == "mult_then_trc_fixed") return StrategyKind::mult_then_trc_fixed;
  if (s == "mult_then_trc_random") return StrategyKind::mult_then_trc_random;
  if (s == "trc_then_mult_random") return StrategyKind::trc_then_mult_random;
  if (s == "det_trc") return StrategyKind::det_trc;
  throw ParseError("unknown strategy: " + s);
}

std::string strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::mult_then_trc_fixed: return "mult_then_trc_fixed";
    case StrategyKind::mult_then_trc_random: return "mult_then_trc_random";
    case StrategyKind::trc_then_mult_random: return "trc_then_mult_random";
    case StrategyKind::det_trc: return "det_trc";
  }
  return "?";
}

namespace {

Local2 truncate(Party& p, const Local2& v, unsigned k, const TruncStrategy& s) {
  switch (s.kind) {
    case StrategyKind::det_trc: return trc_det_lift(p, v, k);
    case StrategyKind::mult_then_trc_fixed:
      if (s.trc != TrcProtocol::aby3) throw ParameterError("fixed masks need the aby3 truncation");
      return trc_aby3(p, v, k, MaskMode::fixed);
    case StrategyKind::mult_then_trc_random:
    case StrategyKind::trc_then_mult_random:
      if (s.trc == TrcProtocol::secureml && s.kind == StrategyKind::mult_then_trc_random) {
        Local2 out{v.ring, std::vector<u64>(v.size())};
        if (p.id() != PartyId::P2) trc_secureml_batch(p.id(), v.v, out.v, k, v.ring, p.exec());
        return out;
      }
      return trc_aby3(p, v, k, MaskMode::random);
  }
  return v;
}

// sums consecutive groups of `in` entries
Local2 sum_groups(const Local2& v, std::size_t in) {
  const RingSpec r = v.ring;
  Local2 out{r, std::vector<u64>(v.size() / in)};
  for (std::size_t g = 0; g < out.size(); ++g) {
    u64 s = 0;
    for (std::size_t i = 0; i < in; ++i) s = r.add(s, v.v[g * in + i]);
    out.v[g] = s;
  }
  return out;
}

}  // namespace

Local2 linear_layer(Party& p, const Local2& x, std::size_t n, const Local2& w, const Local2& b,
                    std::size_t in, std::size_t out, unsigned frac, const TruncStrategy& s) {
  const RingSpec r = x.ring;
  if (x.size() != n * in || w.size() != in * out || b.size() != out)
    throw ParameterError("linear_layer: dimensions do not agree");
  Local2 xs = x, ws = w;
  if (s.kind == StrategyKind::trc_then_mult_random) {
    xs = truncate(p, x, (frac + 1) / 2, s);
    ws = truncate(p, w, frac / 2, s);
  }
  // (row, o, i) products, i fastest
  const std::size_t m = n * out * in;
  Local2 xr{r, std::vector<u64>(m)}, wr{r, std::vector<u64>(m)};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t o = 0; o < out; ++o)
      for (std::size_t i = 0; i < in; ++i) {
        const std::size_t at = (j * out + o) * in + i;
        xr.v[at] = xs.v[j * in + i];
        wr.v[at] = ws.v[i * out + o];
      }
  const LocalTriples t = triples_from_seeds(p, m, r);
  const Local2 prod = beaver_mul(p, xr, wr, t);
  Local2 acc;
  if (s.kind == StrategyKind::trc_then_mult_random) {
    acc = sum_groups(prod, in);
  } else if (s.accumulate) {
    acc = truncate(p, sum_groups(prod, in), frac, s);
  } else {
    acc = sum_groups(truncate(p, prod, frac, s), in);
  }
  if (p.id() != PartyId::P2)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t o = 0; o < out; ++o) acc.v[j * out + o] = r.add(acc.v[j * out + o], b.v[o]);
  return acc;
}

namespace {

std::optional<KeyBits> choose_keybits(const InferConfig& cfg) {
  if (cfg.keybits) return cfg.keybits;
  return fit_keybits(cfg.fp, cfg.mode);
}

}  // namespace

InferResult infer(const ToyModel& model, const Dataset& data, const InferConfig& cfg,
                  Transport& transport) {
  if (model.layers.empty() || data.dim != model.layers.front().in)
    throw ParameterError("infer: dataset width does not match the model");
  const FixedPointSpec& fp = cfg.fp;
  const RingSpec r = fp.ring;
  const ToyModel m = model.at_frac(fp.frac_bits);
  const std::optional<KeyBits> kb = choose_keybits(cfg);
  const DreluConfig dcfg(fp, cfg.mode, kb, r);

  CommMeter meter;
  Session session{transport, meter, SeedSet::derive(cfg.seed)};
  RandomStream rng(session.seeds.seed2, "infer-share");
  auto share_of = [&](u64 v) { return share2(RingElement(v, r), RingElement(rng.next_ring(r), r)); };

  const std::size_t n = data.size();
  std::vector<Share2> xs;
  xs.reserve(n * data.dim);
  for (double v : data.x) xs.push_back(share_of(encode_fixed(v, fp).value()));

  // per layer, per party views of the shared weights
  struct LayerViews {
    std::array<Local2, 3> w, b;
  };
  std::vector<LayerViews> views;
  for (const auto& l : m.layers) {
    std::vector<Share2> ws, bs;
    for (i64 v : l.w) ws.push_back(share_of(r.from_signed(v)));
    for (i64 v : l.b) bs.push_back(share_of(r.from_signed(v)));
    LayerViews lv;
    for (unsigned i = 0; i < 3; ++i) {
      lv.w[i] = local_view(ws, party(i));
      lv.b[i] = local_view(bs, party(i));
    }
    views.push_back(std::move(lv));
  }

  const auto out = run_ubl(session, xs, [&](Party& p, const Local2& x) {
    Local2 h = x;
    for (std::size_t li = 0; li < m.layers.size(); ++li) {
      const auto& l = m.layers[li];
      h = linear_layer(p, h, n, views[li].w[p.index()], views[li].b[p.index()], l.in, l.out,
                       fp.frac_bits, cfg.strategy);
      if (l.act == Activation::relu) h = relu_ubl(p, h, dcfg);
    }
    return h;
  });

  InferResult res;
  const std::size_t classes = m.layers.back().out;
  res.outputs.resize(out.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    res.outputs[j] = std::ldexp(static_cast<double>(r.to_signed(open2(out[j]).value())),
                                -static_cast<int>(fp.frac_bits));
  std::size_t ok = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const int lab = argmax(&res.outputs[j * classes], classes);
    res.labels.push_back(lab);
    ok += lab == data.label[j] ? 1 : 0;
  }
  res.accuracy = n ? static_cast<double>(ok) / n : 0.0;
  res.keybits = kb;
  res.drelu_bits_per_input = dcfg.bits_per_input();
  res.rounds = meter.rounds();
  res.meter_csv = meter.table_csv();
  return res;
}

InferResult infer(const ToyModel& model, const Dataset& data, const InferConfig& cfg) {
  InProcTransport t;
  return infer(model, data, cfg, t);
}

std::vector<KeybitsRow> keybits_sweep(const ToyModel& model, const Dataset& data,
                                      const InferConfig& base, const std::vector<KeyBits>& grid,
                                      const std::string& transport) {
  if (grid.empty()) throw ParameterError("keybits_sweep: empty grid");
  std::vector<KeybitsRow> rows;
  for (const KeyBits& k : grid) {
    InferConfig c = base;
    c.keybits = k;
    const auto t = make_transport(transport);
    const InferResult r = infer(model, data, c, *t);
    rows.push_back({k, r.accuracy,
                    cost_model(CostProtocol::narrow_ladder, base.fp.ring.ell, k.ellx(), base.mode).bits});
  }
  return rows;
}

std::string keybits_csv(const std::vector<KeybitsRow>& rows) {
  std::string s = "int_key,frac_key,accuracy,drelu_bits\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%u,%u,%.4f,%llu\n", r.key.int_bits, r.key.frac_bits, r.accuracy,
                  static_cast<unsigned long long>(r.drelu_bits));
    s += buf;
  }
  return s;
}

}  // namespace trunclab
