#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "trunclab/inference.hpp"
#include "trunclab/oracle.hpp"

using namespace trunclab;

namespace {

const std::string kData = TRUNCLAB_DATA_DIR;

const ToyModel& fixture() {
  static const ToyModel m = load_model(kData + "/toy_model.txt");
  return m;
}

const Dataset& moons() {
  static const Dataset d = load_dataset(kData + "/moons.csv");
  return d;
}

std::vector<Share2> share_all(const std::vector<u64>& xs, RingSpec r, u64 seed) {
  RandomStream rng(SeedSet::derive(seed).seed2, "test-share");
  std::vector<Share2> s;
  for (u64 x : xs) s.push_back(share2(RingElement(x, r), RingElement(rng.next_ring(r), r)));
  return s;
}

std::vector<u64> opened(const std::vector<Share2>& s) {
  std::vector<u64> v;
  for (const auto& x : s) v.push_back(open2(x).value());
  return v;
}

std::vector<u64> run2(const std::vector<u64>& xs, RingSpec r, u64 seed, const Program2& fn) {
  InProcTransport t;
  CommMeter meter;
  Session s{t, meter, SeedSet::derive(seed)};
  return opened(run_ubl(s, share_all(xs, r, seed), fn));
}

const char* kTiny =
    "trunclab-model 1\n"
    "# comment\n"
    "ring 32\nint 5\nfrac 4\nreference_accuracy 0.5000\n"
    "layer 2 2 relu\nW 16 -16\nW 0 8\nb 1 -3\n"
    "layer 2 2 none\nW 16 0\nW 0 16\nb 0 0\n";

}  // namespace

TEST(Model, ParseAndRoundTrip) {
  std::istringstream in(kTiny);
  const ToyModel m = parse_model(in);
  ASSERT_EQ(m.layers.size(), 2U);
  EXPECT_EQ(m.frac_bits, 4U);
  EXPECT_EQ(m.layers[0].w, (std::vector<i64>{16, -16, 0, 8}));
  EXPECT_DOUBLE_EQ(m.weight(0, 0, 1), -1.0);
  EXPECT_DOUBLE_EQ(m.bias(0, 1), -3.0 / 16);
  std::ostringstream out;
  write_model(out, m);
  std::istringstream back(out.str());
  const ToyModel m2 = parse_model(back);
  EXPECT_EQ(m2.layers[0].w, m.layers[0].w);
  EXPECT_EQ(m2.layers[1].b, m.layers[1].b);
  EXPECT_DOUBLE_EQ(m2.reference_accuracy, 0.5);
}

TEST(Model, ParseErrors) {
  auto bad = [](const std::string& s) {
    std::istringstream in(s);
    return parse_model(in);
  };
  EXPECT_THROW(bad(""), ParseError);
  EXPECT_THROW(bad("model 1\n"), ParseError);
  EXPECT_THROW(bad("trunclab-model 2\n"), ParseError);
  EXPECT_THROW(bad("trunclab-model 1\nlayer 2 2 tanh\n"), ParseError);
  EXPECT_THROW(bad("trunclab-model 1\nlayer 2 2 relu\nW 1 2\nb 0 0\n"), ParseError);
  EXPECT_THROW(bad("trunclab-model 1\nlayer 2 2 relu\nW 1 2 3\n"), ParseError);
  EXPECT_THROW(bad("trunclab-model 1\nW 1 2\n"), ParseError);
  EXPECT_THROW(bad("trunclab-model 1\nlayer 1 2 relu\nW 1 1\nb 0 0\nlayer 3 1 none\n"), ParseError);
  std::istringstream ragged("a,b,label\n1,2,0\n1,0\n");
  EXPECT_THROW(parse_dataset(ragged), ParseError);
  std::istringstream junk("a,b,label\n1,x,0\n");
  EXPECT_THROW(parse_dataset(junk), ParseError);
}

TEST(Model, AtFracRoundsHalfAway) {
  std::istringstream in(kTiny);
  const ToyModel m = parse_model(in);
  const ToyModel lo = m.at_frac(1);  // divide by 8
  EXPECT_EQ(lo.layers[0].w, (std::vector<i64>{2, -2, 0, 1}));
  EXPECT_EQ(lo.layers[0].b, (std::vector<i64>{0, 0}));  // 1/8 -> 0, -3/8 -> 0
  const ToyModel hi = m.at_frac(6);
  EXPECT_EQ(hi.layers[0].b, (std::vector<i64>{4, -12}));
  const ToyModel two = m.at_frac(3);  // halves, ties away from zero
  EXPECT_EQ(two.layers[0].b, (std::vector<i64>{1, -2}));
}

TEST(Model, FixtureReferenceAccuracy) {
  const ToyModel& m = fixture();
  EXPECT_EQ(moons().size(), 500U);
  EXPECT_EQ(moons().dim, 2U);
  ASSERT_GE(m.reference_accuracy, 0.0);
  EXPECT_NEAR(float_accuracy(m, moons()), m.reference_accuracy, 5e-5);
}

TEST(DetLift, WithinOneUlpOverTheBand) {
  const RingSpec r(16);
  for (unsigned k : {1U, 4U, 7U}) {
    const unsigned m = 16 - k;
    const u64 lim = u64{1} << (m - 2 + k);  // |x| < 2^(ell-2)
    std::vector<u64> xs;
    for (u64 v = 0; v < lim; v += 3) {
      xs.push_back(v);
      xs.push_back(r.neg(v));
    }
    const auto got = run2(xs, r, 11 + k, [k](Party& p, const Local2& x) { return trc_det_lift(p, x, k); });
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const u64 want = oracle_trc(RingElement(xs[i], r), k).value();
      ASSERT_LE(std::abs(signed_error(got[i], want, r)), 1) << "x=" << xs[i] << " k=" << k;
    }
  }
  const auto zero = run2({0, 0, 0}, r, 3, [](Party& p, const Local2& x) { return trc_det_lift(p, x, 5); });
  for (u64 z : zero) EXPECT_LE(std::abs(signed_error(z, 0, r)), 1);
}

TEST(DetLift, RejectsTinyRemainder) {
  const RingSpec r(8);
  EXPECT_THROW(run2({1}, r, 1, [](Party& p, const Local2& x) { return trc_det_lift(p, x, 7); }),
               ParameterError);
}

namespace {

// runs one linear layer on public w and b (shared inside)
std::vector<u64> layer_run(const std::vector<u64>& x, std::size_t n, const std::vector<u64>& w,
                           const std::vector<u64>& b, std::size_t in, std::size_t out,
                           unsigned frac, TruncStrategy s, RingSpec r, u64 seed) {
  std::vector<u64> all = x;
  all.insert(all.end(), w.begin(), w.end());
  all.insert(all.end(), b.begin(), b.end());
  const auto got = run2(all, r, seed, [&](Party& p, const Local2& v) {
    const auto at = [&](std::size_t from, std::size_t len) {
      return Local2{r, std::vector<u64>(v.v.begin() + from, v.v.begin() + from + len)};
    };
    const Local2 y = linear_layer(p, at(0, x.size()), n, at(x.size(), w.size()),
                                  at(x.size() + w.size(), b.size()), in, out, frac, s);
    Local2 pad{r, std::vector<u64>(v.size())};
    std::copy(y.v.begin(), y.v.end(), pad.v.begin());
    return pad;
  });
  return {got.begin(), got.begin() + n * out};
}

}  // namespace

TEST(LinearLayer, IdentityDetWithinOneUlp) {
  const RingSpec r(32);
  const unsigned frac = 8;
  std::vector<u64> x;
  for (int i = -40; i < 40; ++i) x.push_back(r.from_signed(i * 97));
  const std::vector<u64> w{u64{1} << frac, 0, 0, u64{1} << frac};
  const auto got = layer_run(x, x.size() / 2, w, {0, 0}, 2, 2, frac,
                             {StrategyKind::det_trc}, r, 5);
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_LE(std::abs(signed_error(got[i], x[i], r)), 1) << i;
}

TEST(LinearLayer, TrcThenMultSmallProduct) {
  const RingSpec r(32);
  const unsigned frac = 8;
  for (u64 seed = 1; seed <= 20; ++seed) {
    const auto got = layer_run({3U << frac}, 1, {2U << frac}, {0}, 1, 1, frac,
                               {StrategyKind::trc_then_mult_random}, r, seed);
    EXPECT_LE(std::abs(signed_error(got[0], 6U << frac, r)), 2) << seed;
  }
}

TEST(LinearLayer, StrategiesAgreeOnSmallValues) {
  const RingSpec r(32);
  const unsigned frac = 8;
  // 3 rows x 2 inputs, 2 outputs
  const std::vector<i64> xv{256, -128, 64, 512, -300, 7};
  const std::vector<i64> wv{128, -256, 384, 64};
  const std::vector<i64> bv{10, -20};
  std::vector<u64> x, w, b;
  for (i64 v : xv) x.push_back(r.from_signed(v));
  for (i64 v : wv) w.push_back(r.from_signed(v));
  for (i64 v : bv) b.push_back(r.from_signed(v));
  for (auto kind : {StrategyKind::mult_then_trc_fixed, StrategyKind::mult_then_trc_random,
                    StrategyKind::trc_then_mult_random, StrategyKind::det_trc}) {
    for (bool acc : {true, false}) {
      const auto got = layer_run(x, 3, w, b, 2, 2, frac, {kind, TrcProtocol::aby3, acc}, r, 9);
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t o = 0; o < 2; ++o) {
          double want = bv[o];
          for (std::size_t i = 0; i < 2; ++i) want += xv[j * 2 + i] * double(wv[i * 2 + o]) / 256;
          const double tol = kind == StrategyKind::trc_then_mult_random ? 24 : 3;
          EXPECT_NEAR(double(r.to_signed(got[j * 2 + o])), want, tol)
              << strategy_name(kind) << " acc=" << acc;
        }
    }
  }
}

TEST(LinearLayer, PerMultiplyE1RateMatchesLaw) {
  // 2 frac + int = ell - 1 with ell = 16, int = 1, frac = 7
  const RingSpec r(16);
  const unsigned frac = 7;
  RandomStream rng(Seed{}, "e1-inputs");
  std::vector<u64> xs, ws;
  double predicted = 0;
  const std::size_t n = 20000;
  while (xs.size() < n) {
    const i64 a = static_cast<i64>(rng.next_below(511)) - 255;
    const i64 b = static_cast<i64>(rng.next_below(511)) - 255;
    if (std::abs(a * b) >= (i64{1} << 15)) continue;
    xs.push_back(r.from_signed(a));
    ws.push_back(r.from_signed(b));
    predicted += std::ldexp(static_cast<double>(std::abs(a * b)), -16);
  }
  predicted /= n;
  std::vector<u64> all = xs;
  all.insert(all.end(), ws.begin(), ws.end());
  const auto got = run2(all, r, 4, [&](Party& p, const Local2& v) {
    const Local2 x{r, std::vector<u64>(v.v.begin(), v.v.begin() + n)};
    const Local2 w{r, std::vector<u64>(v.v.begin() + n, v.v.end())};
    const Local2 prod = beaver_mul(p, x, w, triples_from_seeds(p, n, r));
    Local2 t = trc_aby3(p, prod, frac, MaskMode::random);
    t.v.resize(2 * n);
    return t;
  });
  std::size_t e1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const u64 prod = r.mul(xs[i], ws[i]);
    const u64 want = oracle_trc(RingElement(prod, r), frac).value();
    e1 += is_e1(signed_error(got[i], want, r), 16, frac) ? 1 : 0;
  }
  const double rate = static_cast<double>(e1) / n;
  const double sd = std::sqrt(predicted * (1 - predicted) / n);
  EXPECT_NEAR(rate, predicted, 4 * sd);
  EXPECT_GT(predicted, 0.15);
  EXPECT_LT(predicted, 0.30);
}

TEST(Inference, DetBaselineMatchesFloat) {
  InferConfig cfg;
  cfg.strategy = {StrategyKind::det_trc};
  const InferResult res = infer(fixture(), moons(), cfg);
  EXPECT_GE(res.accuracy, fixture().reference_accuracy - 0.01);
  EXPECT_FALSE(res.keybits.has_value());
  EXPECT_EQ(res.labels.size(), 500U);
}

TEST(Inference, FullPrecisionKeyEqualsBaseline) {
  InferConfig cfg;
  cfg.strategy = {StrategyKind::det_trc};
  const InferResult base = infer(fixture(), moons(), cfg);
  cfg.keybits = KeyBits{cfg.fp.int_bits, cfg.fp.frac_bits};
  const InferResult full = infer(fixture(), moons(), cfg);
  EXPECT_EQ(full.labels, base.labels);
  EXPECT_EQ(full.outputs, base.outputs);
  const auto rows = keybits_sweep(fixture(), moons(), cfg, {KeyBits{4, 2}});
  ASSERT_EQ(rows.size(), 1U);
  EXPECT_EQ(rows[0].drelu_bits, cost_model(CostProtocol::narrow_ladder, 32, 6, cfg.mode).bits);
  EXPECT_EQ(keybits_csv(rows).substr(0, 33), "int_key,frac_key,accuracy,drelu_b");
}

TEST(Inference, HighFracCollapseOrdering) {
  InferConfig cfg;
  cfg.fp = FixedPointSpec(RingSpec(32), 5, 13);
  cfg.seed = 3;
  auto acc = [&](StrategyKind k) {
    cfg.strategy = {k};
    return infer(fixture(), moons(), cfg).accuracy;
  };
  const double fixed = acc(StrategyKind::mult_then_trc_fixed);
  const double random = acc(StrategyKind::mult_then_trc_random);
  const double split = acc(StrategyKind::trc_then_mult_random);
  const double det = acc(StrategyKind::det_trc);
  EXPECT_GE(fixed - random, 0.20);
  EXPECT_LE(fixed - split, 0.03);
  EXPECT_GE(det, fixed - 0.01);
}

TEST(Inference, TcpMatchesInProc) {
  InferConfig cfg;
  cfg.strategy = {StrategyKind::mult_then_trc_random};
  cfg.seed = 8;
  Dataset small = moons();
  small.x.resize(60 * small.dim);
  small.label.resize(60);
  InProcTransport a;
  TcpTransport b;
  const InferResult ra = infer(fixture(), small, cfg, a);
  const InferResult rb = infer(fixture(), small, cfg, b);
  EXPECT_EQ(ra.outputs, rb.outputs);
  EXPECT_EQ(ra.meter_csv, rb.meter_csv);
}
