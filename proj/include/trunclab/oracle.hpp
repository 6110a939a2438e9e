#pragma once

#include <string>
#include <vector>

#include "trunclab/drelu.hpp"
#include "trunclab/exec.hpp"
#include "trunclab/random.hpp"
#include "trunclab/ring.hpp"
#include "trunclab/truncation.hpp"

namespace trunclab {

// plaintext truncation: cut(xi, k) for positive x, 2^ell - cut(xi, k) for negative
RingElement oracle_trc(const RingElement& x, unsigned k);

enum class Sign { negative, positive, zero };
Sign oracle_sign(const RingElement& x, const FixedPointSpec& fp);
// DReLU value the protocol must return; zero has no fixed answer
inline u64 drelu_of(Sign s) { return s == Sign::positive ? 1 : 0; }

// (result - expected) as a signed value of the result ring
i64 signed_error(u64 result, u64 expected, RingSpec r);
// the large error: |err| >= 2^(ell-k-1)
bool is_e1(i64 err, unsigned ell, unsigned k);

// one truncation with a given mask, opened. secureml/det use R as the share
// mask, aby3 uses r as the pair mask (r' = floor(r/2^k), signed).
u64 truncate_with_mask(u64 x, u64 mask, unsigned k, RingSpec r, TrcProtocol proto);
RingSpec result_ring(RingSpec r, unsigned k, TrcProtocol proto);

struct E1Row {
  u64 x = 0;
  u64 xi = 0;
  u64 failures = 0;
};

struct E1Table {
  FixedPointSpec fp;
  unsigned k = 0;
  TrcProtocol proto = TrcProtocol::secureml;
  MaskMode mode = MaskMode::random;
  u64 masks = 0;  // masks tried per x
  std::vector<E1Row> rows;

  u64 total_failures() const;
  u64 max_failures() const;
  double aggregate_rate() const;
};

// every band input against every mask (or the single fixed mask)
E1Table enumerate_e1(const FixedPointSpec& fp, unsigned k, TrcProtocol proto, MaskMode mode,
                     Exec ex = Exec::parallel);
// 2^-(ell - ellx - 1)
double e1_bound(const FixedPointSpec& fp);
// the law: a random mask fails on exactly xi of the 2^ell masks
double e1_law_rate(const FixedPointSpec& fp);

struct E1Sample {
  u64 trials = 0;
  u64 failures = 0;
  double rate() const { return trials ? static_cast<double>(failures) / trials : 0.0; }
};
// x uniform over the band (or fixed if x_fixed is set), fresh mask per trial
E1Sample sample_e1(const FixedPointSpec& fp, unsigned k, TrcProtocol proto, MaskMode mode,
                   u64 trials, RandomStream& rng, const u64* x_fixed = nullptr);

struct LadderOracle {
  u64 xi = 0;
  bool negative = false;
  unsigned lambda = 0;     // bit length of xi
  unsigned lambda_lo = 0;  // first rung that may read +-1
  unsigned lambda_hi = 0;  // last rung that may read +-1
  std::vector<u64> u_exact;  // no carries
  std::vector<std::vector<u64>> u_candidates;
  std::vector<u64> v_exact;
  // negative input with some carry pattern giving v_i == 0
  bool false_zero_possible = false;
};
LadderOracle ladder_oracle(const RingElement& x, const DreluConfig& cfg);

enum class CostProtocol { falcon, edabits, wide_ladder, narrow_ladder };
struct Cost {
  unsigned rounds = 0;
  u64 bits = 0;
};
Cost cost_model(CostProtocol proto, unsigned ell, unsigned ellx,
                DreluMode mode = DreluMode::literal);
// drop = low fraction bits removed, key_ellx = bits kept for the sign
Cost cost_model_keybits(CostProtocol proto, unsigned ell, unsigned drop, unsigned key_ellx,
                        DreluMode mode = DreluMode::literal);
CostProtocol parse_cost_protocol(const std::string& s);

struct TheoremResult {
  std::string name;
  u64 checks = 0;
  u64 failures = 0;
};
// exhaustive identity checks over all operands of Z_{2^ell}
std::vector<TheoremResult> check_theorems(unsigned ell, Exec ex = Exec::parallel);

}  // namespace trunclab
