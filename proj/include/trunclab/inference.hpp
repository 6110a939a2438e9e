#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trunclab/drelu.hpp"
#include "trunclab/model.hpp"
#include "trunclab/session.hpp"
#include "trunclab/truncation.hpp"

namespace trunclab {

enum class StrategyKind { mult_then_trc_fixed, mult_then_trc_random, trc_then_mult_random, det_trc };

struct TruncStrategy {
  StrategyKind kind = StrategyKind::det_trc;
  // used by the mult_then_trc kinds; trc_then_mult always uses aby3
  TrcProtocol trc = TrcProtocol::aby3;
  // sum a neuron's products before truncating (true) or truncate each product
  bool accumulate = true;
};

StrategyKind parse_strategy(const std::string& s);
std::string strategy_name(StrategyKind k);

struct InferConfig {
  FixedPointSpec fp{RingSpec(32), 5, 8};
  TruncStrategy strategy{};
  DreluMode mode = DreluMode::guard_bit;
  // key bits inside DReLU; when unset and the full precision does not fit the
  // ladder, the widest fitting key fraction is used
  std::optional<KeyBits> keybits;
  u64 seed = 1;
};

// One dense layer over a batch of n rows. x holds n * in shares, w in * out,
// b out (all at fp.frac_bits). Returns n * out shares at fp.frac_bits.
Local2 linear_layer(Party& p, const Local2& x, std::size_t n, const Local2& w, const Local2& b,
                    std::size_t in, std::size_t out, unsigned frac, const TruncStrategy& s);

struct InferResult {
  std::vector<int> labels;
  std::vector<double> outputs;  // n * classes, decoded
  double accuracy = 0;
  std::optional<KeyBits> keybits;  // what DReLU used
  u64 drelu_bits_per_input = 0;
  unsigned rounds = 0;
  std::string meter_csv;
};

InferResult infer(const ToyModel& model, const Dataset& data, const InferConfig& cfg,
                  Transport& transport);
InferResult infer(const ToyModel& model, const Dataset& data, const InferConfig& cfg);

struct KeybitsRow {
  KeyBits key;
  double accuracy = 0;
  u64 drelu_bits = 0;
};

// one inference per key; the cost column is cost_model(narrow_ladder) for the key
std::vector<KeybitsRow> keybits_sweep(const ToyModel& model, const Dataset& data,
                                      const InferConfig& base, const std::vector<KeyBits>& grid,
                                      const std::string& transport = "inproc");
std::string keybits_csv(const std::vector<KeybitsRow>& rows);

}  // namespace trunclab
