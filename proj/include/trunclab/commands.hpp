#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include "trunclab/inference.hpp"
#include "trunclab/oracle.hpp"

namespace trunclab {

// Batch experiment drivers behind the command line tool. Each writes its CSV
// to `csv` and a human summary to `log`, and returns the process exit code.
// CSV never contains timings, so reruns with the same seed diff clean.

enum ExitCode : int { kExitOk = 0, kExitVerify = 1, kExitUsage = 2 };

struct CommonArgs {
  u64 seed = 1;
  std::string transport = "inproc";
};

// "a:b" or "a", inclusive
std::pair<unsigned, unsigned> parse_range(const std::string& s);
DreluMode parse_drelu_mode(const std::string& s);
TrcProtocol parse_trc_protocol(const std::string& s);
MaskMode parse_mask_mode(const std::string& s);
KeyBits parse_keybits(const std::string& s);  // "int,frac"

struct TrcSweepArgs {
  CommonArgs common;
  std::string ell = "8:12";
  // absolute ellx range, or a slack range (ell - ellx) when slack is set
  std::string ellx;
  std::string slack = "2:4";
  unsigned k = 2;
  TrcProtocol protocol = TrcProtocol::secureml;
  MaskMode mask = MaskMode::random;
  u64 trials = 100000;
  bool per_x = false;
};
// exhaustive for ell <= 16, the closed-form law above. Exit 1 when an
// enumerated positive input breaks the law for its protocol and mask.
int cmd_trc_sweep(const TrcSweepArgs& a, std::ostream& csv, std::ostream& log);

struct DreluVerifyArgs {
  CommonArgs common;
  unsigned ell = 16;
  unsigned ellx = 5;
  DreluMode mode = DreluMode::guard_bit;
  unsigned seeds = 64;
  u64 sample = 0;  // 0 = every nonzero band input
  bool ubl = true, rss = true;
};
// mismatches against oracle_sign. Exit 1 on any guard_bit mismatch, or on a
// literal mismatch the ladder oracle does not predict.
int cmd_drelu_verify(const DreluVerifyArgs& a, std::ostream& csv, std::ostream& log);

struct BenchArgs {
  CommonArgs common;
  std::string op = "drelu";  // drelu | relu
  std::size_t batch = 1024;
  unsigned ell = 32;
  unsigned ellx = 7;
  DreluMode mode = DreluMode::guard_bit;
  std::string link = "all";  // lan1 | lan2 | wan | all
  unsigned reps = 3;
  std::string meter_out;  // optional path for the meter table
};
int cmd_bench(const BenchArgs& a, std::ostream& csv, std::ostream& log);

struct InferArgs {
  CommonArgs common;
  std::string model;
  std::string data;
  std::string strategy = "det_trc";
  TrcProtocol trc = TrcProtocol::aby3;
  bool accumulate = true;
  unsigned ell = 32;
  unsigned int_bits = 5;
  unsigned frac_bits = 8;
  DreluMode mode = DreluMode::guard_bit;
  std::optional<KeyBits> keybits;
};
InferConfig infer_config(const InferArgs& a);
int cmd_infer(const InferArgs& a, std::ostream& csv, std::ostream& log);

struct KeybitsArgs {
  InferArgs infer;
  std::string int_keys = "2:5";
  std::string frac_keys = "0:4";
};
int cmd_keybits(const KeybitsArgs& a, std::ostream& csv, std::ostream& log);

}  // namespace trunclab
