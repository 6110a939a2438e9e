// trunclab: experiment driver. Data CSV goes to --out (or stdout), the human
// summary to stdout (or stderr when the CSV takes stdout).

#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "trunclab/commands.hpp"

using namespace trunclab;

namespace {

void add_common(CLI::App* c, CommonArgs& a, std::string& out) {
  c->add_option("--seed", a.seed, "master seed")->capture_default_str();
  c->add_option("--transport", a.transport, "inproc | tcp")
      ->check(CLI::IsMember({"inproc", "tcp"}))
      ->capture_default_str();
  c->add_option("--out", out, "CSV path (default stdout)");
}

void add_infer(CLI::App* c, InferArgs& a, std::string& mode, std::string& trc, std::string& key) {
  c->add_option("--model", a.model, "model fixture")->required();
  c->add_option("--data", a.data, "dataset CSV")->required();
  c->add_option("--strategy", a.strategy,
                "mult_then_trc_fixed | mult_then_trc_random | trc_then_mult_random | det_trc")
      ->capture_default_str();
  c->add_option("--trc", trc, "aby3 | secureml (mult_then_trc_random only)")->capture_default_str();
  c->add_flag("!--no-accumulate", a.accumulate, "truncate each product before summing");
  c->add_option("--ell", a.ell, "ring bits")->capture_default_str();
  c->add_option("--int", a.int_bits, "integer bits")->capture_default_str();
  c->add_option("--frac", a.frac_bits, "fraction bits")->capture_default_str();
  c->add_option("--mode", mode, "guard_bit | literal")->capture_default_str();
  c->add_option("--keybits", key, "DReLU key bits as int,frac");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truncation and DReLU experiments over simulated three-party sharing"};
  app.require_subcommand(1);

  std::string out, mode = "guard_bit", trc = "aby3", mask = "random", key;

  TrcSweepArgs sw;
  std::string sw_proto = "secureml";
  auto* c_sw = app.add_subcommand("trc-sweep", "e1 failure rates of one truncation");
  add_common(c_sw, sw.common, out);
  c_sw->add_option("--ell", sw.ell, "ring range a:b")->capture_default_str();
  c_sw->add_option("--ellx", sw.ellx, "band range a:b (overrides --slack)");
  c_sw->add_option("--slack", sw.slack, "ell - ellx range a:b")->capture_default_str();
  c_sw->add_option("--k", sw.k, "bits truncated")->capture_default_str();
  c_sw->add_option("--protocol", sw_proto, "secureml | aby3 | det")->capture_default_str();
  c_sw->add_option("--mask", mask, "random | fixed")->capture_default_str();
  c_sw->add_option("--trials", sw.trials, "samples per configuration")->capture_default_str();
  c_sw->add_flag("--per-x", sw.per_x, "one row per input (ell <= 16)");

  DreluVerifyArgs dv;
  std::string dv_proto = "both";
  auto* c_dv = app.add_subcommand("drelu-verify", "DReLU against the plaintext sign");
  add_common(c_dv, dv.common, out);
  c_dv->add_option("--ell", dv.ell)->capture_default_str();
  c_dv->add_option("--ellx", dv.ellx)->capture_default_str();
  c_dv->add_option("--mode", mode, "guard_bit | literal")->capture_default_str();
  c_dv->add_option("--seeds", dv.seeds, "seed sets")->capture_default_str();
  c_dv->add_option("--sample", dv.sample, "random inputs instead of the whole band");
  c_dv->add_option("--protocol", dv_proto, "ubl | rss | both")
      ->check(CLI::IsMember({"ubl", "rss", "both"}))
      ->capture_default_str();

  BenchArgs bn;
  auto* c_bn = app.add_subcommand("bench", "batched DReLU/ReLU throughput and cost");
  add_common(c_bn, bn.common, out);
  c_bn->add_option("--op", bn.op, "drelu | relu")->capture_default_str();
  c_bn->add_option("--batch", bn.batch)->capture_default_str();
  c_bn->add_option("--ell", bn.ell)->capture_default_str();
  c_bn->add_option("--ellx", bn.ellx)->capture_default_str();
  c_bn->add_option("--mode", mode, "guard_bit | literal")->capture_default_str();
  c_bn->add_option("--link", bn.link, "lan1 | lan2 | wan | all")->capture_default_str();
  c_bn->add_option("--reps", bn.reps)->capture_default_str();
  c_bn->add_option("--meter-out", bn.meter_out, "write the meter table here");

  InferArgs in;
  auto* c_in = app.add_subcommand("infer", "secret-shared inference on the toy model");
  add_common(c_in, in.common, out);
  add_infer(c_in, in, mode, trc, key);

  KeybitsArgs kb;
  auto* c_kb = app.add_subcommand("keybits", "accuracy against DReLU key bits");
  add_common(c_kb, kb.infer.common, out);
  add_infer(c_kb, kb.infer, mode, trc, key);
  c_kb->add_option("--int-keys", kb.int_keys, "range a:b")->capture_default_str();
  c_kb->add_option("--frac-keys", kb.frac_keys, "range a:b")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) {
      std::cerr << "cannot write " << out << "\n";
      return kExitUsage;
    }
  }
  std::ostream& csv = out.empty() ? std::cout : file;
  std::ostream& log = out.empty() ? std::cerr : std::cout;

  try {
    if (*c_sw) {
      sw.protocol = parse_trc_protocol(sw_proto);
      sw.mask = parse_mask_mode(mask);
      return cmd_trc_sweep(sw, csv, log);
    }
    if (*c_dv) {
      dv.mode = parse_drelu_mode(mode);
      dv.ubl = dv_proto != "rss";
      dv.rss = dv_proto != "ubl";
      return cmd_drelu_verify(dv, csv, log);
    }
    if (*c_bn) {
      bn.mode = parse_drelu_mode(mode);
      return cmd_bench(bn, csv, log);
    }
    InferArgs& ia = *c_in ? in : kb.infer;
    ia.mode = parse_drelu_mode(mode);
    ia.trc = parse_trc_protocol(trc);
    if (!key.empty()) ia.keybits = parse_keybits(key);
    if (*c_in) return cmd_infer(in, csv, log);
    return cmd_keybits(kb, csv, log);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerify;
  }
}
