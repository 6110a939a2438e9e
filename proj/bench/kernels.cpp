#include <benchmark/benchmark.h>

#include <sstream>

#include "trunclab/commands.hpp"

using namespace trunclab;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

std::vector<u64> shares(std::size_t n, RingSpec r) {
  RandomStream rng(Seed{}, "bench");
  std::vector<u64> v(n);
  for (auto& x : v) x = rng.next_ring(r);
  return v;
}

void BM_TrcSecuremlBatch(benchmark::State& s) {
  const RingSpec r(64);
  const auto in = shares(static_cast<std::size_t>(s.range(0)), r);
  std::vector<u64> out(in.size());
  for (auto _ : s) {
    trc_secureml_batch(PartyId::P1, in, out, 13, r, exec_of(s));
    benchmark::DoNotOptimize(out.data());
  }
  s.SetItemsProcessed(s.iterations() * s.range(0));
}

void BM_DreluLocalKernel(benchmark::State& s) {
  const DreluConfig cfg(FixedPointSpec(RingSpec(64), 5, 13), DreluMode::guard_bit);
  const auto in = shares(static_cast<std::size_t>(s.range(0)), cfg.precision.ring);
  const SeedSet seeds = SeedSet::derive(1);
  for (auto _ : s) {
    auto w = drelu_local_kernel(PartyId::P0, in, cfg, seeds.seed01, 0, exec_of(s));
    benchmark::DoNotOptimize(w.w.data());
  }
  s.SetItemsProcessed(s.iterations() * s.range(0));
}

void BM_EnumerateE1(benchmark::State& s) {
  const FixedPointSpec fp(RingSpec(static_cast<unsigned>(s.range(0))), 0,
                          static_cast<unsigned>(s.range(0)) - 3);
  for (auto _ : s) {
    auto t = enumerate_e1(fp, 2, TrcProtocol::secureml, MaskMode::random, exec_of(s));
    benchmark::DoNotOptimize(t.rows.data());
  }
}

void BM_CheckTheorems(benchmark::State& s) {
  for (auto _ : s) {
    auto t = check_theorems(static_cast<unsigned>(s.range(0)), exec_of(s));
    benchmark::DoNotOptimize(t.data());
  }
}

// end to end over the in-process transport
void BM_DreluUbl(benchmark::State& s) {
  BenchArgs a;
  a.batch = static_cast<std::size_t>(s.range(0));
  a.reps = 1;
  a.link = "lan1";
  for (auto _ : s) {
    std::ostringstream csv, log;
    cmd_bench(a, csv, log);
  }
  s.SetItemsProcessed(s.iterations() * s.range(0));
}

}  // namespace

BENCHMARK(BM_TrcSecuremlBatch)->ArgsProduct({{1 << 12, 1 << 18}, {0, 1}});
BENCHMARK(BM_DreluLocalKernel)->ArgsProduct({{1 << 8, 1 << 12}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateE1)->ArgsProduct({{10, 12}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckTheorems)->ArgsProduct({{8}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DreluUbl)->Arg(1 << 10)->Arg(1 << 14)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
