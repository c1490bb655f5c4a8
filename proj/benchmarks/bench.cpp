#include <benchmark/benchmark.h>

#include <vector>

#include "bolasim/baseline.hpp"
#include "bolasim/bola.hpp"
#include "bolasim/media.hpp"
#include "bolasim/sim.hpp"

namespace {

using namespace bolasim;

std::vector<ChunkLadder> corpus(int chunks, int formats) {
  LadderGenConfig cfg;
  cfg.formats = formats;
  cfg.chunks = chunks;
  cfg.volatility_db = 2.0;
  cfg.seed = 7;
  return gen_ladders(cfg);
}

BolaParams params_for(const std::vector<ChunkLadder>& ladders,
                      const VersionPreset& preset) {
  CalibrationConfig cfg;
  cfg.utility_kind = preset.utility_kind;
  cfg.top_utility = preset.top_utility;
  return calibrate(average_ladder(ladders, preset.utility_kind), cfg);
}

void BM_SsimToDb(benchmark::State& state) {
  double s = 0.5;
  for (auto _ : state) {
    s = s >= 0.9995 ? 0.5 : s + 1e-4;
    benchmark::DoNotOptimize(ssim_to_db(Ssim(s)).value());
  }
}
BENCHMARK(BM_SsimToDb);

void BM_Choose(benchmark::State& state) {
  const auto ladders = corpus(1, static_cast<int>(state.range(0)));
  const auto p = params_for(corpus(100, static_cast<int>(state.range(0))),
                            VersionPreset::v2());
  double q = 0.0;
  for (auto _ : state) {
    q = q >= 15.0 ? 0.0 : q + 0.01;
    benchmark::DoNotOptimize(choose(p, ladders[0], q, DecisionMode::server,
                                    NegativePolicy::argmax_utility));
  }
}
BENCHMARK(BM_Choose)->Arg(2)->Arg(10);

void BM_ThresholdProfile(benchmark::State& state) {
  const auto ladders = corpus(64, static_cast<int>(state.range(0)));
  const auto p = params_for(ladders, VersionPreset::v2());
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(threshold_profile(p, ladders[i]));
    i = (i + 1) % ladders.size();
  }
}
BENCHMARK(BM_ThresholdProfile)->Arg(2)->Arg(10);

void BM_Calibrate(benchmark::State& state) {
  const auto ladders = corpus(200, 10);
  const auto avg = average_ladder(ladders, UtilityKind::ssim_raw);
  CalibrationConfig cfg;
  cfg.utility_kind = UtilityKind::ssim_raw;
  cfg.top_utility = TopUtility::max_possible(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate(avg, cfg));
  }
}
BENCHMARK(BM_Calibrate);

void BM_AverageLadder(benchmark::State& state) {
  const auto ladders = corpus(static_cast<int>(state.range(0)), 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(average_ladder(ladders, UtilityKind::ssim_db));
  }
}
BENCHMARK(BM_AverageLadder)->Arg(200)->Arg(2000);

void BM_Simulate(benchmark::State& state) {
  const auto ladders = corpus(static_cast<int>(state.range(0)), 10);
  const auto p = params_for(ladders, VersionPreset::v2());

  TraceGenConfig tg;
  tg.pattern = TracePattern::random_walk;
  tg.segments = 200;
  tg.period_s = 5.0;
  tg.bytes_per_sec = 8e5;
  tg.seed = 3;
  const auto trace = gen_trace(tg);

  SessionConfig cfg;
  cfg.label = "bola-v2";
  cfg.mode = DecisionMode::server;
  cfg.algorithm = BolaAlgo{p, NegativePolicy::argmax_utility};
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(cfg, ladders, trace));
  }
}
BENCHMARK(BM_Simulate)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
