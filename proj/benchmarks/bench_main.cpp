#include <benchmark/benchmark.h>

#include <vector>

#include "mecrl/agents.hpp"
#include "mecrl/cmatrix.hpp"
#include "mecrl/mec_env.hpp"
#include "mecrl/neural.hpp"
#include "mecrl/phy.hpp"
#include "mecrl/trainer.hpp"

using namespace mecrl;

static void BM_PseudoInverse(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  phy::PhyConstants k;
  const std::vector<double> gains(m, 1.0), rho(m, 0.95);
  const auto ch = phy::init_channel(k, gains, rho, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pseudo_inverse(ch.h));
}
BENCHMARK(BM_PseudoInverse)->Arg(2)->Arg(4);

static void BM_MlpForwardBackward(benchmark::State& state) {
  const auto batch = state.range(0);
  Rng rng(3);
  const auto p = nn::init_mlp(16, 1, rng);
  const nn::Matrix x = nn::Matrix::Random(16, batch);
  const nn::Matrix dy = nn::Matrix::Ones(1, batch);
  for (auto _ : state) {
    auto f = nn::forward(p, x);
    benchmark::DoNotOptimize(nn::backward(p, f.cache, dy));
  }
}
BENCHMARK(BM_MlpForwardBackward)->Arg(1)->Arg(128);

static void BM_EnvStep(benchmark::State& state) {
  auto cfg = env::EnvConfig::with_defaults(static_cast<std::size_t>(state.range(0)));
  cfg.episode_len = 1'000'000'000;
  env::MecEnv e(cfg, env::EnvStreams::derive(11));
  e.reset();
  const std::vector<env::Action> acts(cfg.n_users, env::Action{1.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(e.step(acts));
}
BENCHMARK(BM_EnvStep)->Arg(2)->Arg(4);

static void BM_TrainerUpdate(benchmark::State& state) {
  const auto algo = static_cast<agents::Algo>(state.range(0));
  auto cfg = env::EnvConfig::with_defaults(2);
  cfg.noise_level = 1.0;
  agents::TrainerConfig tc;
  agents::Trainer trainer(algo, cfg, tc, agents::TrainerStreams::derive(5));
  env::MecEnv e(cfg, env::EnvStreams::derive(5));
  agents::train_episode(e, trainer);
  agents::train_episode(e, trainer);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.update());
  state.SetLabel(std::string(agents::algo_name(algo)));
}
BENCHMARK(BM_TrainerUpdate)->Arg(0)->Arg(1)->Arg(2);
BENCHMARK_MAIN();
