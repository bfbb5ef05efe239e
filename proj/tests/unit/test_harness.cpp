#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "mecrl/checkpoint.hpp"
#include "mecrl/error.hpp"
#include "mecrl/harness.hpp"

using namespace mecrl;
using namespace mecrl::harness;

namespace {

ExperimentConfig tiny(agents::Algo algo = agents::Algo::rmaddpg) {
  ExperimentConfig c;
  c.algo = algo;
  c.episodes = 4;
  c.n_runs = 3;
  c.env.episode_len = 30;
  c.env.noise_level = 0.5;
  c.trainer.batch_size = 16;
  c.trainer.warmup_steps = 40;
  return c;
}

RunSeries series_of(std::initializer_list<double> values) {
  RunSeries s;
  std::size_t e = 0;
  for (double v : values) s.records.push_back(EpisodeRecord{e++, {v}, {v}, v, 0.1});
  return s;
}

std::filesystem::path temp_dir(const char* name) {
  const auto d = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST(MeanStd, Population) {
  const auto [m, s] = mean_std({1.0, 3.0});
  EXPECT_EQ(m, 2.0);
  EXPECT_EQ(s, 1.0);
}

TEST(AggregateRuns, Example) {
  const auto agg = aggregate_runs({series_of({1, 2}), series_of({3, 4})});
  EXPECT_EQ(agg.mean, (std::vector<double>{2, 3}));
  EXPECT_EQ(agg.std, (std::vector<double>{1, 1}));
}

TEST(AggregateRuns, SingleRunHasZeroStd) {
  const auto agg = aggregate_runs({series_of({1.5, -2.25, 7})});
  EXPECT_EQ(agg.mean, (std::vector<double>{1.5, -2.25, 7}));
  EXPECT_EQ(agg.std, (std::vector<double>{0, 0, 0}));
}

TEST(AggregateRuns, PermutationInvariantAndBounded) {
  Rng rng(1);
  std::vector<RunSeries> runs;
  for (int k = 0; k < 5; ++k) {
    RunSeries s;
    for (std::size_t e = 0; e < 30; ++e) {
      const double v = rng.normal(-50, 20);
      s.records.push_back(EpisodeRecord{e, {v}, {v}, v, 0.0});
    }
    runs.push_back(s);
  }
  const auto agg = aggregate_runs(runs);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(runs.begin(), runs.end(), rng.engine());
    EXPECT_EQ(aggregate_runs(runs), agg);
  }
  for (std::size_t e = 0; e < 30; ++e) {
    double lo = 1e300, hi = -1e300;
    for (const auto& r : runs) {
      lo = std::min(lo, r.records[e].mean_true_return);
      hi = std::max(hi, r.records[e].mean_true_return);
    }
    EXPECT_GE(agg.mean[e], lo);
    EXPECT_LE(agg.mean[e], hi);
    EXPECT_GE(agg.std[e], 0.0);
  }
}

TEST(AggregateRuns, Errors) {
  EXPECT_THROW(aggregate_runs({}), InsufficientDataError);
  EXPECT_THROW(aggregate_runs({series_of({1, 2}), series_of({1})}), DimensionError);
}

TEST(Seeds, RunsUseDistinctMasters) {
  EXPECT_NE(run_master_seed(1, 0), run_master_seed(1, 1));
  EXPECT_NE(run_master_seed(1, 0), run_master_seed(2, 0));
  EXPECT_NE(eval_master_seed(1), run_master_seed(1, 0));
}

TEST(RunTraining, DeterministicAndShaped) {
  const auto c = tiny();
  const auto a = run_training(c, 1), b = run_training(c, 1);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t e = 0; e < a.size(); ++e) {
    EXPECT_EQ(a.records[e].episode, e);
    EXPECT_EQ(a.records[e].true_return.size(), 2u);
  }
  EXPECT_FALSE(run_training(c, 2) == a);
}

TEST(RunTraining, SingleEpisode) {
  auto c = tiny();
  c.episodes = 1;
  EXPECT_EQ(run_training(c, 0).size(), 1u);
}

TEST(RunTraining, AttachesRunContext) {
  auto c = tiny();
  c.env.n_users = 6;  // invalid: more users than antennas
  try {
    run_training(c, 3);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("run 3"), std::string::npos);
  }
}

TEST(RunAll, IndependentOfJobs) {
  const auto c = tiny(agents::Algo::maddpg);
  const auto serial = run_all(c, 1);
  const auto parallel = run_all(c, 3);
  EXPECT_EQ(serial, parallel);
  for (std::size_t k = 0; k < serial.size(); ++k) EXPECT_EQ(serial[k], run_training(c, k));
}

TEST(Evaluate, DeterministicAndGreedy) {
  const auto c = tiny();
  const auto dir = temp_dir("mecrl_eval_test");
  RunOptions opts;
  opts.checkpoint_dir = dir;
  run_training(c, 0, opts);
  const auto a = evaluate(c, dir, 3), b = evaluate(c, dir, 3);
  EXPECT_EQ(a.returns, b.returns);
  EXPECT_EQ(a.mean_return, b.mean_return);
  ASSERT_EQ(a.returns.size(), 3u);
  std::filesystem::remove_all(dir);
}

TEST(Evaluate, ZeroActionPolicyMatchesEnvSimulation) {
  auto c = tiny();
  c.env.noise_level = 0.0;
  const auto dir = temp_dir("mecrl_eval_zero");
  std::filesystem::create_directories(dir);
  Rng rng(3);
  for (std::size_t m = 0; m < c.env.n_users; ++m) {
    auto p = nn::init_mlp(c.env.obs_dim(), agents::kActDim, rng);
    p.w2.setZero();
    p.b2.setConstant(-50.0);  // tanh saturates at -1, i.e. zero power
    nn::save_checkpoint(dir / agents::checkpoint_name(c.algo, m, "actor"), p);
  }
  const auto summary = evaluate(c, dir, 4);

  env::MecEnv e(c.env, env::EnvStreams::derive(eval_master_seed(c.base_seed)));
  const std::vector<env::Action> zero(c.env.n_users);
  for (std::size_t ep = 0; ep < 4; ++ep) {
    e.reset();
    double total = 0.0;
    for (std::size_t t = 0; t < c.env.episode_len; ++t) {
      e.step(zero);
      for (std::size_t m = 0; m < c.env.n_users; ++m)
        total += -c.env.w_queue[m] * static_cast<double>(e.queues()[m].backlog_bits);
    }
    EXPECT_NEAR(summary.returns[ep], total / static_cast<double>(c.env.n_users), 1e-9);
  }
  std::filesystem::remove_all(dir);
}

TEST(Evaluate, CheckpointErrors) {
  const auto c = tiny();
  const auto dir = temp_dir("mecrl_eval_missing");
  EXPECT_THROW(evaluate(c, dir, 1), IoError);
  std::filesystem::create_directories(dir);
  Rng rng(4);
  for (std::size_t m = 0; m < 2; ++m)
    nn::save_checkpoint(dir / agents::checkpoint_name(c.algo, m, "actor"), nn::init_mlp(5, 2, rng));
  EXPECT_THROW(evaluate(c, dir, 1), ValidationError);
  std::filesystem::remove_all(dir);
}
