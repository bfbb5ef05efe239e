#include "mecrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <tuple>

#include "mecrl/error.hpp"

namespace mecrl::harness {

namespace {

[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const IoError& e) {
    throw IoError(context + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(context + ": " + e.what());
  } catch (const Error& e) {
    throw Error(context + ": " + e.what());
  }
}

EpisodeRecord to_record(std::size_t episode, const agents::EpisodeStats& s) {
  return EpisodeRecord{episode, s.true_return, s.perceived_return, s.mean_true_return(), s.sigma};
}

}  // namespace

std::uint64_t run_master_seed(std::uint64_t base_seed, std::size_t run_index) {
  return mix_seed(base_seed, static_cast<std::uint64_t>(run_index));
}

std::uint64_t eval_master_seed(std::uint64_t base_seed) { return mix_seed(base_seed, tag_hash("evaluation")); }

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

RunSeries run_training(const ExperimentConfig& cfg, std::size_t run_index, const RunOptions& opts) {
  const std::string context = "run " + std::to_string(run_index);
  try {
    cfg.validate();
    const std::uint64_t master = run_master_seed(cfg.base_seed, run_index);
    env::MecEnv env(cfg.env, env::EnvStreams::derive(master));
    agents::Trainer trainer(cfg.algo, cfg.env, cfg.trainer, agents::TrainerStreams::derive(master));
    RunSeries series;
    series.records.reserve(cfg.episodes);
    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
      series.records.push_back(to_record(ep, agents::train_episode(env, trainer, opts.step_observer)));
      if (opts.on_episode) opts.on_episode(series.records.back());
    }
    if (opts.checkpoint_dir) trainer.save_checkpoints(*opts.checkpoint_dir);
    return series;
  } catch (const Error&) {
    rethrow_with_context(context);
  }
}

std::vector<RunSeries> run_all(const ExperimentConfig& cfg, std::size_t jobs,
                               const std::optional<std::filesystem::path>& checkpoint_dir) {
  std::vector<RunSeries> out(cfg.n_runs);
  std::vector<std::exception_ptr> errors(cfg.n_runs);
  auto run_one = [&](std::size_t k) {
    try {
      RunOptions opts;
      if (k == 0) opts.checkpoint_dir = checkpoint_dir;
      out[k] = run_training(cfg, k, opts);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, cfg.n_runs));
  if (jobs == 1) {
    for (std::size_t k = 0; k < cfg.n_runs; ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < cfg.n_runs; k = next++) run_one(k);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

AggregateSeries aggregate_runs(const std::vector<RunSeries>& runs) {
  if (runs.empty()) throw InsufficientDataError("aggregate_runs: no runs");
  const std::size_t len = runs[0].size();
  for (const auto& r : runs)
    if (r.size() != len) throw_dimension("aggregate_runs series length", len, r.size());
  AggregateSeries agg;
  agg.mean.resize(len);
  agg.std.resize(len);
  std::vector<double> column(runs.size());
  for (std::size_t e = 0; e < len; ++e) {
    for (std::size_t k = 0; k < runs.size(); ++k) column[k] = runs[k].records[e].mean_true_return;
    // Sorting first makes the sums independent of run order.
    std::sort(column.begin(), column.end());
    std::tie(agg.mean[e], agg.std[e]) = mean_std(column);
  }
  return agg;
}

EvalSummary evaluate(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint_dir,
                     std::size_t n_episodes) {
  cfg.validate();
  if (n_episodes == 0) throw ValidationError("evaluate: need at least one episode");
  const auto actors = agents::load_actors(checkpoint_dir, cfg.algo, cfg.env.n_users);
  const std::size_t obs_dim = cfg.env.obs_dim();
  std::vector<agents::DdpgAgent> policies(cfg.env.n_users);
  for (std::size_t m = 0; m < cfg.env.n_users; ++m) {
    if (actors[m].in_dim() != obs_dim || actors[m].out_dim() != agents::kActDim)
      throw ValidationError("checkpoint actor " + std::to_string(m) + " does not match the configured dimensions");
    policies[m].actor = actors[m];
    policies[m].obs_dim = obs_dim;
    policies[m].p_max = {cfg.env.p_max_offload[m], cfg.env.p_max_local[m]};
  }

  env::MecEnv env(cfg.env, env::EnvStreams::derive(eval_master_seed(cfg.base_seed)));
  Rng unused(0);
  EvalSummary summary;
  summary.episodes = n_episodes;
  for (std::size_t ep = 0; ep < n_episodes; ++ep) {
    auto obs = env.reset();
    std::vector<double> ret(cfg.env.n_users, 0.0);
    for (std::size_t t = 0; t < cfg.env.episode_len; ++t) {
      std::vector<env::Action> actions;
      for (std::size_t m = 0; m < cfg.env.n_users; ++m)
        actions.push_back(agents::act(policies[m], env::normalize_observation(cfg.env, m, obs[m]), 0.0, unused));
      const env::StepResult res = env.step(actions);
      for (std::size_t m = 0; m < cfg.env.n_users; ++m) ret[m] += res.true_rewards[m];
      obs = res.observations;
    }
    summary.returns.push_back(std::accumulate(ret.begin(), ret.end(), 0.0) / static_cast<double>(ret.size()));
  }
  std::tie(summary.mean_return, summary.std_return) = mean_std(summary.returns);
  return summary;
}

}  // namespace mecrl::harness
