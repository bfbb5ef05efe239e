#pragma once

// Seeded multi-run experiments, aggregation and evaluation rollouts.
//
// Seeding: run k of an experiment uses the master seed
//   mix_seed(base_seed, k)
// and every random consumer inside the run draws from its own stream derived
// as mix_seed(master, tag_hash(tag)) for the tags channel-init,
// channel-evolve, arrivals, reward-noise, net-init, exploration and
// buffer-sampling. Environment draws are therefore identical for every
// algorithm given the same (base_seed, k).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "mecrl/config.hpp"
#include "mecrl/trainer.hpp"

namespace mecrl::harness {

struct EpisodeRecord {
  std::size_t episode = 0;
  std::vector<double> true_return;       // per user
  std::vector<double> perceived_return;  // per user
  double mean_true_return = 0.0;         // averaged over users
  double sigma = 0.0;

  bool operator==(const EpisodeRecord&) const = default;
};

struct RunSeries {
  std::vector<EpisodeRecord> records;

  std::size_t size() const { return records.size(); }
  bool operator==(const RunSeries&) const = default;
};

struct AggregateSeries {
  std::vector<double> mean;  // across runs, per episode
  std::vector<double> std;   // population standard deviation

  std::size_t size() const { return mean.size(); }
  bool operator==(const AggregateSeries&) const = default;
};

std::uint64_t run_master_seed(std::uint64_t base_seed, std::size_t run_index);
std::uint64_t eval_master_seed(std::uint64_t base_seed);

struct RunOptions {
  // When set, the trained networks are written here after the last episode.
  std::optional<std::filesystem::path> checkpoint_dir;
  agents::StepObserver step_observer;
  std::function<void(const EpisodeRecord&)> on_episode;
};

// Trains cfg.algo for cfg.episodes episodes. A pure function of (cfg, run).
RunSeries run_training(const ExperimentConfig& cfg, std::size_t run_index, const RunOptions& opts = {});

// Runs cfg.n_runs runs on up to `jobs` threads; results are in run order and
// independent of `jobs`. Run 0 checkpoints to `checkpoint_dir` when given.
std::vector<RunSeries> run_all(const ExperimentConfig& cfg, std::size_t jobs,
                               const std::optional<std::filesystem::path>& checkpoint_dir = std::nullopt);

AggregateSeries aggregate_runs(const std::vector<RunSeries>& runs);

struct EvalSummary {
  std::size_t episodes = 0;
  double mean_return = 0.0;  // mean over episodes of the user-averaged true return
  double std_return = 0.0;   // population std over episodes
  std::vector<double> returns;
};

// Greedy (sigma = 0) rollouts of the checkpointed actors on fresh episodes.
EvalSummary evaluate(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint_dir,
                     std::size_t n_episodes);

// Mean and population standard deviation of `xs`.
std::pair<double, double> mean_std(const std::vector<double>& xs);

}  // namespace mecrl::harness
