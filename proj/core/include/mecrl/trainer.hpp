#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "mecrl/agents.hpp"
#include "mecrl/mec_env.hpp"
#include "mecrl/replay_buffer.hpp"

namespace mecrl::agents {

struct TrainerConfig {
  double gamma = 0.95;
  std::size_t batch_size = 128;
  std::size_t buffer_capacity = 100'000;
  std::size_t warmup_steps = 1000;
  double explore_sigma0 = 0.2;   // fraction of p_max
  double explore_decay = 0.995;  // per episode
  double explore_sigma_floor = 0.02;
  double tau_soft = 0.01;
  std::size_t updates_per_step = 1;
  LearningRates lr;
  // Learners see perturbed rewards when true; otherwise the clean ones.
  bool train_on_perceived = true;

  void validate() const;
};

struct TrainerStreams {
  Rng net_init;
  Rng exploration;
  Rng buffer_sampling;

  static TrainerStreams derive(std::uint64_t master);
};

class Trainer {
 public:
  Trainer(Algo algo, const env::EnvConfig& env_cfg, TrainerConfig cfg, TrainerStreams streams);

  // Per-user actions from normalized observations at exploration level sigma.
  std::vector<env::Action> act(const std::vector<std::vector<double>>& obs, double sigma);
  // Uniform over each user's power box; used during warmup.
  std::vector<env::Action> random_actions();

  // Samples one minibatch and applies the algorithm's update.
  std::vector<UpdateStats> update();
  std::vector<UpdateStats> update_on(const Batch& batch);

  void observe_transition(Transition t) { buffer_.push(std::move(t)); }

  double sigma() const { return sigma_; }
  void end_episode();

  Algo algo() const { return algo_; }
  const TrainerConfig& config() const { return cfg_; }
  double noise_level() const { return noise_level_; }
  std::size_t total_steps() const { return total_steps_; }
  void count_step() { ++total_steps_; }
  std::size_t updates_done() const { return updates_; }

  std::vector<DdpgAgent>& agents() { return agents_; }
  const std::vector<DdpgAgent>& agents() const { return agents_; }
  std::vector<NatureNet>& natures() { return natures_; }
  const std::vector<NatureNet>& natures() const { return natures_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::span<const std::array<double, kActDim>> p_max() const { return p_max_; }

  // Writes {algo}_{agent}_{role}.json for every network.
  void save_checkpoints(const std::filesystem::path& dir) const;

 private:
  Algo algo_;
  TrainerConfig cfg_;
  TrainerStreams streams_;
  double noise_level_;
  std::vector<std::array<double, kActDim>> p_max_;
  std::vector<DdpgAgent> agents_;
  std::vector<NatureNet> natures_;
  ReplayBuffer buffer_;
  double sigma_;
  std::size_t total_steps_ = 0;
  std::size_t updates_ = 0;
};

// Names a checkpoint document, e.g. "rmaddpg_0_actor.json".
std::string checkpoint_name(Algo algo, std::size_t agent, std::string_view role);

// Loads every agent's online actor from `dir`.
std::vector<nn::MlpParams> load_actors(const std::filesystem::path& dir, Algo algo, std::size_t n_agents);

struct EpisodeStats {
  std::vector<double> true_return;       // per user, sum over the episode
  std::vector<double> perceived_return;  // per user
  double sigma = 0.0;                    // exploration level used
  std::size_t updates = 0;

  double mean_true_return() const;
};

using StepObserver = std::function<void(const env::StepResult&)>;

// Runs one episode from reset: act, step, store, learn after warmup.
EpisodeStats train_episode(env::MecEnv& env, Trainer& trainer, const StepObserver& observer = {});

}  // namespace mecrl::agents
