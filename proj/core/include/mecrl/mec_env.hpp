#pragma once

// Multi-user task-offloading environment. Each slot every user splits its
// power between local CPU execution and uplink offloading; its queue drains
// by the resulting bit budgets and refills with Poisson task arrivals.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mecrl/phy.hpp"
#include "mecrl/rng.hpp"

namespace mecrl::env {

using Bits = std::int64_t;

struct EnvConfig {
  std::size_t n_users = 2;
  phy::PhyConstants constants;
  phy::PathLossModel path_loss;

  // Per-user lists, each of length n_users.
  std::vector<double> distances;      // meters
  std::vector<double> rho;            // channel correlation
  std::vector<double> arrival_rate;   // mean tasks per slot
  std::vector<double> p_max_offload;  // watts
  std::vector<double> p_max_local;    // watts
  std::vector<double> w_energy;       // reward weight per watt
  std::vector<double> w_queue;        // reward weight per bit

  Bits task_size_min_bits = 250;
  Bits task_size_max_bits = 750;
  Bits buffer_cap_bits = 50'000;
  double noise_level = 0.0;  // reward-noise standard deviation
  std::size_t episode_len = 100;

  // Upper ends of the observation normalization ranges. Channel power is
  // measured relative to the user's mean path-loss gain.
  double obs_sinr_max = 20.0;
  double obs_chan_power_max = 4.0;

  // Defaults with every per-user list filled for `n_users` users.
  static EnvConfig with_defaults(std::size_t n_users);

  void validate() const;
  std::vector<double> gains() const;
  std::size_t obs_dim() const { return constants.n_antennas + 2; }
};

struct TaskQueue {
  Bits backlog_bits = 0;
  Bits dropped_bits = 0;
};

struct Observation {
  double backlog_bits = 0.0;
  double prev_sinr = 0.0;
  std::vector<double> chan_power;  // |h_{m,n}|^2 per antenna

  std::vector<double> flatten() const;
};

struct Action {
  double p_offload = 0.0;
  double p_local = 0.0;
};

struct StepInfo {
  double sinr = 0.0;
  Bits bits_local = 0;
  Bits bits_offloaded = 0;
  Bits bits_arrived = 0;
  Bits bits_dropped = 0;
};

struct StepResult {
  std::vector<Observation> observations;
  std::vector<double> true_rewards;
  std::vector<double> perceived_rewards;
  std::vector<StepInfo> info;
};

struct ServeResult {
  Bits bits_local = 0;
  Bits bits_offloaded = 0;
  TaskQueue queue;
};

// Sum of Poisson(lambda_m) task sizes, each Uniform{min..max} bits.
Bits spawn_arrivals(const EnvConfig& cfg, std::size_t user, Rng& rng);

// Local execution drains first, offloading takes what remains.
ServeResult serve_queue(const TaskQueue& queue, Bits cap_local, Bits cap_offload);

// Adds arrivals, dropping whatever exceeds `cap`.
TaskQueue enqueue_arrivals(const TaskQueue& queue, Bits arrived, Bits cap);

// -w_energy (p_o + p_l) - w_queue * backlog.
double reward(const EnvConfig& cfg, std::size_t user, const Action& action, Bits backlog_after);

// Gaussian around `true_reward`, rejection-truncated to +-2 noise_level.
double perturb_reward(double true_reward, double noise_level, Rng& rng);

// Floors a bit budget to whole bits, ignoring sub-ulp shortfalls.
Bits floor_bits(double bits);

// Observation mapped into [0, 1]^{N+2} for network inputs.
std::vector<double> normalize_observation(const EnvConfig& cfg, std::size_t user, const Observation& obs);

struct EnvStreams {
  Rng channel_init;
  Rng channel_evolve;
  Rng arrivals;
  Rng reward_noise;

  static EnvStreams derive(std::uint64_t master);
};

class MecEnv {
 public:
  MecEnv(EnvConfig cfg, EnvStreams streams);

  // Empties queues, redraws the channel and zeroes prev_sinr.
  std::vector<Observation> reset();

  StepResult step(std::span<const Action> actions);

  const EnvConfig& config() const { return cfg_; }
  const std::vector<TaskQueue>& queues() const { return queues_; }
  const phy::ChannelState& channel() const { return *channel_; }
  std::size_t slot() const { return slot_; }

 private:
  void set_channel(phy::ChannelState next);
  std::vector<Observation> observe() const;

  EnvConfig cfg_;
  EnvStreams streams_;
  std::vector<double> gains_;
  std::optional<phy::ChannelState> channel_;
  std::vector<double> zf_;
  std::vector<TaskQueue> queues_;
  std::vector<double> prev_sinr_;
  std::size_t slot_ = 0;
};

}  // namespace mecrl::env
