#pragma once

// Deterministic-policy actor-critic learners: independent DDPG, MADDPG with
// centralized critics, and robust MADDPG whose per-agent nature network
// substitutes an adversarial reward estimate into the TD error.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mecrl/mec_env.hpp"
#include "mecrl/neural.hpp"
#include "mecrl/replay_buffer.hpp"

namespace mecrl::agents {

using nn::Matrix;
using RowVector = Eigen::RowVectorXd;

inline constexpr std::size_t kActDim = 2;

enum class Algo { ddpg, maddpg, rmaddpg };

std::string_view algo_name(Algo algo);
Algo parse_algo(std::string_view name);  // throws ValidationError

struct LearningRates {
  double actor = 1e-4;
  double critic = 1e-3;
  double nature = 1e-3;
};

// Actor maps a normalized observation to two pre-squash outputs; the critic
// scores (observations, actions) with actions scaled to [0, 1] by p_max.
struct DdpgAgent {
  nn::MlpParams actor, actor_target;
  nn::AdamState actor_opt;
  nn::MlpParams critic, critic_target;
  nn::AdamState critic_opt;
  std::size_t obs_dim = 0;
  std::array<double, kActDim> p_max{};  // {offload, local} ceilings, watts

  std::size_t critic_in_dim() const { return critic.in_dim(); }
};

// Scalar reward estimate from the agent's own (observation, action).
struct NatureNet {
  nn::MlpParams net;
  nn::AdamState opt;
};

DdpgAgent make_agent(std::size_t obs_dim, std::size_t critic_in_dim, std::array<double, kActDim> p_max,
                     const LearningRates& lr, Rng& rng);
NatureNet make_nature(std::size_t obs_dim, double lr, Rng& rng);

// tanh-squashed policy output mapped onto [0, p_max], plus Gaussian noise of
// std sigma * p_max, clipped back into range. sigma == 0 draws nothing.
env::Action act(const DdpgAgent& agent, std::span<const double> obs, double sigma, Rng& rng);

// Minibatch laid out per user, one sample per column.
struct Batch {
  std::vector<Matrix> obs;       // obs_dim x B
  std::vector<Matrix> act;       // 2 x B, scaled to [0, 1]
  std::vector<RowVector> rew;    // 1 x B
  std::vector<Matrix> next_obs;  // obs_dim x B

  std::size_t size() const { return obs.empty() ? 0 : static_cast<std::size_t>(obs[0].cols()); }
  std::size_t n_users() const { return obs.size(); }
};

Batch make_batch(std::span<const Transition* const> samples, std::span<const std::array<double, kActDim>> p_max);
Batch make_batch(const std::vector<Transition>& samples, std::span<const std::array<double, kActDim>> p_max);

struct UpdateSettings {
  double gamma = 0.95;
  double tau_soft = 0.01;
};

struct UpdateStats {
  double critic_loss = 0.0;      // mean squared TD error before the step
  double actor_objective = 0.0;  // mean Q(s, mu(s)) before the step
  double nature_output = 0.0;    // mean raw nature output before its step (robust only)
};

// Independent learner: agent `user` sees only its own slices of the batch.
UpdateStats ddpg_update(DdpgAgent& agent, const Batch& batch, std::size_t user, const UpdateSettings& s);

// Centralized critics over [all observations; all actions].
std::vector<UpdateStats> maddpg_update(std::vector<DdpgAgent>& agents, const Batch& batch, const UpdateSettings& s);

// As MADDPG, but the TD target uses clamp(nature_i(o_i, a_i), r_i - 2 noise,
// r_i + 2 noise) in place of r_i, and each nature network then descends its
// own output on the batch.
std::vector<UpdateStats> rmaddpg_update(std::vector<DdpgAgent>& agents, std::vector<NatureNet>& natures,
                                        const Batch& batch, double noise_level, const UpdateSettings& s);

// Joint critic input [o_1 .. o_M; a_1 .. a_M].
Matrix joint_critic_input(std::span<const Matrix> obs, std::span<const Matrix> act);

// Nature network output on its agent's batch slice, before clamping.
RowVector nature_output(const NatureNet& nature, const Batch& batch, std::size_t user);

}  // namespace mecrl::agents
