#pragma once

#include <vector>

#include "mecrl/agents.hpp"
#include "mecrl/mec_env.hpp"

namespace mecrl::testing {

// Transitions from uniform random actions on a fresh environment.
inline std::vector<agents::Transition> random_rollout(const env::EnvConfig& cfg, std::size_t n, std::uint64_t seed) {
  env::MecEnv e(cfg, env::EnvStreams::derive(seed));
  Rng pick(seed ^ 0x5a5a);
  std::vector<agents::Transition> out;
  auto normalize = [&](const std::vector<env::Observation>& o) {
    std::vector<std::vector<double>> v;
    for (std::size_t m = 0; m < o.size(); ++m) v.push_back(env::normalize_observation(cfg, m, o[m]));
    return v;
  };
  auto obs = normalize(e.reset());
  while (out.size() < n) {
    if (e.slot() == cfg.episode_len) obs = normalize(e.reset());
    std::vector<env::Action> acts;
    for (std::size_t m = 0; m < cfg.n_users; ++m)
      acts.push_back({pick.uniform(0, cfg.p_max_offload[m]), pick.uniform(0, cfg.p_max_local[m])});
    const auto r = e.step(acts);
    auto next = normalize(r.observations);
    out.push_back({obs, acts, r.perceived_rewards, next});
    obs = std::move(next);
  }
  return out;
}

inline std::vector<std::array<double, agents::kActDim>> p_max_of(const env::EnvConfig& cfg) {
  std::vector<std::array<double, agents::kActDim>> p;
  for (std::size_t m = 0; m < cfg.n_users; ++m) p.push_back({cfg.p_max_offload[m], cfg.p_max_local[m]});
  return p;
}

inline agents::Batch random_batch(const env::EnvConfig& cfg, std::size_t n, std::uint64_t seed) {
  return agents::make_batch(random_rollout(cfg, n, seed), p_max_of(cfg));
}

}  // namespace mecrl::testing
