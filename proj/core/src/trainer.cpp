#include "mecrl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mecrl/checkpoint.hpp"
#include "mecrl/error.hpp"

namespace mecrl::agents {

void TrainerConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("trainer.gamma must lie in [0, 1)");
  if (batch_size == 0) throw ValidationError("trainer.batch_size must be >= 1");
  if (buffer_capacity == 0) throw ValidationError("trainer.buffer_capacity must be >= 1");
  if (batch_size > buffer_capacity) throw ValidationError("trainer.batch_size must not exceed buffer_capacity");
  if (!(explore_sigma0 >= 0.0) || !(explore_sigma_floor >= 0.0))
    throw ValidationError("exploration levels must be >= 0");
  if (!(explore_decay > 0.0 && explore_decay <= 1.0)) throw ValidationError("trainer.explore_decay must lie in (0, 1]");
  if (!(tau_soft >= 0.0 && tau_soft <= 1.0)) throw ValidationError("trainer.tau_soft must lie in [0, 1]");
  if (!(lr.actor >= 0.0 && lr.critic >= 0.0 && lr.nature >= 0.0))
    throw ValidationError("learning rates must be >= 0");
}

TrainerStreams TrainerStreams::derive(std::uint64_t master) {
  return TrainerStreams{Rng::derive(master, "net-init"), Rng::derive(master, "exploration"),
                        Rng::derive(master, "buffer-sampling")};
}

Trainer::Trainer(Algo algo, const env::EnvConfig& env_cfg, TrainerConfig cfg, TrainerStreams streams)
    : algo_(algo),
      cfg_(cfg),
      streams_(std::move(streams)),
      noise_level_(env_cfg.noise_level),
      buffer_(cfg.buffer_capacity),
      sigma_(std::max(cfg.explore_sigma0, cfg.explore_sigma_floor)) {
  cfg_.validate();
  env_cfg.validate();
  const std::size_t users = env_cfg.n_users;
  const std::size_t obs_dim = env_cfg.obs_dim();
  const std::size_t critic_in = algo == Algo::ddpg ? obs_dim + kActDim : users * (obs_dim + kActDim);
  for (std::size_t m = 0; m < users; ++m) p_max_.push_back({env_cfg.p_max_offload[m], env_cfg.p_max_local[m]});
  // Draw order: all actor/critic pairs, then natures.
  for (std::size_t m = 0; m < users; ++m)
    agents_.push_back(make_agent(obs_dim, critic_in, p_max_[m], cfg_.lr, streams_.net_init));
  if (algo == Algo::rmaddpg)
    for (std::size_t m = 0; m < users; ++m) natures_.push_back(make_nature(obs_dim, cfg_.lr.nature, streams_.net_init));
}

std::vector<env::Action> Trainer::act(const std::vector<std::vector<double>>& obs, double sigma) {
  if (obs.size() != agents_.size()) throw_dimension("trainer act observations", agents_.size(), obs.size());
  std::vector<env::Action> out;
  out.reserve(obs.size());
  for (std::size_t m = 0; m < agents_.size(); ++m)
    out.push_back(agents::act(agents_[m], obs[m], sigma, streams_.exploration));
  return out;
}

std::vector<env::Action> Trainer::random_actions() {
  std::vector<env::Action> out;
  out.reserve(p_max_.size());
  for (const auto& p : p_max_) {
    const double po = streams_.exploration.uniform(0.0, p[0]);
    const double pl = streams_.exploration.uniform(0.0, p[1]);
    out.push_back({po, pl});
  }
  return out;
}

std::vector<UpdateStats> Trainer::update_on(const Batch& batch) {
  const UpdateSettings s{cfg_.gamma, cfg_.tau_soft};
  ++updates_;
  switch (algo_) {
    case Algo::ddpg: {
      std::vector<UpdateStats> out;
      out.reserve(agents_.size());
      for (std::size_t m = 0; m < agents_.size(); ++m) out.push_back(ddpg_update(agents_[m], batch, m, s));
      return out;
    }
    case Algo::maddpg:
      return maddpg_update(agents_, batch, s);
    case Algo::rmaddpg:
      return rmaddpg_update(agents_, natures_, batch, noise_level_, s);
  }
  throw Error("unreachable algo");
}

std::vector<UpdateStats> Trainer::update() {
  const auto idx = buffer_.sample_indices(cfg_.batch_size, streams_.buffer_sampling);
  std::vector<const Transition*> samples;
  samples.reserve(idx.size());
  for (std::size_t i : idx) samples.push_back(&buffer_.at(i));
  return update_on(make_batch(std::span<const Transition* const>(samples), p_max_));
}

void Trainer::end_episode() { sigma_ = std::max(cfg_.explore_sigma_floor, sigma_ * cfg_.explore_decay); }

std::string checkpoint_name(Algo algo, std::size_t agent, std::string_view role) {
  return std::string(algo_name(algo)) + "_" + std::to_string(agent) + "_" + std::string(role) + ".json";
}

void Trainer::save_checkpoints(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (std::size_t m = 0; m < agents_.size(); ++m) {
    const DdpgAgent& a = agents_[m];
    nn::save_checkpoint(dir / checkpoint_name(algo_, m, "actor"), a.actor);
    nn::save_checkpoint(dir / checkpoint_name(algo_, m, "actor_target"), a.actor_target);
    nn::save_checkpoint(dir / checkpoint_name(algo_, m, "critic"), a.critic);
    nn::save_checkpoint(dir / checkpoint_name(algo_, m, "critic_target"), a.critic_target);
  }
  for (std::size_t m = 0; m < natures_.size(); ++m)
    nn::save_checkpoint(dir / checkpoint_name(algo_, m, "nature"), natures_[m].net);
}

std::vector<nn::MlpParams> load_actors(const std::filesystem::path& dir, Algo algo, std::size_t n_agents) {
  std::vector<nn::MlpParams> actors;
  for (std::size_t m = 0; m < n_agents; ++m) {
    const auto path = dir / checkpoint_name(algo, m, "actor");
    if (!std::filesystem::exists(path)) throw IoError("missing checkpoint " + path.string());
    actors.push_back(nn::load_checkpoint(path));
  }
  return actors;
}

double EpisodeStats::mean_true_return() const {
  if (true_return.empty()) return 0.0;
  return std::accumulate(true_return.begin(), true_return.end(), 0.0) / static_cast<double>(true_return.size());
}

EpisodeStats train_episode(env::MecEnv& env, Trainer& trainer, const StepObserver& observer) {
  const env::EnvConfig& cfg = env.config();
  const std::size_t users = cfg.n_users;
  EpisodeStats stats;
  stats.true_return.assign(users, 0.0);
  stats.perceived_return.assign(users, 0.0);
  stats.sigma = trainer.sigma();

  auto normalize_all = [&](const std::vector<env::Observation>& obs) {
    std::vector<std::vector<double>> out(users);
    for (std::size_t m = 0; m < users; ++m) out[m] = env::normalize_observation(cfg, m, obs[m]);
    return out;
  };

  std::vector<std::vector<double>> obs = normalize_all(env.reset());
  const TrainerConfig& tc = trainer.config();
  const std::size_t updates_before = trainer.updates_done();
  for (std::size_t t = 0; t < cfg.episode_len; ++t) {
    const bool warming = trainer.total_steps() < tc.warmup_steps;
    std::vector<env::Action> actions = warming ? trainer.random_actions() : trainer.act(obs, trainer.sigma());
    env::StepResult res = env.step(actions);
    if (observer) observer(res);
    for (std::size_t m = 0; m < users; ++m) {
      stats.true_return[m] += res.true_rewards[m];
      stats.perceived_return[m] += res.perceived_rewards[m];
    }
    std::vector<std::vector<double>> next_obs = normalize_all(res.observations);
    trainer.observe_transition(Transition{obs, std::move(actions),
                                          tc.train_on_perceived ? res.perceived_rewards : res.true_rewards,
                                          next_obs});
    obs = std::move(next_obs);
    trainer.count_step();
    if (trainer.total_steps() >= tc.warmup_steps && trainer.buffer().size() >= tc.batch_size)
      for (std::size_t u = 0; u < tc.updates_per_step; ++u) trainer.update();
  }
  stats.updates = trainer.updates_done() - updates_before;
  trainer.end_episode();
  return stats;
}

}  // namespace mecrl::agents
