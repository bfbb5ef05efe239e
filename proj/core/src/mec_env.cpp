#include "mecrl/mec_env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mecrl/error.hpp"

namespace mecrl::env {

namespace {

void check_per_user(const std::vector<double>& v, std::size_t n, const char* name) {
  if (v.size() != n)
    throw ValidationError(std::string(name) + " must have one entry per user (" + std::to_string(n) +
                          "), got " + std::to_string(v.size()));
}

void check_nonneg(const std::vector<double>& v, const char* name) {
  for (double x : v)
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(std::string(name) + " entries must be finite and >= 0");
}

}  // namespace

EnvConfig EnvConfig::with_defaults(std::size_t n_users) {
  EnvConfig c;
  c.n_users = n_users;
  c.distances.assign(n_users, 100.0);
  c.rho.assign(n_users, 0.95);
  c.arrival_rate.assign(n_users, 2.0);
  c.p_max_offload.assign(n_users, 2.0);
  c.p_max_local.assign(n_users, 2.0);
  c.w_energy.assign(n_users, 1.0);
  c.w_queue.assign(n_users, 1.0 / 5000.0);
  return c;
}

void EnvConfig::validate() const {
  constants.validate();
  path_loss.validate();
  if (n_users == 0) throw ValidationError("n_users must be >= 1");
  if (constants.n_antennas < n_users)
    throw ValidationError("zero-forcing needs n_antennas >= n_users (" + std::to_string(constants.n_antennas) +
                          " < " + std::to_string(n_users) + ")");
  check_per_user(distances, n_users, "distances");
  check_per_user(rho, n_users, "rho");
  check_per_user(arrival_rate, n_users, "arrival_rate");
  check_per_user(p_max_offload, n_users, "p_max_offload");
  check_per_user(p_max_local, n_users, "p_max_local");
  check_per_user(w_energy, n_users, "w_energy");
  check_per_user(w_queue, n_users, "w_queue");
  for (double d : distances)
    if (!(d > 0.0)) throw ValidationError("distances must be > 0");
  for (double r : rho)
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("rho entries must lie in [0, 1]");
  check_nonneg(arrival_rate, "arrival_rate");
  check_nonneg(p_max_offload, "p_max_offload");
  check_nonneg(p_max_local, "p_max_local");
  check_nonneg(w_energy, "w_energy");
  check_nonneg(w_queue, "w_queue");
  if (task_size_min_bits < 0 || task_size_max_bits < task_size_min_bits)
    throw ValidationError("task sizes need 0 <= task_size_min_bits <= task_size_max_bits");
  if (buffer_cap_bits <= 0) throw ValidationError("buffer_cap_bits must be > 0");
  if (!(noise_level >= 0.0) || !std::isfinite(noise_level)) throw ValidationError("noise_level must be >= 0");
  if (episode_len == 0) throw ValidationError("episode_len must be >= 1");
  if (!(obs_sinr_max > 0.0) || !(obs_chan_power_max > 0.0))
    throw ValidationError("observation normalization bounds must be > 0");
}

std::vector<double> EnvConfig::gains() const {
  std::vector<double> g(n_users);
  for (std::size_t m = 0; m < n_users; ++m) g[m] = phy::path_loss_gain(path_loss, distances[m]);
  return g;
}

std::vector<double> Observation::flatten() const {
  std::vector<double> v;
  v.reserve(chan_power.size() + 2);
  v.push_back(backlog_bits);
  v.push_back(prev_sinr);
  v.insert(v.end(), chan_power.begin(), chan_power.end());
  return v;
}

Bits spawn_arrivals(const EnvConfig& cfg, std::size_t user, Rng& rng) {
  if (user >= cfg.n_users) throw IndexError("spawn_arrivals: user index out of range");
  const std::int64_t tasks = rng.poisson(cfg.arrival_rate[user]);
  Bits total = 0;
  for (std::int64_t k = 0; k < tasks; ++k) total += rng.uniform_int(cfg.task_size_min_bits, cfg.task_size_max_bits);
  return total;
}

ServeResult serve_queue(const TaskQueue& queue, Bits cap_local, Bits cap_offload) {
  if (cap_local < 0 || cap_offload < 0) throw DomainError("serve_queue: capacities must be >= 0");
  ServeResult r;
  r.bits_local = std::min(cap_local, queue.backlog_bits);
  r.bits_offloaded = std::min(cap_offload, queue.backlog_bits - r.bits_local);
  r.queue = queue;
  r.queue.backlog_bits -= r.bits_local + r.bits_offloaded;
  return r;
}

TaskQueue enqueue_arrivals(const TaskQueue& queue, Bits arrived, Bits cap) {
  if (arrived < 0) throw DomainError("enqueue_arrivals: arrivals must be >= 0");
  TaskQueue q = queue;
  const Bits room = std::max<Bits>(0, cap - q.backlog_bits);
  const Bits admitted = std::min(room, arrived);
  q.backlog_bits += admitted;
  q.dropped_bits += arrived - admitted;
  return q;
}

double reward(const EnvConfig& cfg, std::size_t user, const Action& action, Bits backlog_after) {
  return -cfg.w_energy[user] * (action.p_offload + action.p_local) -
         cfg.w_queue[user] * static_cast<double>(backlog_after);
}

double perturb_reward(double true_reward, double noise_level, Rng& rng) {
  if (noise_level < 0.0) throw DomainError("perturb_reward: noise_level must be >= 0");
  if (noise_level == 0.0) return true_reward;
  const double bound = 2.0 * noise_level;
  for (;;) {
    const double eps = rng.normal(0.0, noise_level);
    if (std::abs(eps) <= bound) return true_reward + eps;
  }
}

Bits floor_bits(double bits) {
  if (!(bits >= 0.0)) return 0;
  return static_cast<Bits>(std::floor(bits + 1e-9 * std::max(1.0, bits)));
}

std::vector<double> normalize_observation(const EnvConfig& cfg, std::size_t user, const Observation& obs) {
  const double gain = phy::path_loss_gain(cfg.path_loss, cfg.distances[user]);
  auto unit = [](double x) { return std::clamp(x, 0.0, 1.0); };
  std::vector<double> v;
  v.reserve(obs.chan_power.size() + 2);
  v.push_back(unit(obs.backlog_bits / static_cast<double>(cfg.buffer_cap_bits)));
  v.push_back(unit(obs.prev_sinr / cfg.obs_sinr_max));
  for (double p : obs.chan_power) v.push_back(unit(p / (gain * cfg.obs_chan_power_max)));
  return v;
}

EnvStreams EnvStreams::derive(std::uint64_t master) {
  return EnvStreams{Rng::derive(master, "channel-init"), Rng::derive(master, "channel-evolve"),
                    Rng::derive(master, "arrivals"), Rng::derive(master, "reward-noise")};
}

MecEnv::MecEnv(EnvConfig cfg, EnvStreams streams) : cfg_(std::move(cfg)), streams_(std::move(streams)) {
  cfg_.validate();
  gains_ = cfg_.gains();
}

void MecEnv::set_channel(phy::ChannelState next) {
  zf_ = phy::zf_norms(next.h);
  channel_ = std::move(next);
}

std::vector<Observation> MecEnv::reset() {
  queues_.assign(cfg_.n_users, TaskQueue{});
  prev_sinr_.assign(cfg_.n_users, 0.0);
  slot_ = 0;
  try {
    set_channel(phy::init_channel(cfg_.constants, gains_, cfg_.rho, streams_.channel_init));
  } catch (const SingularMatrixError&) {
    set_channel(phy::init_channel(cfg_.constants, gains_, cfg_.rho, streams_.channel_init));
  }
  return observe();
}

std::vector<Observation> MecEnv::observe() const {
  std::vector<Observation> obs(cfg_.n_users);
  const auto& h = channel_->h;
  for (std::size_t m = 0; m < cfg_.n_users; ++m) {
    obs[m].backlog_bits = static_cast<double>(queues_[m].backlog_bits);
    obs[m].prev_sinr = prev_sinr_[m];
    obs[m].chan_power.resize(h.rows());
    for (std::size_t n = 0; n < h.rows(); ++n) obs[m].chan_power[n] = std::norm(h(n, m));
  }
  return obs;
}

StepResult MecEnv::step(std::span<const Action> actions) {
  if (!channel_) throw Error("step called before reset");
  if (slot_ >= cfg_.episode_len) throw Error("step called past the end of the episode");
  if (actions.size() != cfg_.n_users) throw_dimension("step actions", cfg_.n_users, actions.size());
  for (std::size_t m = 0; m < cfg_.n_users; ++m) {
    const Action& a = actions[m];
    if (!(a.p_offload >= 0.0 && a.p_offload <= cfg_.p_max_offload[m]) ||
        !(a.p_local >= 0.0 && a.p_local <= cfg_.p_max_local[m]))
      throw DomainError("step: action of user " + std::to_string(m) + " outside its power limits");
  }

  StepResult out;
  out.true_rewards.resize(cfg_.n_users);
  out.perceived_rewards.resize(cfg_.n_users);
  out.info.resize(cfg_.n_users);

  for (std::size_t m = 0; m < cfg_.n_users; ++m) {
    StepInfo& info = out.info[m];
    info.sinr = phy::sinr(actions[m].p_offload, zf_[m], cfg_.constants.noise_power);
    const Bits cap_local = floor_bits(phy::local_capacity(cfg_.constants, actions[m].p_local));
    const Bits cap_offload = floor_bits(phy::offload_capacity(cfg_.constants, info.sinr));
    const ServeResult served = serve_queue(queues_[m], cap_local, cap_offload);
    info.bits_local = served.bits_local;
    info.bits_offloaded = served.bits_offloaded;

    info.bits_arrived = spawn_arrivals(cfg_, m, streams_.arrivals);
    const TaskQueue after = enqueue_arrivals(served.queue, info.bits_arrived, cfg_.buffer_cap_bits);
    info.bits_dropped = after.dropped_bits - served.queue.dropped_bits;
    queues_[m] = after;

    out.true_rewards[m] = reward(cfg_, m, actions[m], after.backlog_bits);
  }
  for (std::size_t m = 0; m < cfg_.n_users; ++m)
    out.perceived_rewards[m] = perturb_reward(out.true_rewards[m], cfg_.noise_level, streams_.reward_noise);

  try {
    set_channel(phy::evolve_channel(*channel_, streams_.channel_evolve));
  } catch (const SingularMatrixError&) {
    set_channel(phy::evolve_channel(*channel_, streams_.channel_evolve));
  }
  for (std::size_t m = 0; m < cfg_.n_users; ++m) prev_sinr_[m] = out.info[m].sinr;
  ++slot_;
  out.observations = observe();
  return out;
}

}  // namespace mecrl::env
