#include "mecrl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mecrl/error.hpp"

namespace mecrl::agents {

namespace {

using Index = Eigen::Index;

// Policy output squashed into [0, 1]: (tanh(u) + 1) / 2.
Matrix squash(const Matrix& u) { return (u.array().tanh() + 1.0) * 0.5; }

Matrix target_policy(const DdpgAgent& agent, const Matrix& next_obs) {
  return squash(nn::predict(agent.actor_target, next_obs));
}

Matrix stack_rows(std::initializer_list<const Matrix*> parts) {
  Index rows = 0;
  Index cols = 0;
  for (const Matrix* m : parts) {
    rows += m->rows();
    cols = m->cols();
  }
  Matrix out(rows, cols);
  Index r = 0;
  for (const Matrix* m : parts) {
    out.middleRows(r, m->rows()) = *m;
    r += m->rows();
  }
  return out;
}

// One descent step on 1/2 mean (Q(x) - y)^2; returns mean (Q(x) - y)^2.
double critic_step(DdpgAgent& agent, const Matrix& x, const RowVector& y) {
  const nn::ForwardResult f = nn::forward(agent.critic, x);
  const RowVector delta = y - f.y.row(0);
  const double batch = static_cast<double>(x.cols());
  const double loss = delta.squaredNorm() / batch;
  const Matrix dq = -delta / batch;
  const nn::BackwardResult b = nn::backward(agent.critic, f.cache, dq);
  nn::adam_step(agent.critic_opt, agent.critic, b.grads);
  return loss;
}

// Ascends mean Q(x with rows [offset, offset+2) replaced by mu(obs)) through
// the critic's input gradient. Returns the objective before the step.
double actor_step(DdpgAgent& agent, const Matrix& obs, Matrix critic_x, Index offset) {
  const nn::ForwardResult pol = nn::forward(agent.actor, obs);
  const Matrix t = pol.y.array().tanh();
  critic_x.middleRows(offset, kActDim) = (t.array() + 1.0) * 0.5;
  const nn::ForwardResult q = nn::forward(agent.critic, critic_x);
  const double batch = static_cast<double>(obs.cols());
  const double objective = q.y.sum() / batch;
  const Matrix dq = Matrix::Constant(1, obs.cols(), -1.0 / batch);
  const Matrix dx = nn::backward_input(agent.critic, q.cache, dq);
  const Matrix du = dx.middleRows(offset, kActDim).array() * (1.0 - t.array().square()) * 0.5;
  const nn::BackwardResult b = nn::backward(agent.actor, pol.cache, du);
  nn::adam_step(agent.actor_opt, agent.actor, b.grads);
  return objective;
}

void soft_update_targets(DdpgAgent& agent, double tau) {
  nn::soft_update(agent.actor_target, agent.actor, tau);
  nn::soft_update(agent.critic_target, agent.critic, tau);
}

void check_batch(const Batch& batch, std::size_t users) {
  if (batch.size() == 0) throw InsufficientDataError("update needs a nonempty batch");
  if (batch.n_users() != users) throw_dimension("batch users", users, batch.n_users());
}

// Shared centralized-critic update; `reward_for(i)` supplies agent i's TD reward.
template <class RewardFn, class AfterAgentFn>
std::vector<UpdateStats> centralized_update(std::vector<DdpgAgent>& agents, const Batch& batch,
                                            const UpdateSettings& s, RewardFn&& reward_for,
                                            AfterAgentFn&& after_agent) {
  check_batch(batch, agents.size());
  const std::size_t users = agents.size();
  std::vector<Matrix> next_act(users);
  for (std::size_t u = 0; u < users; ++u) next_act[u] = target_policy(agents[u], batch.next_obs[u]);
  const Matrix x = joint_critic_input(batch.obs, batch.act);
  const Matrix x_next = joint_critic_input(batch.next_obs, next_act);

  Index obs_rows = 0;
  for (const auto& o : batch.obs) obs_rows += o.rows();

  std::vector<UpdateStats> stats(users);
  for (std::size_t i = 0; i < users; ++i) {
    DdpgAgent& agent = agents[i];
    if (agent.critic_in_dim() != static_cast<std::size_t>(x.rows()))
      throw_dimension("centralized critic input", agent.critic_in_dim(), static_cast<std::size_t>(x.rows()));
    const RowVector r = reward_for(i, stats[i]);
    const RowVector y = r + s.gamma * nn::predict(agent.critic_target, x_next).row(0);
    stats[i].critic_loss = critic_step(agent, x, y);
    stats[i].actor_objective =
        actor_step(agent, batch.obs[i], x, obs_rows + static_cast<Index>(kActDim * i));
    after_agent(i);
  }
  for (auto& agent : agents) soft_update_targets(agent, s.tau_soft);
  return stats;
}

}  // namespace

std::string_view algo_name(Algo algo) {
  switch (algo) {
    case Algo::ddpg:
      return "ddpg";
    case Algo::maddpg:
      return "maddpg";
    case Algo::rmaddpg:
      return "rmaddpg";
  }
  return "?";
}

Algo parse_algo(std::string_view name) {
  if (name == "ddpg") return Algo::ddpg;
  if (name == "maddpg") return Algo::maddpg;
  if (name == "rmaddpg") return Algo::rmaddpg;
  throw ValidationError("unknown algo '" + std::string(name) + "' (expected ddpg, maddpg or rmaddpg)");
}

DdpgAgent make_agent(std::size_t obs_dim, std::size_t critic_in_dim, std::array<double, kActDim> p_max,
                     const LearningRates& lr, Rng& rng) {
  DdpgAgent a;
  a.obs_dim = obs_dim;
  a.p_max = p_max;
  a.actor = nn::init_mlp(obs_dim, kActDim, rng);
  a.actor_target = a.actor;
  a.actor_opt = nn::AdamState::for_params(a.actor, lr.actor);
  a.critic = nn::init_mlp(critic_in_dim, 1, rng);
  a.critic_target = a.critic;
  a.critic_opt = nn::AdamState::for_params(a.critic, lr.critic);
  return a;
}

NatureNet make_nature(std::size_t obs_dim, double lr, Rng& rng) {
  NatureNet n;
  n.net = nn::init_mlp(obs_dim + kActDim, 1, rng);
  n.opt = nn::AdamState::for_params(n.net, lr);
  return n;
}

env::Action act(const DdpgAgent& agent, std::span<const double> obs, double sigma, Rng& rng) {
  if (obs.size() != agent.obs_dim) throw_dimension("act observation", agent.obs_dim, obs.size());
  const Matrix x = Eigen::Map<const Eigen::VectorXd>(obs.data(), static_cast<Index>(obs.size()));
  const Matrix u = nn::predict(agent.actor, x);
  std::array<double, kActDim> a{};
  for (std::size_t d = 0; d < kActDim; ++d) {
    const double p = agent.p_max[d];
    a[d] = p * (std::tanh(u(static_cast<Index>(d), 0)) + 1.0) * 0.5;
    if (sigma > 0.0) a[d] += rng.normal(0.0, sigma * p);
    a[d] = std::clamp(a[d], 0.0, p);
  }
  return env::Action{a[0], a[1]};
}

Batch make_batch(std::span<const Transition* const> samples, std::span<const std::array<double, kActDim>> p_max) {
  if (samples.empty()) throw InsufficientDataError("make_batch: no samples");
  const std::size_t users = samples[0]->n_users();
  if (p_max.size() != users) throw_dimension("make_batch p_max", users, p_max.size());
  const Index b = static_cast<Index>(samples.size());
  Batch batch;
  batch.obs.resize(users);
  batch.act.resize(users);
  batch.rew.resize(users);
  batch.next_obs.resize(users);
  for (std::size_t u = 0; u < users; ++u) {
    const Index od = static_cast<Index>(samples[0]->obs[u].size());
    batch.obs[u].resize(od, b);
    batch.next_obs[u].resize(od, b);
    batch.act[u].resize(kActDim, b);
    batch.rew[u].resize(b);
    for (Index k = 0; k < b; ++k) {
      const Transition& t = *samples[static_cast<std::size_t>(k)];
      if (t.n_users() != users || static_cast<Index>(t.obs[u].size()) != od ||
          static_cast<Index>(t.next_obs[u].size()) != od)
        throw DimensionError("make_batch: inconsistent transition shapes");
      for (Index r = 0; r < od; ++r) {
        batch.obs[u](r, k) = t.obs[u][static_cast<std::size_t>(r)];
        batch.next_obs[u](r, k) = t.next_obs[u][static_cast<std::size_t>(r)];
      }
      batch.act[u](0, k) = t.acts[u].p_offload / p_max[u][0];
      batch.act[u](1, k) = t.acts[u].p_local / p_max[u][1];
      batch.rew[u](k) = t.rewards[u];
    }
  }
  return batch;
}

Batch make_batch(const std::vector<Transition>& samples, std::span<const std::array<double, kActDim>> p_max) {
  std::vector<const Transition*> ptrs;
  ptrs.reserve(samples.size());
  for (const auto& t : samples) ptrs.push_back(&t);
  return make_batch(std::span<const Transition* const>(ptrs), p_max);
}

Matrix joint_critic_input(std::span<const Matrix> obs, std::span<const Matrix> act) {
  if (obs.size() != act.size() || obs.empty()) throw DimensionError("joint_critic_input: mismatched user lists");
  Index rows = 0;
  for (const auto& o : obs) rows += o.rows();
  for (const auto& a : act) rows += a.rows();
  Matrix x(rows, obs[0].cols());
  Index r = 0;
  for (const auto& o : obs) {
    x.middleRows(r, o.rows()) = o;
    r += o.rows();
  }
  for (const auto& a : act) {
    x.middleRows(r, a.rows()) = a;
    r += a.rows();
  }
  return x;
}

RowVector nature_output(const NatureNet& nature, const Batch& batch, std::size_t user) {
  const Matrix x = stack_rows({&batch.obs[user], &batch.act[user]});
  return nn::predict(nature.net, x).row(0);
}

UpdateStats ddpg_update(DdpgAgent& agent, const Batch& batch, std::size_t user, const UpdateSettings& s) {
  if (batch.size() == 0) throw InsufficientDataError("update needs a nonempty batch");
  if (user >= batch.n_users()) throw IndexError("ddpg_update: user index out of range");
  const Matrix& obs = batch.obs[user];
  const Matrix next_act = target_policy(agent, batch.next_obs[user]);
  const Matrix x = joint_critic_input(std::span<const Matrix>(&obs, 1), std::span<const Matrix>(&batch.act[user], 1));
  const Matrix x_next = joint_critic_input(std::span<const Matrix>(&batch.next_obs[user], 1),
                                           std::span<const Matrix>(&next_act, 1));
  if (agent.critic_in_dim() != static_cast<std::size_t>(x.rows()))
    throw_dimension("ddpg critic input", agent.critic_in_dim(), static_cast<std::size_t>(x.rows()));

  UpdateStats st;
  const RowVector y = batch.rew[user] + s.gamma * nn::predict(agent.critic_target, x_next).row(0);
  st.critic_loss = critic_step(agent, x, y);
  st.actor_objective = actor_step(agent, obs, x, obs.rows());
  soft_update_targets(agent, s.tau_soft);
  return st;
}

std::vector<UpdateStats> maddpg_update(std::vector<DdpgAgent>& agents, const Batch& batch, const UpdateSettings& s) {
  return centralized_update(
      agents, batch, s, [&](std::size_t i, UpdateStats&) { return batch.rew[i]; }, [](std::size_t) {});
}

std::vector<UpdateStats> rmaddpg_update(std::vector<DdpgAgent>& agents, std::vector<NatureNet>& natures,
                                        const Batch& batch, double noise_level, const UpdateSettings& s) {
  if (natures.size() != agents.size()) throw_dimension("rmaddpg natures", agents.size(), natures.size());
  if (noise_level < 0.0) throw DomainError("rmaddpg_update: noise_level must be >= 0");
  const double bound = 2.0 * noise_level;
  const double batch_size = static_cast<double>(batch.size());
  std::vector<nn::ForwardResult> nature_fwd(agents.size());

  auto reward_for = [&](std::size_t i, UpdateStats& st) {
    nature_fwd[i] = nn::forward(natures[i].net, stack_rows({&batch.obs[i], &batch.act[i]}));
    const RowVector raw = nature_fwd[i].y.row(0);
    st.nature_output = raw.sum() / batch_size;
    const RowVector& r = batch.rew[i];
    RowVector tilde(r.size());
    for (Index k = 0; k < r.size(); ++k) tilde(k) = std::clamp(raw(k), r(k) - bound, r(k) + bound);
    return tilde;
  };
  // theta0 <- theta0 - beta * grad mean nature(s, a)
  auto nature_step = [&](std::size_t i) {
    const Matrix dy = Matrix::Constant(1, nature_fwd[i].y.cols(), 1.0 / batch_size);
    const nn::BackwardResult b = nn::backward(natures[i].net, nature_fwd[i].cache, dy);
    nn::adam_step(natures[i].opt, natures[i].net, b.grads);
  };
  return centralized_update(agents, batch, s, reward_for, nature_step);
}

}  // namespace mecrl::agents
