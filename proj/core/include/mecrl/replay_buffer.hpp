#pragma once

#include <cstddef>
#include <vector>

#include "mecrl/mec_env.hpp"
#include "mecrl/rng.hpp"

namespace mecrl::agents {

// One joint slot: every user's normalized observation, raw action in watts,
// the reward the learner was shown, and the next normalized observation.
struct Transition {
  std::vector<std::vector<double>> obs;
  std::vector<env::Action> acts;
  std::vector<double> rewards;
  std::vector<std::vector<double>> next_obs;

  std::size_t n_users() const { return obs.size(); }
  bool operator==(const Transition& o) const;
};

// Fixed-capacity FIFO ring.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);

  // k uniform draws with replacement. Throws InsufficientDataError if k > size().
  std::vector<Transition> sample(std::size_t k, Rng& rng) const;
  std::vector<std::size_t> sample_indices(std::size_t k, Rng& rng) const;

  // i-th oldest retained transition.
  const Transition& at(std::size_t i) const;

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::vector<Transition> storage_;
  std::size_t cursor_ = 0;  // slot the next push overwrites once full
};

}  // namespace mecrl::agents
