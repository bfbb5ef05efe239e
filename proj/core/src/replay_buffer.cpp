#include "mecrl/replay_buffer.hpp"

#include <string>

#include "mecrl/error.hpp"

namespace mecrl::agents {

bool Transition::operator==(const Transition& o) const {
  if (obs != o.obs || rewards != o.rewards || next_obs != o.next_obs || acts.size() != o.acts.size()) return false;
  for (std::size_t i = 0; i < acts.size(); ++i)
    if (acts[i].p_offload != o.acts[i].p_offload || acts[i].p_local != o.acts[i].p_local) return false;
  return true;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ValidationError("replay buffer capacity must be >= 1");
}

void ReplayBuffer::push(Transition t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
    return;
  }
  storage_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= storage_.size()) throw IndexError("replay buffer index " + std::to_string(i) + " out of range");
  return storage_[(cursor_ + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t k, Rng& rng) const {
  if (k > storage_.size())
    throw InsufficientDataError("cannot sample " + std::to_string(k) + " transitions from a buffer of " +
                                std::to_string(storage_.size()));
  std::vector<std::size_t> idx(k);
  for (auto& i : idx) i = rng.index(storage_.size());
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t k, Rng& rng) const {
  std::vector<Transition> out;
  out.reserve(k);
  for (std::size_t i : sample_indices(k, rng)) out.push_back(at(i));
  return out;
}

}  // namespace mecrl::agents
