#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace rlcg {

struct HyperParams {
  double alpha = 300.0;   // weight of the normalized objective decrease in the reward
  double epsilon = 0.05;  // exploration probability
  double gamma = 0.9;     // discount
  double lr = 0.001;      // Adam learning rate
  std::size_t batch_size = 32;
  std::size_t replay_capacity = 10000;
  std::size_t k_candidates = 10;
  std::size_t hidden = 32;  // embedding width H
  std::size_t rounds = 2;   // message-passing rounds R
  // 0 bootstraps targets from the online network; n > 0 refreshes a frozen
  // copy every n gradient steps.
  std::size_t target_sync_every = 0;
  // Adam steps per environment step once the buffer holds a batch.
  std::size_t updates_per_step = 1;
  int max_iters = 1000;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

inline void validate(const HyperParams& h) {
  if (!(h.epsilon >= 0.0 && h.epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (!(h.gamma > 0.0 && h.gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(h.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (h.batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (h.replay_capacity < 1) throw std::invalid_argument("replay capacity must be at least 1");
  if (h.k_candidates < 1) throw std::invalid_argument("k must be at least 1");
  if (h.hidden < 1 || h.rounds < 1) throw std::invalid_argument("network width and depth must be positive");
  if (h.updates_per_step < 1) throw std::invalid_argument("updates per step must be at least 1");
  if (h.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
}

}  // namespace rlcg
