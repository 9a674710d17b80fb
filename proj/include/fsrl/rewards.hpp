#pragma once

#include <vector>

#include "fsrl/state_codec.hpp"

namespace fsrl {

// Coefficients of the fairness-driven reward and its band-sharing bonus.
struct RewardParams {
  double success_coeff = 0.096;
  double collision_coeff = 1.06;
  double silence_penalty = 0.06;
  double idle_reward = 0.0516;
  int history_length = 16;  // L
  double sharing_amplitude = 0.08;
  double sharing_offset = 0.12;
  double sharing_sigmoid_shift = 5.0;
  bool band_sharing_enabled = true;  // ablation switch
};

// B[n-1]: the agent's own transmissions on band n over the last L slots,
// regardless of outcome.
std::vector<int> band_counts(const HistoryBuffer& history, long t, int L,
                             int num_bands);

// Exponentially discounted fraction of recent non-idle slots on the band
// chosen now, normalized to [0,1] by its maximum (1 - 2^-L).
double weight(const HistoryBuffer& history, Action current_band, long t,
              int L);

// Band-sharing bonus: 0 for a single band; otherwise a sigmoid-in-N
// amplitude times the normalized geometric mean of the (count+1) vector.
// The geometric mean is normalized by its agent-local even-spread maximum
// L/N + 1 and clamped to <= 1.
double band_sharing(const std::vector<int>& counts, int num_bands, int L,
                    const RewardParams& params = {});

// Fairness-driven reward for one slot: success pays success_coeff*(1-w)
// plus the band-sharing bonus, collision costs collision_coeff*w, idling
// pays idle_reward unless the agent was silent for the whole window
// t-L..t, which costs silence_penalty.
double fsrl_reward(const HistoryBuffer& history, Action action,
                   Outcome outcome, long t, const RewardParams& params,
                   const std::vector<int>& counts);

// Collision Penalty 1 baseline reward.
double cp1_reward(Outcome outcome);

}  // namespace fsrl
