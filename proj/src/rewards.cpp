#include "fsrl/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace fsrl {

std::vector<int> band_counts(const HistoryBuffer& history, long t, int L,
                             int num_bands) {
  std::vector<int> counts(num_bands, 0);
  for (long k = t - L; k <= t - 1; ++k) {
    if (k < 1) continue;
    Action a = history.action_at(k);
    if (a > 0) ++counts[a - 1];
  }
  return counts;
}

double weight(const HistoryBuffer& history, Action current_band, long t,
              int L) {
  double raw = 0.0;
  for (long k = t - L; k <= t - 1; ++k) {
    if (k < 1) continue;
    if (history.action_at(k) != current_band) continue;
    raw += std::ldexp(static_cast<double>(std::abs(history.outcome_at(k))),
                      static_cast<int>(k - t));
  }
  return raw / (1.0 - std::ldexp(1.0, -L));
}

double band_sharing(const std::vector<int>& counts, int num_bands, int L,
                    const RewardParams& params) {
  if (num_bands <= 1) return 0.0;
  double amplitude =
      params.sharing_amplitude /
          (1.0 + std::exp(-num_bands + params.sharing_sigmoid_shift)) +
      params.sharing_offset;
  double log_prod = 0.0;
  for (int c : counts) log_prod += std::log1p(static_cast<double>(c));
  double gmean = std::exp(log_prod / num_bands);
  double local_max = static_cast<double>(L) / num_bands + 1.0;
  double g = std::min(1.0, gmean / local_max);
  return amplitude * g;
}

double fsrl_reward(const HistoryBuffer& history, Action action,
                   Outcome outcome, long t, const RewardParams& params,
                   const std::vector<int>& counts) {
  const int L = params.history_length;
  if (outcome == 1) {
    double w = weight(history, action, t, L);
    double psi = params.band_sharing_enabled
                     ? band_sharing(counts, static_cast<int>(counts.size()), L,
                                    params)
                     : 0.0;
    return params.success_coeff * (1.0 - w) + psi;
  }
  if (outcome == -1) {
    double w = weight(history, action, t, L);
    return -params.collision_coeff * w;
  }
  // outcome 0: silent-window check covers slots t-L..t inclusive (the
  // current action is idle whenever outcome is 0)
  bool always_silent = true;
  for (long k = t - L; k <= t - 1 && always_silent; ++k) {
    if (k >= 1 && history.action_at(k) != 0) always_silent = false;
  }
  return always_silent ? -params.silence_penalty : params.idle_reward;
}

double cp1_reward(Outcome outcome) {
  if (outcome == 1) return 3.0;
  if (outcome == -1) return -1.0;
  return 0.0;
}

}  // namespace fsrl
