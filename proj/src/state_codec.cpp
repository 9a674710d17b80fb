#include "fsrl/state_codec.hpp"

namespace fsrl {

std::array<int, 4> binary_time_ref(long k) {
  int v = static_cast<int>(((k % 16) + 16) % 16);
  return {(v >> 3) & 1, (v >> 2) & 1, (v >> 1) & 1, v & 1};
}

AugmentedState encode_state(const HistoryBuffer& history, long t,
                            int num_bands, int temporal_length) {
  const int T = temporal_length;
  const int D = state_dim(num_bands);
  AugmentedState s = AugmentedState::Zero(T, D);
  for (int j = 0; j < T; ++j) {
    long k = t - T + j;
    if (k < 1) continue;  // cold-start padding: all-zero row
    auto bits = binary_time_ref(k);
    for (int b = 0; b < 4; ++b) s(j, b) = bits[b];
    Action a = history.action_at(k);
    if (a > 0) s(j, 4 + a - 1) = 1;
    s(j, 4 + num_bands) = history.outcome_at(k);
  }
  return s;
}

}  // namespace fsrl
