#include "fsrl/env.hpp"

#include <stdexcept>
#include <string>

namespace fsrl {

namespace {

void check_actions(const std::vector<Action>& actions, int num_bands) {
  for (std::size_t m = 0; m < actions.size(); ++m) {
    if (actions[m] < 0 || actions[m] > num_bands) {
      throw std::invalid_argument("invalid action " +
                                  std::to_string(actions[m]) + " for agent " +
                                  std::to_string(m + 1) + " (valid range 0.." +
                                  std::to_string(num_bands) + ")");
    }
  }
}

}  // namespace

std::vector<Outcome> step_broadcast(const std::vector<Action>& actions,
                                    int num_bands,
                                    const std::set<int>& jammed_bands) {
  check_actions(actions, num_bands);
  std::vector<int> transmitters(num_bands + 1, 0);
  for (Action a : actions) {
    if (a > 0) ++transmitters[a];
  }
  std::vector<Outcome> outcomes(actions.size(), 0);
  for (std::size_t m = 0; m < actions.size(); ++m) {
    Action a = actions[m];
    if (a == 0) continue;
    bool clear = transmitters[a] == 1 && jammed_bands.count(a) == 0;
    outcomes[m] = clear ? 1 : -1;
  }
  return outcomes;
}

std::vector<Outcome> step_adhoc(const std::vector<Action>& actions,
                                int num_bands) {
  if (actions.size() < 3) {
    throw std::invalid_argument("ad-hoc channel requires M >= 3 agents");
  }
  check_actions(actions, num_bands);
  const int M = static_cast<int>(actions.size());
  auto transmits_on = [&](int agent, Action band) {
    // agent is 1-based; out-of-range agents never interfere
    return agent >= 1 && agent <= M && actions[agent - 1] == band;
  };
  std::vector<Outcome> outcomes(actions.size(), 0);
  for (int i = 1; i <= M; ++i) {
    Action a = actions[i - 1];
    if (a == 0) continue;
    bool interfered = (i < M) ? (transmits_on(i + 1, a) || transmits_on(i + 2, a))
                              : (transmits_on(M - 1, a) || transmits_on(M - 2, a));
    outcomes[i - 1] = interfered ? -1 : 1;
  }
  return outcomes;
}

std::set<int> jammed_bands_at(long t, const NetworkConfig& config) {
  if (!config.jammer) return {};
  const JammerConfig& j = *config.jammer;
  if (t >= j.start_slot && t <= j.end_slot) return {j.band};
  return {};
}

}  // namespace fsrl
