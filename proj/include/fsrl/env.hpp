#pragma once

#include <optional>
#include <set>
#include <vector>

namespace fsrl {

// Action of one source in one slot: 0 = idle, n in {1..N} = transmit on
// band n.
using Action = int;

// Outcome of one slot: -1 collision, 0 idle, 1 success.
using Outcome = int;

struct JammerConfig {
  int band = 1;          // band occupied by the jammer, in {1..N}
  long start_slot = 1;   // first jammed slot (inclusive)
  long end_slot = 0;     // last jammed slot (inclusive)
};

enum class ChannelModel { broadcast, adhoc };

struct NetworkConfig {
  int num_agents = 2;    // M
  int num_bands = 2;     // N
  ChannelModel channel_model = ChannelModel::broadcast;
  long horizon = 50000;  // H, slots; slot indices run 1..H
  std::optional<JammerConfig> jammer;
};

// One agent-slot record: what the agent did at slot t and what happened.
struct SlotRecord {
  long slot = 0;
  Action action = 0;
  Outcome outcome = 0;
};

// Broadcast channel: a transmission on band n succeeds iff no other agent
// transmits on n and n is not jammed. The jammer acts as a persistent
// transmitter on its band. Idle agents get outcome 0.
std::vector<Outcome> step_broadcast(const std::vector<Action>& actions,
                                    int num_bands,
                                    const std::set<int>& jammed_bands = {});

// Ad-hoc chain: agent i (1-based, i < M) succeeds on band n iff neither
// agent i+1 nor agent i+2 transmits on n; agent M succeeds iff neither
// agent M-1 nor agent M-2 transmits on n. Requires M >= 3.
std::vector<Outcome> step_adhoc(const std::vector<Action>& actions,
                                int num_bands);

// Bands occupied by the jammer at slot t (empty when no jammer or t is
// outside the jamming window).
std::set<int> jammed_bands_at(long t, const NetworkConfig& config);

}  // namespace fsrl
