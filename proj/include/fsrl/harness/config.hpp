#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsrl/agent.hpp"
#include "fsrl/env.hpp"

namespace fsrl {

// Full description of one experiment; serialized verbatim into the output
// directory so every run carries its provenance.
struct ExperimentConfig {
  NetworkConfig network;
  HyperParams hyper;
  std::vector<AgentKind> agent_kinds;  // one per source; resized to M
  std::uint64_t seed = 1;
  bool seeded = true;  // unseeded mode draws the seed from the OS
  std::string out_dir;

  void validate() const;
  // Kinds for all M agents (replicates a single entry).
  std::vector<AgentKind> resolved_kinds() const;
};

std::string to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& s);
std::string to_string(ChannelModel model);
ChannelModel channel_model_from_string(const std::string& s);

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Scenario presets: hyper-parameter deltas tied to the jammer / ad-hoc
// scenarios (minimum epsilon 0.01; initial epsilon 0.4 with decay 1e-4
// and floor 0, respectively).
void apply_jammer_preset(ExperimentConfig& config);
void apply_adhoc_preset(ExperimentConfig& config);

}  // namespace fsrl
