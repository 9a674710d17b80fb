#include "fsrl/harness/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fsrl {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (network.num_agents < 1) throw std::invalid_argument("num_agents must be >= 1");
  if (network.num_bands < 1) throw std::invalid_argument("num_bands must be >= 1");
  if (network.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (network.channel_model == ChannelModel::adhoc && network.num_agents < 3) {
    throw std::invalid_argument("ad-hoc channel requires num_agents >= 3");
  }
  if (network.jammer) {
    const JammerConfig& j = *network.jammer;
    if (j.band < 1 || j.band > network.num_bands) {
      throw std::invalid_argument("jammer band out of range");
    }
    if (j.start_slot < 1 || j.start_slot > j.end_slot ||
        j.end_slot > network.horizon) {
      throw std::invalid_argument("jammer window must satisfy 1 <= start <= end <= horizon");
    }
  }
  if (!agent_kinds.empty() &&
      agent_kinds.size() != 1 &&
      static_cast<int>(agent_kinds.size()) != network.num_agents) {
    throw std::invalid_argument("agent_kinds must have 1 or num_agents entries");
  }
  if (hyper.temporal_length < 1 || hyper.reward_history_length < 1 ||
      hyper.buffer_size < 1 || hyper.batch_size < 1 ||
      hyper.quantile_dim < 1 || hyper.hidden_dim < 1 ||
      hyper.target_update_frequency < 1 || hyper.metric_window < 1 ||
      hyper.learning_rate <= 0.0 || hyper.gamma <= 0.0 ||
      hyper.gamma > 1.0 || hyper.huber_k <= 0.0 ||
      hyper.epsilon_min > hyper.epsilon0) {
    throw std::invalid_argument("invalid hyper-parameters");
  }
}

std::vector<AgentKind> ExperimentConfig::resolved_kinds() const {
  if (agent_kinds.empty()) {
    return std::vector<AgentKind>(network.num_agents, AgentKind::fsrl);
  }
  if (agent_kinds.size() == 1) {
    return std::vector<AgentKind>(network.num_agents, agent_kinds[0]);
  }
  return agent_kinds;
}

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::fsrl: return "fsrl";
    case AgentKind::dqn_cp1: return "cp1";
    case AgentKind::idle: return "idle";
  }
  return "fsrl";
}

AgentKind agent_kind_from_string(const std::string& s) {
  if (s == "fsrl") return AgentKind::fsrl;
  if (s == "cp1" || s == "dqn_cp1") return AgentKind::dqn_cp1;
  if (s == "idle") return AgentKind::idle;
  throw std::invalid_argument("unknown agent kind: " + s);
}

std::string to_string(ChannelModel model) {
  return model == ChannelModel::broadcast ? "broadcast" : "adhoc";
}

ChannelModel channel_model_from_string(const std::string& s) {
  if (s == "broadcast") return ChannelModel::broadcast;
  if (s == "adhoc") return ChannelModel::adhoc;
  throw std::invalid_argument("unknown channel model: " + s);
}

namespace {

json hyper_to_json(const HyperParams& h) {
  return json{{"learning_rate", h.learning_rate},
              {"epsilon0", h.epsilon0},
              {"epsilon_decay", h.epsilon_decay},
              {"epsilon_min", h.epsilon_min},
              {"risk_alpha0", h.risk_alpha0},
              {"risk_decay", h.risk_decay},
              {"temporal_length", h.temporal_length},
              {"buffer_size", h.buffer_size},
              {"target_update_frequency", h.target_update_frequency},
              {"reward_history_length", h.reward_history_length},
              {"gamma", h.gamma},
              {"batch_size", h.batch_size},
              {"quantile_dim", h.quantile_dim},
              {"hidden_dim", h.hidden_dim},
              {"huber_k", h.huber_k},
              {"tdl_beta", h.tdl_beta},
              {"tdl_sigma_min", h.tdl_sigma_min},
              {"clip_norm", h.clip_norm},
              {"action_quantiles", h.action_quantiles},
              {"metric_window", h.metric_window},
              {"time_reference", h.time_reference},
              {"band_sharing", h.band_sharing}};
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

HyperParams hyper_from_json(const json& j) {
  HyperParams h;
  maybe(j, "learning_rate", h.learning_rate);
  maybe(j, "epsilon0", h.epsilon0);
  maybe(j, "epsilon_decay", h.epsilon_decay);
  maybe(j, "epsilon_min", h.epsilon_min);
  maybe(j, "risk_alpha0", h.risk_alpha0);
  maybe(j, "risk_decay", h.risk_decay);
  maybe(j, "temporal_length", h.temporal_length);
  maybe(j, "buffer_size", h.buffer_size);
  maybe(j, "target_update_frequency", h.target_update_frequency);
  maybe(j, "reward_history_length", h.reward_history_length);
  maybe(j, "gamma", h.gamma);
  maybe(j, "batch_size", h.batch_size);
  maybe(j, "quantile_dim", h.quantile_dim);
  maybe(j, "hidden_dim", h.hidden_dim);
  maybe(j, "huber_k", h.huber_k);
  maybe(j, "tdl_beta", h.tdl_beta);
  maybe(j, "tdl_sigma_min", h.tdl_sigma_min);
  maybe(j, "clip_norm", h.clip_norm);
  maybe(j, "action_quantiles", h.action_quantiles);
  maybe(j, "metric_window", h.metric_window);
  maybe(j, "time_reference", h.time_reference);
  maybe(j, "band_sharing", h.band_sharing);
  return h;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) {
  json net{{"num_agents", c.network.num_agents},
           {"num_bands", c.network.num_bands},
           {"channel_model", to_string(c.network.channel_model)},
           {"horizon", c.network.horizon}};
  if (c.network.jammer) {
    net["jammer"] = json{{"band", c.network.jammer->band},
                         {"start_slot", c.network.jammer->start_slot},
                         {"end_slot", c.network.jammer->end_slot}};
  }
  json kinds = json::array();
  for (AgentKind k : c.agent_kinds) kinds.push_back(to_string(k));
  json j{{"network", net},
         {"hyper", hyper_to_json(c.hyper)},
         {"agent_kinds", kinds},
         {"seed", c.seed},
         {"seeded", c.seeded},
         {"out_dir", c.out_dir}};
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig c;
  if (j.contains("network")) {
    const json& n = j.at("network");
    maybe(n, "num_agents", c.network.num_agents);
    maybe(n, "num_bands", c.network.num_bands);
    if (n.contains("channel_model")) {
      c.network.channel_model =
          channel_model_from_string(n.at("channel_model").get<std::string>());
    }
    maybe(n, "horizon", c.network.horizon);
    if (n.contains("jammer") && !n.at("jammer").is_null()) {
      const json& jm = n.at("jammer");
      JammerConfig jc;
      maybe(jm, "band", jc.band);
      maybe(jm, "start_slot", jc.start_slot);
      maybe(jm, "end_slot", jc.end_slot);
      c.network.jammer = jc;
    }
  }
  if (j.contains("hyper")) c.hyper = hyper_from_json(j.at("hyper"));
  if (j.contains("agent_kinds")) {
    for (const auto& k : j.at("agent_kinds")) {
      c.agent_kinds.push_back(agent_kind_from_string(k.get<std::string>()));
    }
  }
  maybe(j, "seed", c.seed);
  maybe(j, "seeded", c.seeded);
  maybe(j, "out_dir", c.out_dir);
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void apply_jammer_preset(ExperimentConfig& config) {
  config.hyper.epsilon_min = 0.01;
}

void apply_adhoc_preset(ExperimentConfig& config) {
  config.network.channel_model = ChannelModel::adhoc;
  config.hyper.epsilon0 = 0.4;
  config.hyper.epsilon_decay = 1e-4;
  config.hyper.epsilon_min = 0.0;
}

}  // namespace fsrl
