#include "fsrl/harness/run.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <json.hpp>

#include "fsrl/errors.hpp"

namespace fsrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using SimAgent = Agent<float>;

// The training loop churns through multi-megabyte activation buffers;
// keeping them off the mmap path avoids page-fault overhead on every
// allocation.
void tune_allocator() {
#if defined(__GLIBC__)
  static std::once_flag once;
  std::call_once(once, [] {
    mallopt(M_MMAP_THRESHOLD, 256 * 1024 * 1024);
    mallopt(M_TRIM_THRESHOLD, 256 * 1024 * 1024);
  });
#endif
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::vector<Outcome> resolve_slot(const ExperimentConfig& config, long t,
                                  const std::vector<Action>& actions) {
  if (config.network.channel_model == ChannelModel::adhoc) {
    return step_adhoc(actions, config.network.num_bands);
  }
  return step_broadcast(actions, config.network.num_bands,
                        jammed_bands_at(t, config.network));
}

void write_events(const std::string& path,
                  const std::vector<EventRow>& events) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,agent,action,outcome,reward,epsilon,alpha,lr,loss\n";
  std::string line;
  for (const EventRow& e : events) {
    line.clear();
    line += std::to_string(e.t);
    line += ',';
    line += std::to_string(e.agent);
    line += ',';
    line += std::to_string(e.action);
    line += ',';
    line += std::to_string(e.outcome);
    line += ',';
    line += fmt(e.reward);
    line += ',';
    line += fmt(e.epsilon);
    line += ',';
    line += fmt(e.alpha);
    line += ',';
    line += fmt(e.lr);
    line += ',';
    if (e.loss) line += fmt(*e.loss);
    line += '\n';
    out << line;
  }
}

json summary_to_json(const RunSummary& s) {
  json j{{"final_throughputs", s.final_throughputs},
         {"sigma", s.sigma},
         {"network_throughput", s.network_throughput},
         {"jain", s.jain}};
  if (!s.jammer_segments.empty()) j["jammer_segments"] = s.jammer_segments;
  return j;
}

RunSummary summary_from_json(const json& j) {
  RunSummary s;
  s.final_throughputs = j.at("final_throughputs").get<std::vector<double>>();
  s.sigma = j.at("sigma").get<double>();
  s.network_throughput = j.at("network_throughput").get<double>();
  s.jain = j.at("jain").get<double>();
  if (j.contains("jammer_segments")) {
    s.jammer_segments =
        j.at("jammer_segments").get<std::vector<std::vector<double>>>();
  }
  return s;
}

// Per-agent outcome streams, index [agent][slot-1].
std::vector<std::vector<Outcome>> outcome_streams(
    const ExperimentConfig& config, const std::vector<EventRow>& events) {
  const int M = config.network.num_agents;
  std::vector<std::vector<Outcome>> streams(M);
  for (auto& s : streams) s.reserve(events.size() / M);
  for (const EventRow& e : events) {
    streams[e.agent - 1].push_back(e.outcome);
  }
  return streams;
}

// Per-agent action streams, index [agent][slot-1].
std::vector<std::vector<Action>> action_streams(
    const ExperimentConfig& config, const std::vector<EventRow>& events) {
  const int M = config.network.num_agents;
  std::vector<std::vector<Action>> streams(M);
  for (auto& s : streams) s.reserve(events.size() / M);
  for (const EventRow& e : events) {
    streams[e.agent - 1].push_back(e.action);
  }
  return streams;
}

void write_series(const std::string& dir, const ExperimentConfig& config,
                  const std::vector<EventRow>& events) {
  const int M = config.network.num_agents;
  const int N = config.network.num_bands;
  const long H = config.network.horizon;
  const int W = std::min<long>(config.hyper.metric_window, H);
  auto outcomes = outcome_streams(config, events);
  auto actions = action_streams(config, events);

  std::ofstream out(dir + "/series.csv");
  out << "t,agent_id,throughput,collision_rate\n";
  for (long t = W; t <= H; t += W) {
    for (int m = 0; m < M; ++m) {
      int succ = 0, coll = 0;
      for (long k = t - W + 1; k <= t; ++k) {
        if (outcomes[m][k - 1] == 1) ++succ;
        if (outcomes[m][k - 1] == -1) ++coll;
      }
      out << t << ',' << (m + 1) << ',' << fmt(double(succ) / W) << ','
          << fmt(double(coll) / W) << '\n';
    }
  }

  std::ofstream bout(dir + "/band_series.csv");
  bout << "t,band,idle_rate\n";
  for (long t = W; t <= H; t += W) {
    std::vector<int> idle(N, 0);
    for (long k = t - W + 1; k <= t; ++k) {
      std::vector<bool> used(N + 1, false);
      for (int m = 0; m < M; ++m) {
        Action a = actions[m][k - 1];
        if (a > 0) used[a] = true;
      }
      for (int n = 1; n <= N; ++n) {
        if (!used[n]) ++idle[n - 1];
      }
    }
    for (int n = 1; n <= N; ++n) {
      bout << t << ',' << n << ',' << fmt(double(idle[n - 1]) / W) << '\n';
    }
  }
}

void write_run_files(const RunArtifacts& art) {
  fs::create_directories(art.dir);
  write_text(art.dir + "/config.json", config_to_json(art.config));
  write_events(art.dir + "/events.csv", art.events);
  write_series(art.dir, art.config, art.events);
  write_text(art.dir + "/summary.json", summary_to_json(art.summary).dump(2));
}

}  // namespace

RunSummary summarize(const ExperimentConfig& config,
                     const std::vector<EventRow>& events) {
  const long H = config.network.horizon;
  const int W = std::min<long>(config.hyper.metric_window, H);
  auto streams = outcome_streams(config, events);
  RunSummary s;
  for (const auto& stream : streams) {
    s.final_throughputs.push_back(throughput(stream, H + 1, W));
  }
  s.sigma = throughput_std(s.final_throughputs);
  s.network_throughput =
      network_throughput(s.final_throughputs, config.network.num_bands);
  s.jain = jain(s.final_throughputs);
  return s;
}

RunArtifacts run_single(const ExperimentConfig& config_in) {
  tune_allocator();
  ExperimentConfig config = config_in;
  config.validate();
  if (!config.seeded) {
    config.seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^
                  std::random_device{}();
    config.seeded = true;  // record the drawn seed for provenance
  }
  const int M = config.network.num_agents;
  const long H = config.network.horizon;
  auto kinds = config.resolved_kinds();

  Rng root(config.seed);
  std::vector<SimAgent> agents;
  agents.reserve(M);
  for (int m = 0; m < M; ++m) {
    agents.emplace_back(kinds[m], config.network.num_bands, config.hyper,
                        root.derive(m + 1));
  }

  RunArtifacts art;
  art.config = config;
  art.dir = config.out_dir;
  art.events.reserve(static_cast<std::size_t>(M) * H);

  std::vector<Action> actions(M);
  for (int m = 0; m < M; ++m) actions[m] = agents[m].begin_episode(H);

  try {
    for (long t = 1; t <= H; ++t) {
      auto outcomes = resolve_slot(config, t, actions);
      for (int m = 0; m < M; ++m) {
        StepInfo info;
        Action taken = actions[m];
        actions[m] = agents[m].step(outcomes[m], &info);
        art.events.push_back({t, m + 1, taken, outcomes[m],
                              agents[m].last_reward(), info.epsilon,
                              info.alpha, info.lr, info.loss});
      }
    }
  } catch (const NumericalFailure&) {
    if (!art.dir.empty()) {
      fs::create_directories(art.dir);
      for (int m = 0; m < M; ++m) {
        std::ofstream ck(art.dir + "/checkpoint_agent" + std::to_string(m + 1) +
                         ".txt");
        save_params(agents[m].params(), ck);
      }
    }
    throw;
  }

  art.summary = summarize(config, art.events);
  if (!art.dir.empty()) write_run_files(art);
  return art;
}

std::vector<GridCell> run_grid(int m_min, int m_max, int n_min, int n_max,
                               const ExperimentConfig& base) {
  std::vector<GridCell> cells;
  for (int m = m_min; m <= m_max; ++m) {
    for (int n = n_min; n <= n_max; ++n) {
      if (m < n) continue;
      GridCell cell;
      cell.num_agents = m;
      cell.num_bands = n;
      ExperimentConfig cfg = base;
      cfg.network.num_agents = m;
      cfg.network.num_bands = n;
      cfg.agent_kinds = base.agent_kinds;
      cfg.seed = Rng(base.seed).derive(100 * m + n).seed();
      if (!base.out_dir.empty()) {
        cfg.out_dir = base.out_dir + "/cell_m" + std::to_string(m) + "_n" +
                      std::to_string(n);
      }
      try {
        cell.summary = run_single(cfg).summary;
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  if (!base.out_dir.empty()) {
    fs::create_directories(base.out_dir);
    write_grid_table(cells, base.out_dir + "/grid.csv");
  }
  return cells;
}

void write_grid_table(const std::vector<GridCell>& cells,
                      const std::string& path) {
  std::ofstream out(path);
  out << "M,N,C_bar,sigma,jain,status\n";
  for (const GridCell& c : cells) {
    out << c.num_agents << ',' << c.num_bands << ',';
    if (c.ok) {
      out << fmt(c.summary.network_throughput) << ',' << fmt(c.summary.sigma)
          << ',' << fmt(c.summary.jain) << ",ok\n";
    } else {
      out << ",,,failed: " << c.error << '\n';
    }
  }
}

RunArtifacts run_jammer(const ExperimentConfig& config) {
  if (!config.network.jammer) {
    throw std::invalid_argument("run_jammer requires a jammer config");
  }
  RunArtifacts art = run_single(config);
  const JammerConfig& j = *config.network.jammer;
  const long H = config.network.horizon;
  const int W = std::min<long>(config.hyper.metric_window, H);
  auto streams = outcome_streams(config, art.events);
  auto segment_at = [&](long t) {
    std::vector<double> v;
    for (const auto& s : streams) {
      v.push_back(t > W ? throughput(s, t, W) : 0.0);
    }
    return v;
  };
  // before the jammer enters / at its last slot / at the horizon
  art.summary.jammer_segments = {segment_at(j.start_slot),
                                 segment_at(j.end_slot + 1),
                                 segment_at(H + 1)};
  if (!art.dir.empty()) {
    write_text(art.dir + "/summary.json",
               summary_to_json(art.summary).dump(2));
  }
  return art;
}

RunArtifacts run_adhoc(const ExperimentConfig& config_in, int pattern_slots) {
  ExperimentConfig config = config_in;
  if (config.network.channel_model != ChannelModel::adhoc) {
    throw std::invalid_argument("run_adhoc requires channel_model = adhoc");
  }
  RunArtifacts art = run_single(config);
  if (!art.dir.empty()) {
    auto actions = action_streams(config, art.events);
    const long H = config.network.horizon;
    std::ofstream out(art.dir + "/pattern.csv");
    out << "t,agent,action\n";
    for (long t = std::max<long>(1, H - pattern_slots + 1); t <= H; ++t) {
      for (int m = 0; m < config.network.num_agents; ++m) {
        out << t << ',' << (m + 1) << ',' << actions[m][t - 1] << '\n';
      }
    }
  }
  return art;
}

std::vector<EventRow> load_events(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<EventRow> events;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EventRow e;
    std::stringstream ss(line);
    std::string field;
    auto next = [&]() {
      std::getline(ss, field, ',');
      return field;
    };
    e.t = std::stol(next());
    e.agent = std::stoi(next());
    e.action = std::stoi(next());
    e.outcome = std::stoi(next());
    e.reward = std::stod(next());
    e.epsilon = std::stod(next());
    e.alpha = std::stod(next());
    e.lr = std::stod(next());
    if (std::getline(ss, field, ',') && !field.empty()) {
      e.loss = std::stod(field);
    }
    events.push_back(e);
  }
  return events;
}

void verify_artifacts(const std::string& dir, int spot_checks) {
  ExperimentConfig config = load_config_file(dir + "/config.json");
  auto events = load_events(dir + "/events.csv");
  const int M = config.network.num_agents;
  const long H = config.network.horizon;

  if (static_cast<long>(events.size()) != M * H) {
    throw VerificationFailure("event log has " +
                              std::to_string(events.size()) +
                              " rows, expected " + std::to_string(M * H));
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    long want_t = static_cast<long>(i) / M + 1;
    int want_agent = static_cast<int>(i) % M + 1;
    if (events[i].t != want_t || events[i].agent != want_agent) {
      throw VerificationFailure("event log out of order at row " +
                                std::to_string(i + 2) + " (slot " +
                                std::to_string(events[i].t) + ", agent " +
                                std::to_string(events[i].agent) + ")");
    }
  }

  RunSummary recomputed = summarize(config, events);
  std::ifstream sin(dir + "/summary.json");
  if (!sin) throw VerificationFailure("missing summary.json");
  json sj = json::parse(sin);
  RunSummary stored = summary_from_json(sj);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  bool match = stored.final_throughputs.size() ==
                   recomputed.final_throughputs.size() &&
               close(stored.sigma, recomputed.sigma) &&
               close(stored.network_throughput,
                     recomputed.network_throughput) &&
               close(stored.jain, recomputed.jain);
  if (match) {
    for (std::size_t m = 0; m < stored.final_throughputs.size(); ++m) {
      if (!close(stored.final_throughputs[m],
                 recomputed.final_throughputs[m])) {
        match = false;
        break;
      }
    }
  }
  if (!match) {
    throw VerificationFailure(
        "stored summary does not match the event log in " + dir);
  }

  // Replay random slots through the channel model.
  auto actions = action_streams(config, events);
  auto outcomes = outcome_streams(config, events);
  Rng rng(config.seed ^ 0x5eedu);
  std::vector<Action> slot_actions(M);
  for (int i = 0; i < spot_checks; ++i) {
    long t = rng.uniform_int(static_cast<int>(std::min<long>(H, 1 << 30))) + 1;
    for (int m = 0; m < M; ++m) slot_actions[m] = actions[m][t - 1];
    auto expect = resolve_slot(config, t, slot_actions);
    for (int m = 0; m < M; ++m) {
      if (expect[m] != outcomes[m][t - 1]) {
        throw VerificationFailure(
            "outcome mismatch at slot " + std::to_string(t) + ", agent " +
            std::to_string(m + 1) + ": log has " +
            std::to_string(outcomes[m][t - 1]) + ", channel model gives " +
            std::to_string(expect[m]));
      }
    }
  }
}

void emit_plot_data(const std::string& dir) {
  if (fs::exists(dir + "/grid.csv")) {
    std::ifstream in(dir + "/grid.csv");
    std::ofstream out(dir + "/plot_grid.csv");
    out << "M,N,C_bar,sigma,jain\n";
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty() || line.find(",ok") == std::string::npos) continue;
      out << line.substr(0, line.rfind(',')) << '\n';
    }
  }
  if (!fs::exists(dir + "/events.csv")) return;

  ExperimentConfig config = load_config_file(dir + "/config.json");
  auto events = load_events(dir + "/events.csv");
  auto streams = outcome_streams(config, events);
  const long H = config.network.horizon;
  const int W = std::min<long>(config.hyper.metric_window, H);
  const int M = config.network.num_agents;

  std::ofstream out(dir + "/plot_throughput.csv");
  out << "t,agent_id,C\n";
  std::vector<std::vector<double>> series(M);
  for (long t = W; t <= H; t += W) {
    for (int m = 0; m < M; ++m) {
      double c = throughput(streams[m], t + 1, W);
      series[m].push_back(c);
      out << t << ',' << (m + 1) << ',' << fmt(c) << '\n';
    }
  }

  // Minimal SVG line chart of per-agent throughput over time.
  const int width = 800, height = 400, margin = 40;
  std::ofstream svg(dir + "/plot_throughput.svg");
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<line x1='" << margin << "' y1='" << height - margin << "' x2='"
      << width - margin << "' y2='" << height - margin
      << "' stroke='black'/>\n";
  svg << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin
      << "' y2='" << height - margin << "' stroke='black'/>\n";
  const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};
  double ymax = 1.0;
  for (const auto& s : series) {
    for (double v : s) ymax = std::max(ymax, v);
  }
  for (int m = 0; m < M; ++m) {
    if (series[m].empty()) continue;
    svg << "<polyline fill='none' stroke='" << colors[m % 10]
        << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < series[m].size(); ++i) {
      double x = margin + (width - 2.0 * margin) * i /
                              std::max<std::size_t>(1, series[m].size() - 1);
      double y = height - margin -
                 (height - 2.0 * margin) * (series[m][i] / ymax);
      svg << x << ',' << y << ' ';
    }
    svg << "'/>\n";
  }
  svg << "</svg>\n";
}

}  // namespace fsrl
