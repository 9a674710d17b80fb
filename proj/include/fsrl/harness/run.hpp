#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fsrl/harness/config.hpp"
#include "fsrl/metrics.hpp"

namespace fsrl {

// One agent-slot line of the event log.
struct EventRow {
  long t = 0;
  int agent = 0;  // 1-based
  int action = 0;
  int outcome = 0;
  double reward = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double lr = 0.0;
  std::optional<double> loss;
};

struct RunSummary {
  std::vector<double> final_throughputs;  // C_m over the last W_t slots
  double sigma = 0.0;
  double network_throughput = 0.0;
  double jain = 1.0;
  // Per-agent throughput snapshots for jammer runs: just before the
  // jammer enters, at its last slot, and at the horizon.
  std::vector<std::vector<double>> jammer_segments;
};

struct RunArtifacts {
  ExperimentConfig config;
  std::string dir;  // empty when nothing was written to disk
  std::vector<EventRow> events;
  RunSummary summary;
};

// Executes H slots of the barrier protocol (all agents act, the channel
// resolves, all agents learn) and, when config.out_dir is set, writes
// config.json, events.csv, series.csv, and summary.json there.
RunArtifacts run_single(const ExperimentConfig& config);

struct GridCell {
  int num_agents = 0;
  int num_bands = 0;
  bool ok = false;
  std::string error;
  RunSummary summary;
};

// One run_single per (M, N) pair with M >= N, identical hyper-parameters
// across cells. Failed cells are recorded and the grid continues.
std::vector<GridCell> run_grid(int m_min, int m_max, int n_min, int n_max,
                               const ExperimentConfig& base);

// run_single plus before/during/after throughput segmentation.
RunArtifacts run_jammer(const ExperimentConfig& config);

// run_single under the ad-hoc channel, plus the trailing transmission
// pattern table (pattern.csv).
RunArtifacts run_adhoc(const ExperimentConfig& config,
                       int pattern_slots = 7);

// Recomputes the summary from the raw event log (must agree to 1e-12),
// checks event-log completeness, and replays `spot_checks` random slots
// through the channel model. Throws VerificationFailure on mismatch.
void verify_artifacts(const std::string& dir, int spot_checks = 1000);

// Re-derives plot inputs from a run directory: per-agent throughput
// series, and an SVG line chart. For grid directories, emits the heat
// table. Idempotent.
void emit_plot_data(const std::string& dir);

// Helpers shared with tests and the CLI.
RunSummary summarize(const ExperimentConfig& config,
                     const std::vector<EventRow>& events);
std::vector<EventRow> load_events(const std::string& path);
void write_grid_table(const std::vector<GridCell>& cells,
                      const std::string& path);

}  // namespace fsrl
