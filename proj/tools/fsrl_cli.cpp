// Experiment harness CLI: spectrum-sharing scenarios, artifact
// verification, and plot-data emission.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "fsrl/errors.hpp"
#include "fsrl/harness/run.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;
constexpr int kExitVerificationFailure = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string agents = "fsrl";
  std::uint64_t seed = 1;
  bool seed_set = false;
  bool unseeded = false;
  bool no_time_ref = false;
  bool no_band_sharing = false;
  long horizon = 0;
  int num_agents = 0;
  int num_bands = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.out_dir, "output directory for run artifacts");
  cmd->add_option("--agents", o.agents, "agent kind: fsrl|cp1|idle")
      ->check(CLI::IsMember({"fsrl", "cp1", "idle"}));
  cmd->add_option("--seed", o.seed, "run seed")
      ->each([&o](const std::string&) { o.seed_set = true; });
  cmd->add_flag("--unseeded", o.unseeded, "draw the seed from the OS");
  cmd->add_flag("--no-time-ref", o.no_time_ref,
                "zero the binary time-reference rows of the state");
  cmd->add_flag("--no-band-sharing", o.no_band_sharing,
                "drop the band-sharing reward bonus");
  cmd->add_option("--horizon", o.horizon, "episode length in slots")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--m,--num-agents", o.num_agents, "number of agents")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--n,--num-bands", o.num_bands, "number of bands")
      ->check(CLI::PositiveNumber);
}

fsrl::ExperimentConfig build_config(const CommonOpts& o) {
  fsrl::ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = fsrl::load_config_file(o.config_path);
  if (o.seed_set) cfg.seed = o.seed;
  if (o.unseeded) cfg.seeded = false;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.horizon > 0) cfg.network.horizon = o.horizon;
  if (o.num_agents > 0) cfg.network.num_agents = o.num_agents;
  if (o.num_bands > 0) cfg.network.num_bands = o.num_bands;
  if (o.config_path.empty() || !o.agents.empty()) {
    cfg.agent_kinds = {fsrl::agent_kind_from_string(o.agents)};
  }
  if (o.no_time_ref) cfg.hyper.time_reference = false;
  if (o.no_band_sharing) cfg.hyper.band_sharing = false;
  return cfg;
}

void print_summary(const fsrl::RunSummary& s) {
  std::printf("final per-agent throughput:");
  for (double c : s.final_throughputs) std::printf(" %.4f", c);
  std::printf("\nC_bar=%.4f sigma=%.4f jain=%.4f\n", s.network_throughput,
              s.sigma, s.jain);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized spectrum-access experiment harness"};
  app.require_subcommand(1);

  CommonOpts single_o, grid_o, jam_o, adhoc_o;
  int m_min = 2, m_max = 10, n_min = 1, n_max = 10;
  int jam_band = 0;
  long jam_start = 0, jam_end = 0;
  std::string verify_dir, plot_dir;

  CLI::App* single = app.add_subcommand("single", "run one experiment");
  add_common(single, single_o);

  CLI::App* grid =
      app.add_subcommand("grid", "run the M x N grid (all pairs with M >= N)");
  add_common(grid, grid_o);
  grid->add_option("--m-min", m_min);
  grid->add_option("--m-max", m_max);
  grid->add_option("--n-min", n_min);
  grid->add_option("--n-max", n_max);

  CLI::App* jammer = app.add_subcommand("jammer", "run a jamming scenario");
  add_common(jammer, jam_o);
  jammer->add_option("--jam-band", jam_band, "band occupied by the jammer");
  jammer->add_option("--jam-start", jam_start, "first jammed slot");
  jammer->add_option("--jam-end", jam_end, "last jammed slot");

  CLI::App* adhoc = app.add_subcommand("adhoc", "run an ad-hoc scenario");
  add_common(adhoc, adhoc_o);

  CLI::App* verify =
      app.add_subcommand("verify", "recheck a run directory's artifacts");
  verify->add_option("dir", verify_dir, "run directory")->required();

  CLI::App* plot = app.add_subcommand("plot", "emit plot data for a run");
  plot->add_option("dir", plot_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (single->parsed()) {
      auto art = fsrl::run_single(build_config(single_o));
      print_summary(art.summary);
    } else if (grid->parsed()) {
      auto cfg = build_config(grid_o);
      auto cells = fsrl::run_grid(m_min, m_max, n_min, n_max, cfg);
      std::printf("M,N,C_bar,sigma,jain,status\n");
      for (const auto& c : cells) {
        if (c.ok) {
          std::printf("%d,%d,%.4f,%.4f,%.4f,ok\n", c.num_agents, c.num_bands,
                      c.summary.network_throughput, c.summary.sigma,
                      c.summary.jain);
        } else {
          std::printf("%d,%d,,,,failed: %s\n", c.num_agents, c.num_bands,
                      c.error.c_str());
        }
      }
    } else if (jammer->parsed()) {
      auto cfg = build_config(jam_o);
      if (cfg.network.horizon == 50000 && jam_o.horizon == 0) {
        cfg.network.horizon = 150000;  // covers the default jam window
      }
      fsrl::apply_jammer_preset(cfg);
      if (jam_band > 0) {
        fsrl::JammerConfig jc;
        jc.band = jam_band;
        jc.start_slot = jam_start;
        jc.end_slot = jam_end;
        cfg.network.jammer = jc;
      }
      auto art = fsrl::run_jammer(cfg);
      print_summary(art.summary);
      const char* labels[] = {"pre-jam", "jam-end", "final"};
      for (std::size_t i = 0; i < art.summary.jammer_segments.size(); ++i) {
        std::printf("%s throughput:", labels[i]);
        for (double c : art.summary.jammer_segments[i]) {
          std::printf(" %.4f", c);
        }
        std::printf("\n");
      }
    } else if (adhoc->parsed()) {
      auto cfg = build_config(adhoc_o);
      if (cfg.network.horizon == 50000 && adhoc_o.horizon == 0) {
        cfg.network.horizon = 22000;
      }
      fsrl::apply_adhoc_preset(cfg);
      auto art = fsrl::run_adhoc(cfg);
      print_summary(art.summary);
      double total = 0.0;
      for (double c : art.summary.final_throughputs) total += c;
      std::printf("sum of per-agent throughput: %.4f\n", total);
    } else if (verify->parsed()) {
      fsrl::verify_artifacts(verify_dir);
      std::printf("verification passed: %s\n", verify_dir.c_str());
    } else if (plot->parsed()) {
      fsrl::emit_plot_data(plot_dir);
      std::printf("plot data written to %s\n", plot_dir.c_str());
    }
  } catch (const fsrl::VerificationFailure& e) {
    std::fprintf(stderr, "verification failure: %s\n", e.what());
    return kExitVerificationFailure;
  } catch (const fsrl::NumericalFailure& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitNumericalFailure;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
