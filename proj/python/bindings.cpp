// Python module over the simulator core: channel models, state encoding,
// rewards, metrics, the distributional numerics, and the experiment
// runner/verifier.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fsrl/agent.hpp"
#include "fsrl/harness/run.hpp"

namespace py = pybind11;
using namespace fsrl;

namespace {

HistoryBuffer history_from_rows(
    const std::vector<std::tuple<long, int, int>>& rows) {
  HistoryBuffer h(rows.size() + 1);
  for (const auto& [slot, action, outcome] : rows) {
    h.push({slot, action, outcome});
  }
  return h;
}

py::dict summary_to_dict(const RunSummary& s) {
  py::dict d;
  d["final_throughputs"] = s.final_throughputs;
  d["sigma"] = s.sigma;
  d["network_throughput"] = s.network_throughput;
  d["jain"] = s.jain;
  if (!s.jammer_segments.empty()) d["jammer_segments"] = s.jammer_segments;
  return d;
}

ExperimentConfig config_from_dict(const py::dict& d) {
  return config_from_json(
      py::module_::import("json").attr("dumps")(d).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "multi-agent dynamic spectrum access simulator";

  py::register_exception<NumericalFailure>(m, "NumericalFailure");
  py::register_exception<VerificationFailure>(m, "VerificationFailure");

  // channel models
  m.def("step_broadcast", &step_broadcast, py::arg("actions"),
        py::arg("num_bands"), py::arg("jammed_bands") = std::set<int>{},
        "Resolve one slot of the shared broadcast channel.");
  m.def("step_adhoc", &step_adhoc, py::arg("actions"), py::arg("num_bands"),
        "Resolve one slot of the chain-topology ad-hoc channel.");

  // state encoding
  m.def(
      "binary_time_ref",
      [](long t) {
        auto bits = binary_time_ref(t);
        return std::vector<int>(bits.begin(), bits.end());
      },
      py::arg("t"), "4-bit big-endian encoding of t mod 16.");
  m.def(
      "encode_state",
      [](const std::vector<std::tuple<long, int, int>>& history, long t,
         int num_bands, int temporal_length) {
        auto h = history_from_rows(history);
        return encode_state(h, t, num_bands, temporal_length);
      },
      py::arg("history"), py::arg("t"), py::arg("num_bands"),
      py::arg("temporal_length"),
      "Augmented state matrix from (slot, action, outcome) rows.");
  m.def("state_dim", &state_dim, py::arg("num_bands"));

  // rewards
  m.def(
      "fsrl_reward",
      [](const std::vector<std::tuple<long, int, int>>& history, int action,
         int outcome, long t, int history_length, bool band_sharing_enabled,
         int num_bands) {
        auto h = history_from_rows(history);
        RewardParams rp;
        rp.history_length = history_length;
        rp.band_sharing_enabled = band_sharing_enabled;
        auto counts = band_counts(h, t, history_length, num_bands);
        return fsrl_reward(h, action, outcome, t, rp, counts);
      },
      py::arg("history"), py::arg("action"), py::arg("outcome"), py::arg("t"),
      py::arg("history_length") = 16, py::arg("band_sharing_enabled") = true,
      py::arg("num_bands") = 1,
      "Fairness-driven reward for one slot given the agent's history.");
  m.def("cp1_reward", &cp1_reward, py::arg("outcome"));
  m.def(
      "weight",
      [](const std::vector<std::tuple<long, int, int>>& history, int band,
         long t, int history_length) {
        auto h = history_from_rows(history);
        return weight(h, band, t, history_length);
      },
      py::arg("history"), py::arg("band"), py::arg("t"),
      py::arg("history_length") = 16);

  // metrics
  m.def("throughput", &throughput, py::arg("outcomes"), py::arg("t"),
        py::arg("window"));
  m.def("throughput_std", &throughput_std, py::arg("throughputs"));
  m.def("network_throughput", &network_throughput, py::arg("throughputs"),
        py::arg("num_bands"));
  m.def("jain", &jain, py::arg("throughputs"));

  // distributional numerics
  m.def("wang_transform",
        py::overload_cast<double, double>(&wang_transform), py::arg("tau"),
        py::arg("alpha"));
  m.def("norm_cdf", &norm_cdf, py::arg("x"));
  m.def("norm_inv", &norm_inv, py::arg("p"));
  m.def(
      "quantile_huber_loss",
      [](const Eigen::MatrixXd& delta, const Eigen::VectorXd& taus_prime,
         double huber_k) {
        return quantile_huber_loss(delta, taus_prime, huber_k);
      },
      py::arg("delta"), py::arg("taus_prime"), py::arg("huber_k") = 1.0);
  m.def("tdl_likelihood", &tdl_likelihood, py::arg("pred_samples"),
        py::arg("target_samples"), py::arg("sigma_min") = 1e-3);
  m.def(
      "risk_alpha",
      [](long step, double alpha0, double decay) {
        return risk_alpha(step, {alpha0, decay, 0.0});
      },
      py::arg("step"), py::arg("alpha0") = 0.5, py::arg("decay") = 5e-4);

  // experiment harness
  m.def(
      "run_single",
      [](const py::dict& config) {
        auto art = run_single(config_from_dict(config));
        py::dict d;
        d["seed"] = art.config.seed;
        d["dir"] = art.dir;
        d["summary"] = summary_to_dict(art.summary);
        return d;
      },
      py::arg("config"),
      "Run one experiment; config mirrors the JSON config schema.");
  m.def(
      "verify",
      [](const std::string& dir, int spot_checks) {
        verify_artifacts(dir, spot_checks);
      },
      py::arg("dir"), py::arg("spot_checks") = 1000,
      "Re-derive the summary and replay random slots; raises on mismatch.");
  m.def("default_config", [] {
    return py::module_::import("json").attr("loads")(
        config_to_json(ExperimentConfig{}));
  });
}
