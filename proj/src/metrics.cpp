#include "fsrl/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fsrl {

double throughput(const std::vector<Outcome>& outcomes, long t, int window) {
  if (t <= window) {
    throw std::invalid_argument("throughput needs t > window (t=" +
                                std::to_string(t) +
                                ", window=" + std::to_string(window) + ")");
  }
  if (t - 1 > static_cast<long>(outcomes.size())) {
    throw std::invalid_argument("outcome stream shorter than t-1 slots");
  }
  int successes = 0;
  for (long k = t - window; k <= t - 1; ++k) {
    if (outcomes[k - 1] == 1) ++successes;
  }
  return static_cast<double>(successes) / window;
}

double throughput_std(const std::vector<double>& final_throughputs) {
  const std::size_t m = final_throughputs.size();
  if (m == 0) return 0.0;
  double mean = 0.0;
  for (double c : final_throughputs) mean += c;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double c : final_throughputs) var += (c - mean) * (c - mean);
  return std::sqrt(var / static_cast<double>(m));
}

double network_throughput(const std::vector<double>& final_throughputs,
                          int num_bands) {
  double sum = 0.0;
  for (double c : final_throughputs) sum += c;
  return sum / num_bands;
}

double jain(const std::vector<double>& final_throughputs) {
  const std::size_t m = final_throughputs.size();
  double sum = 0.0, sum_sq = 0.0;
  for (double c : final_throughputs) {
    sum += c;
    sum_sq += c * c;
  }
  if (sum_sq == 0.0) return 1.0;  // all-zero vector: degenerate equal shares
  return (sum * sum) / (static_cast<double>(m) * sum_sq);
}

}  // namespace fsrl
