#pragma once

#include <vector>

#include "fsrl/env.hpp"

namespace fsrl {

// Windowed success rate of one agent at slot t: fraction of successes in
// slots t-W..t-1. `outcomes[k-1]` holds the outcome of slot k. Throws if
// t <= window (not enough history).
double throughput(const std::vector<Outcome>& outcomes, long t, int window);

// Population standard deviation of the final per-agent throughputs.
double throughput_std(const std::vector<double>& final_throughputs);

// Sum of final per-agent throughputs divided by the number of bands (as
// defined; may exceed 1 under ad-hoc spatial reuse).
double network_throughput(const std::vector<double>& final_throughputs,
                          int num_bands);

// Jain fairness index (sum x)^2 / (M sum x^2), in [1/M, 1]. The all-zero
// vector is a 0/0 degeneracy and is defined as 1 (equal shares).
double jain(const std::vector<double>& final_throughputs);

}  // namespace fsrl
