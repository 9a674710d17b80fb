#pragma once

#include <Eigen/Core>
#include <array>
#include <deque>

#include "fsrl/env.hpp"

namespace fsrl {

// T x D integer matrix, D = 4 time bits + N one-hot action entries + 1
// outcome. Row j (0-based) describes slot t-T+j, so rows cover slots
// t-T .. t-1 oldest first. Columns:
//   0..3        binary time reference of mod(slot,16), MSB first
//   4..4+N-1    one-hot transmit band (column 4+n-1 for band n; all zero
//               when idle)
//   4+N         outcome in {-1,0,1}
using AugmentedState = Eigen::MatrixXi;

inline int state_dim(int num_bands) { return num_bands + 5; }

// Ring of an agent's own SlotRecords, newest last. Holds only what the
// encoders and reward need (decentralization: no other agent's records
// ever enter).
class HistoryBuffer {
 public:
  explicit HistoryBuffer(int capacity) : capacity_(capacity) {}

  void push(const SlotRecord& rec) {
    records_.push_back(rec);
    if (static_cast<int>(records_.size()) > capacity_) records_.pop_front();
  }

  // Action at absolute slot k; idle for slots never recorded (k < 1 or
  // already evicted -- capacity must cover every lookback in use).
  Action action_at(long k) const {
    const SlotRecord* r = find(k);
    return r ? r->action : 0;
  }

  Outcome outcome_at(long k) const {
    const SlotRecord* r = find(k);
    return r ? r->outcome : 0;
  }

  bool has(long k) const { return find(k) != nullptr; }
  int size() const { return static_cast<int>(records_.size()); }
  int capacity() const { return capacity_; }

 private:
  const SlotRecord* find(long k) const {
    if (records_.empty()) return nullptr;
    long last = records_.back().slot;
    long idx = static_cast<long>(records_.size()) - 1 - (last - k);
    if (idx < 0 || idx >= static_cast<long>(records_.size())) return nullptr;
    return &records_[idx];
  }

  int capacity_;
  std::deque<SlotRecord> records_;
};

// Binary encoding of mod(k, 16), MSB first.
std::array<int, 4> binary_time_ref(long k);

// Augmented state at slot t from the agent's own history. Slots before
// t = 1 are padded with all-zero rows (including time bits).
AugmentedState encode_state(const HistoryBuffer& history, long t,
                            int num_bands, int temporal_length);

}  // namespace fsrl
