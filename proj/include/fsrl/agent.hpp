#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "fsrl/distrl.hpp"
#include "fsrl/env.hpp"
#include "fsrl/neural/network.hpp"
#include "fsrl/rewards.hpp"
#include "fsrl/rng.hpp"
#include "fsrl/state_codec.hpp"

namespace fsrl {

enum class AgentKind {
  fsrl,
  dqn_cp1,  // baseline: CP1 reward, no risk distortion, no TDL, Q_d = 1
  idle,     // debug: always idles, never learns
};

// Every tuned constant in one record. Defaults are the values used across
// all experiments; scenario scripts override only what they state.
struct HyperParams {
  double learning_rate = 5e-4;  // mu_bar
  double epsilon0 = 5e-2;
  double epsilon_decay = 8e-6;
  double epsilon_min = 5e-3;
  double risk_alpha0 = 0.5;
  double risk_decay = 5e-4;
  int temporal_length = 15;  // T
  int buffer_size = 1500;
  int target_update_frequency = 500;
  int reward_history_length = 16;  // L
  double gamma = 0.9;
  int batch_size = 128;
  int quantile_dim = 128;  // Q_d

  // Defaults chosen for this artifact (not externally specified).
  int hidden_dim = 64;        // D_h
  double huber_k = 1.0;
  double tdl_beta = 0.1;
  double tdl_sigma_min = 1e-3;
  double clip_norm = 10.0;
  int action_quantiles = 32;  // fresh tau samples per greedy decision
  int metric_window = 500;    // W_t

  // Ablation switches.
  bool time_reference = true;
  bool band_sharing = true;
};

template <typename Scalar>
struct Transition {
  AugmentedState state;
  Action action = 0;
  Scalar reward = 0;
  AugmentedState next_state;
  bool done = false;
};

// FIFO ring of transitions; oldest evicted first once at capacity.
template <typename Scalar>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity) : capacity_(capacity) {}

  void push(Transition<Scalar> t) {
    if (static_cast<int>(items_.size()) < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }

  // Index 0 = oldest surviving transition.
  const Transition<Scalar>& at(int i) const {
    return items_[(head_ + i) % items_.size()];
  }

 private:
  int capacity_;
  int head_ = 0;
  std::vector<Transition<Scalar>> items_;
};

// Linear epsilon decay with a floor, n in time slots.
inline double epsilon_at(long n, const HyperParams& hp) {
  return std::max(hp.epsilon_min, hp.epsilon0 - hp.epsilon_decay * n);
}

// Diagnostics of one learning step, surfaced into the event log.
struct StepInfo {
  double epsilon = 0.0;
  double alpha = 0.0;
  double lr = 0.0;
  std::optional<double> loss;
};

// One source's decision loop: keeps its own history, network, target
// network, replay buffer, and RNG stream. Consumes only its own outcomes.
template <typename Scalar>
class Agent {
 public:
  using Mat = typename ApproximatorParams<Scalar>::Mat;

  Agent(AgentKind kind, int num_bands, const HyperParams& hp, Rng rng)
      : kind_(kind),
        num_bands_(num_bands),
        hp_(hp),
        rng_(rng),
        history_(std::max(hp.temporal_length, hp.reward_history_length) + 1),
        buffer_(hp.buffer_size),
        net_(init_params<Scalar>(state_dim(num_bands), hp.hidden_dim,
                                 num_bands + 1, rng_)),
        target_(net_) {
    risk_ = {hp.risk_alpha0, hp.risk_decay, 0.0};
    tdl_ = {hp.tdl_beta, hp.learning_rate, hp.tdl_sigma_min};
  }

  AgentKind kind() const { return kind_; }
  const HyperParams& hyper() const { return hp_; }
  const ApproximatorParams<Scalar>& params() const { return net_; }
  const ApproximatorParams<Scalar>& target_params() const { return target_; }
  ApproximatorParams<Scalar>& mutable_params() { return net_; }
  const ReplayBuffer<Scalar>& buffer() const { return buffer_; }
  long train_steps() const { return train_steps_; }
  long slot() const { return t_; }

  double current_alpha() const {
    return kind_ == AgentKind::fsrl ? risk_alpha(train_steps_, risk_) : 0.0;
  }

  // Starts the episode at slot 1 and returns the first action.
  Action begin_episode(long horizon) {
    horizon_ = horizon;
    t_ = 1;
    state_ = encode(t_);
    action_ = select_action(state_);
    return action_;
  }

  Action current_action() const { return action_; }

  // Delivers the outcome of the pending slot, learns, and returns the
  // action for the next slot.
  Action step(Outcome outcome, StepInfo* info = nullptr) {
    double reward = compute_reward(outcome);
    history_.push({t_, action_, outcome});
    AugmentedState next_state = encode(t_ + 1);
    StepInfo local;
    local.epsilon = epsilon_at(t_ - 1, hp_);
    local.alpha = current_alpha();
    local.lr = hp_.learning_rate;
    last_reward_ = reward;
    if (kind_ != AgentKind::idle) {
      buffer_.push({state_, action_, static_cast<Scalar>(reward), next_state,
                    t_ == horizon_});
      local.loss = train_step(&local.lr);
    }
    if (info) *info = local;
    ++t_;
    state_ = std::move(next_state);
    action_ = select_action(state_);
    return action_;
  }

  double last_reward() const { return last_reward_; }

  // Epsilon-greedy over mean-quantile Q-values; ties break to the lowest
  // action index.
  Action select_action(const AugmentedState& state) {
    if (kind_ == AgentKind::idle) return 0;
    double eps = epsilon_at(t_ - 1, hp_);
    if (rng_.uniform() < eps) return rng_.uniform_int(num_bands_ + 1);
    return greedy_action(state);
  }

  Action greedy_action(const AugmentedState& state) {
    Mat taus = action_taus();
    auto q = q_values<Scalar>({state}, taus, net_);
    Action best = 0;
    for (int a = 1; a < q.cols(); ++a) {
      if (q(0, a) > q(0, best)) best = a;
    }
    return best;
  }

  // One gradient step from a uniform replay sample; no-op until the
  // buffer holds a full batch. Returns the loss when a step happened.
  std::optional<double> train_step(double* lr_used = nullptr) {
    const int B = hp_.batch_size;
    if (buffer_.size() < B) return std::nullopt;
    const int qd = quantile_dim();
    const double alpha = current_alpha();

    std::vector<const Transition<Scalar>*> batch(B);
    for (int b = 0; b < B; ++b) {
      batch[b] = &buffer_.at(rng_.uniform_int(buffer_.size()));
    }
    std::vector<AugmentedState> states(B), next_states(B);
    std::vector<int> actions(B);
    for (int b = 0; b < B; ++b) {
      states[b] = batch[b]->state;
      next_states[b] = batch[b]->next_state;
      actions[b] = batch[b]->action;
    }

    Mat taus_target = training_taus(B, qd, alpha);
    Mat taus_pred = training_taus(B, qd, alpha);

    // Bootstrap targets from the frozen network under its greedy policy.
    auto target_fp = forward(next_states, taus_target, target_, false);
    auto target_q = q_values(target_fp);
    const auto& target_z = target_fp.tape.value(target_fp.z);
    Mat targets(B, qd);
    for (int b = 0; b < B; ++b) {
      int greedy = 0;
      for (int a = 1; a < target_q.cols(); ++a) {
        if (target_q(b, a) > target_q(b, greedy)) greedy = a;
      }
      for (int q = 0; q < qd; ++q) {
        Scalar boot = batch[b]->done ? Scalar(0)
                                     : static_cast<Scalar>(hp_.gamma) *
                                           target_z(b * qd + q, greedy);
        targets(b, q) = batch[b]->reward + boot;
      }
    }

    auto fp = forward(states, taus_pred, net_, true);
    auto pred = fp.tape.gather_grouped(fp.z, actions, qd);
    auto loss_id = fp.tape.quantile_huber(pred, targets, taus_pred,
                                          static_cast<Scalar>(hp_.huber_k));
    fp.tape.backward(loss_id);
    std::vector<Mat> grads;
    grads.reserve(fp.param_ids.size());
    for (auto id : fp.param_ids) grads.push_back(fp.tape.grad(id));

    double lr = hp_.learning_rate;
    if (kind_ == AgentKind::fsrl) {
      const auto& pred_v = fp.tape.value(pred);
      double likelihood = 0.0;
      double delta_sum = 0.0;
      for (int b = 0; b < B; ++b) {
        Eigen::VectorXd pv = pred_v.row(b).transpose().template cast<double>();
        Eigen::VectorXd tv = targets.row(b).transpose().template cast<double>();
        likelihood += tdl_likelihood(pv, tv, hp_.tdl_sigma_min);
        delta_sum += pv.mean() - tv.mean();
      }
      likelihood /= B;
      lr = modulate_lr(likelihood, delta_sum / B <= 0.0, tdl_);
    }
    if (lr_used) *lr_used = lr;

    apply_gradients(net_, grads, lr, hp_.clip_norm);
    ++train_steps_;
    if (train_steps_ % hp_.target_update_frequency == 0) {
      sync_target(net_, target_);
    }
    return static_cast<double>(fp.tape.value(loss_id)(0, 0));
  }

  AugmentedState encode(long t) const {
    AugmentedState s =
        encode_state(history_, t, num_bands_, hp_.temporal_length);
    if (!hp_.time_reference) s.leftCols(4).setZero();
    return s;
  }

  const HistoryBuffer& history() const { return history_; }

 private:
  int quantile_dim() const {
    return kind_ == AgentKind::fsrl ? hp_.quantile_dim : 1;
  }

  Mat action_taus() {
    if (kind_ != AgentKind::fsrl) {
      return Mat::Constant(1, 1, Scalar(0.5));
    }
    Eigen::MatrixXd raw = sample_taus(rng_, 1, hp_.action_quantiles);
    return wang_transform(raw, current_alpha()).template cast<Scalar>();
  }

  Mat training_taus(int batch, int qd, double alpha) {
    if (kind_ != AgentKind::fsrl) {
      return Mat::Constant(batch, 1, Scalar(0.5));
    }
    Eigen::MatrixXd raw = sample_taus(rng_, batch, qd);
    return wang_transform(raw, alpha).template cast<Scalar>();
  }

  double compute_reward(Outcome outcome) const {
    // The idle debug kind logs the fairness-driven reward it would have
    // earned, which exercises the idle/silence branches.
    if (kind_ != AgentKind::dqn_cp1) {
      RewardParams rp;
      rp.history_length = hp_.reward_history_length;
      rp.band_sharing_enabled = hp_.band_sharing;
      auto counts =
          band_counts(history_, t_, hp_.reward_history_length, num_bands_);
      return fsrl_reward(history_, action_, outcome, t_, rp, counts);
    }
    return cp1_reward(outcome);
  }

  AgentKind kind_;
  int num_bands_;
  HyperParams hp_;
  Rng rng_;
  HistoryBuffer history_;
  ReplayBuffer<Scalar> buffer_;
  ApproximatorParams<Scalar> net_;
  ApproximatorParams<Scalar> target_;
  RiskSchedule risk_;
  TdlParams tdl_;
  long horizon_ = 0;
  long t_ = 1;
  long train_steps_ = 0;
  AugmentedState state_;
  Action action_ = 0;
  double last_reward_ = 0.0;
};

}  // namespace fsrl
