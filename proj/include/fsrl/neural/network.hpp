#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "fsrl/neural/tape.hpp"
#include "fsrl/rng.hpp"
#include "fsrl/state_codec.hpp"

namespace fsrl {

// Weights of the return-distribution approximator: LSTM state encoder,
// then dueling value/advantage heads over the quantile-embedded features.
// The cosine embedding frequencies are fixed (omega_i = i), not learned.
template <typename Scalar>
struct ApproximatorParams {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  int input_dim = 0;    // D = N + 5
  int hidden_dim = 0;   // D_h
  int num_actions = 0;  // |A| = N + 1

  // LSTM, gate order i | f | g | o along the 4*D_h axis.
  Mat lstm_w;  // D x 4D_h
  Mat lstm_u;  // D_h x 4D_h
  Mat lstm_b;  // 1 x 4D_h

  // Value head: D_h -> D_h (rectified) -> 1.
  Mat v_w1, v_b1, v_w2, v_b2;
  // Advantage head: D_h -> D_h (rectified) -> |A|.
  Mat a_w1, a_b1, a_w2, a_b2;

  template <typename F>
  void for_each(F&& f) {
    f("lstm_w", lstm_w);
    f("lstm_u", lstm_u);
    f("lstm_b", lstm_b);
    f("v_w1", v_w1);
    f("v_b1", v_b1);
    f("v_w2", v_w2);
    f("v_b2", v_b2);
    f("a_w1", a_w1);
    f("a_b1", a_b1);
    f("a_w2", a_w2);
    f("a_b2", a_b2);
  }

  template <typename F>
  void for_each(F&& f) const {
    const_cast<ApproximatorParams*>(this)->for_each(
        [&](const char* name, const Mat& m) { f(name, m); });
  }

  static constexpr int kNumTensors = 11;
};

// Uniform +-sqrt(1/fan_in) init; LSTM forget-gate bias starts at 1.
template <typename Scalar>
ApproximatorParams<Scalar> init_params(int input_dim, int hidden_dim,
                                       int num_actions, Rng& rng) {
  using Mat = typename ApproximatorParams<Scalar>::Mat;
  ApproximatorParams<Scalar> p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.num_actions = num_actions;
  auto uni = [&rng](int rows, int cols, int fan_in) {
    Mat m(rows, cols);
    double a = std::sqrt(1.0 / fan_in);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        m(r, c) = static_cast<Scalar>(rng.uniform_sym(a));
      }
    }
    return m;
  };
  const int dh = hidden_dim;
  p.lstm_w = uni(input_dim, 4 * dh, input_dim);
  p.lstm_u = uni(dh, 4 * dh, dh);
  p.lstm_b = Mat::Zero(1, 4 * dh);
  p.lstm_b.middleCols(dh, dh).setConstant(Scalar(1));  // forget gate
  p.v_w1 = uni(dh, dh, dh);
  p.v_b1 = Mat::Zero(1, dh);
  p.v_w2 = uni(dh, 1, dh);
  p.v_b2 = Mat::Zero(1, 1);
  p.a_w1 = uni(dh, dh, dh);
  p.a_b1 = Mat::Zero(1, dh);
  p.a_w2 = uni(dh, num_actions, dh);
  p.a_b2 = Mat::Zero(1, num_actions);
  return p;
}

// Cosine quantile embedding: row b*Q_d+q, column i holds
// cos(pi * tau(b,q) * i), i = 0..D_h-1. Uses the Chebyshev recurrence
// cos(i x) = 2 cos(x) cos((i-1) x) - cos((i-2) x), one cos per row.
template <typename Scalar>
typename ApproximatorParams<Scalar>::Mat cosine_embed(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& taus,
    int hidden_dim) {
  using Mat = typename ApproximatorParams<Scalar>::Mat;
  const Eigen::Index B = taus.rows(), Qd = taus.cols();
  Mat embed(B * Qd, hidden_dim);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (Eigen::Index q = 0; q < Qd; ++q) {
      Scalar* row = embed.data() + (b * Qd + q);
      const Eigen::Index stride = embed.rows();
      Scalar c1 =
          std::cos(static_cast<Scalar>(M_PI) * taus(b, q));
      Scalar prev2 = Scalar(1), prev1 = c1;
      row[0] = prev2;
      if (hidden_dim > 1) row[stride] = prev1;
      for (int i = 2; i < hidden_dim; ++i) {
        Scalar c = Scalar(2) * c1 * prev1 - prev2;
        row[i * stride] = c;
        prev2 = prev1;
        prev1 = c;
      }
    }
  }
  return embed;
}

// One full differentiable pass: the tape plus the ids a caller needs to
// attach a loss and read parameter gradients.
template <typename Scalar>
struct ForwardPass {
  Tape<Scalar> tape;
  typename Tape<Scalar>::Id z = -1;  // (B*Q_d) x |A| return distribution
  typename Tape<Scalar>::Id value = -1;   // (B*Q_d) x 1 state value
  typename Tape<Scalar>::Id hidden = -1;  // B x D_h LSTM features
  std::vector<typename Tape<Scalar>::Id> param_ids;  // for_each order
  int batch = 0;
  int quantile_dim = 0;
};

namespace detail {

template <typename Scalar>
typename Tape<Scalar>::Id lstm_graph(
    Tape<Scalar>& tape, const std::vector<AugmentedState>& states,
    const ApproximatorParams<Scalar>& params,
    typename Tape<Scalar>::Id w, typename Tape<Scalar>::Id u,
    typename Tape<Scalar>::Id b) {
  using Mat = typename ApproximatorParams<Scalar>::Mat;
  const int B = static_cast<int>(states.size());
  const int T = static_cast<int>(states[0].rows());
  const int D = static_cast<int>(states[0].cols());
  if (D != params.input_dim) {
    throw std::invalid_argument("state feature dimension " +
                                std::to_string(D) + " != network input " +
                                std::to_string(params.input_dim));
  }
  for (const auto& s : states) {
    if (s.rows() != T || s.cols() != D) {
      throw std::invalid_argument("states in a batch must share T and D");
    }
  }
  const int dh = params.hidden_dim;
  auto h = tape.leaf(Mat::Zero(B, dh));
  auto c = tape.leaf(Mat::Zero(B, dh));
  for (int t = 0; t < T; ++t) {  // oldest slot first
    Mat x(B, D);
    for (int bi = 0; bi < B; ++bi) x.row(bi) = states[bi].row(t).template cast<Scalar>();
    auto xt = tape.leaf(x);
    auto pre = tape.add_rowvec(
        tape.add(tape.matmul(xt, w), tape.matmul(h, u)), b);
    auto gi = tape.sigmoid(tape.slice_cols(pre, 0, dh));
    auto gf = tape.sigmoid(tape.slice_cols(pre, dh, dh));
    auto gg = tape.tanh_(tape.slice_cols(pre, 2 * dh, dh));
    auto go = tape.sigmoid(tape.slice_cols(pre, 3 * dh, dh));
    c = tape.add(tape.hadamard(gf, c), tape.hadamard(gi, gg));
    h = tape.hadamard(go, tape.tanh_(c));
  }
  return h;
}

}  // namespace detail

// Builds the dueling return-distribution graph. `taus` must already be
// risk-distorted. When requires_grad is false the tape is forward-only.
template <typename Scalar>
ForwardPass<Scalar> forward(const std::vector<AugmentedState>& states,
                            const Eigen::Matrix<Scalar, Eigen::Dynamic,
                                                Eigen::Dynamic>& taus,
                            const ApproximatorParams<Scalar>& params,
                            bool requires_grad = false) {
  if (static_cast<Eigen::Index>(states.size()) != taus.rows()) {
    throw std::invalid_argument("batch size mismatch between states and taus");
  }
  ForwardPass<Scalar> fp;
  fp.batch = static_cast<int>(states.size());
  fp.quantile_dim = static_cast<int>(taus.cols());
  Tape<Scalar>& tape = fp.tape;

  params.for_each([&](const char*, const auto& m) {
    fp.param_ids.push_back(tape.leaf(m, requires_grad));
  });
  auto pid = [&fp](int i) { return fp.param_ids[i]; };
  // for_each order: 0 lstm_w, 1 lstm_u, 2 lstm_b, 3..6 value head,
  // 7..10 advantage head
  auto h = detail::lstm_graph(tape, states, params, pid(0), pid(1), pid(2));
  tape.check_finite(h, "lstm");
  fp.hidden = h;

  auto embed = tape.leaf(cosine_embed<Scalar>(taus, params.hidden_dim));
  auto z0 = tape.hadamard(embed, tape.repeat_rows(h, fp.quantile_dim));

  auto vh = tape.relu(tape.add_rowvec(tape.matmul(z0, pid(3)), pid(4)));
  auto v = tape.add_rowvec(tape.matmul(vh, pid(5)), pid(6));
  tape.check_finite(v, "value_head");
  auto ah = tape.relu(tape.add_rowvec(tape.matmul(z0, pid(7)), pid(8)));
  auto a = tape.add_rowvec(tape.matmul(ah, pid(9)), pid(10));
  tape.check_finite(a, "advantage_head");

  auto a_centered = tape.sub(a, tape.broadcast_cols(tape.row_mean(a),
                                                    params.num_actions));
  fp.value = v;
  fp.z = tape.add(tape.broadcast_cols(v, params.num_actions), a_centered);
  tape.check_finite(fp.z, "return_distribution");
  return fp;
}

// LSTM features only (B x D_h), forward-only.
template <typename Scalar>
typename ApproximatorParams<Scalar>::Mat lstm_encode(
    const std::vector<AugmentedState>& states,
    const ApproximatorParams<Scalar>& params) {
  Tape<Scalar> tape;
  std::vector<typename Tape<Scalar>::Id> ids;
  auto w = tape.leaf(params.lstm_w);
  auto u = tape.leaf(params.lstm_u);
  auto b = tape.leaf(params.lstm_b);
  auto h = detail::lstm_graph(tape, states, params, w, u, b);
  tape.check_finite(h, "lstm");
  return tape.value(h);
}

// Mean over the quantile dimension of a finished pass: B x |A|.
template <typename Scalar>
typename ApproximatorParams<Scalar>::Mat q_values(
    const ForwardPass<Scalar>& fp) {
  using Mat = typename ApproximatorParams<Scalar>::Mat;
  const auto& z = fp.tape.value(fp.z);
  Mat q(fp.batch, z.cols());
  for (int b = 0; b < fp.batch; ++b) {
    q.row(b) =
        z.middleRows(b * fp.quantile_dim, fp.quantile_dim).colwise().mean();
  }
  return q;
}

template <typename Scalar>
typename ApproximatorParams<Scalar>::Mat q_values(
    const std::vector<AugmentedState>& states,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& taus,
    const ApproximatorParams<Scalar>& params) {
  return q_values(forward(states, taus, params, false));
}

// Plain gradient-descent step with optional global-norm clipping
// (clip_norm <= 0 disables). Gradients follow for_each order.
template <typename Scalar>
void apply_gradients(
    ApproximatorParams<Scalar>& params,
    const std::vector<typename ApproximatorParams<Scalar>::Mat>& grads,
    double learning_rate, double clip_norm = 0.0) {
  if (grads.size() != ApproximatorParams<Scalar>::kNumTensors) {
    throw std::invalid_argument("gradient count mismatch");
  }
  double sq = 0.0;
  for (const auto& g : grads) {
    if (!g.allFinite()) throw NumericalFailure("gradients");
    sq += static_cast<double>(g.squaredNorm());
  }
  double scale = 1.0;
  double norm = std::sqrt(sq);
  if (clip_norm > 0.0 && norm > clip_norm) scale = clip_norm / norm;
  int i = 0;
  params.for_each([&](const char*, auto& m) {
    m -= static_cast<Scalar>(learning_rate * scale) * grads[i++];
  });
}

template <typename Scalar>
void sync_target(const ApproximatorParams<Scalar>& params,
                 ApproximatorParams<Scalar>& target) {
  target = params;
}

// Analytic-vs-central-difference check on a random subsample of entries.
// loss_and_grad must return the loss and per-tensor gradients; returns
// the maximum relative error max |g - fd| / max(|g|, |fd|, floor).
template <typename Scalar>
double gradient_check(
    const ApproximatorParams<Scalar>& params,
    const std::function<std::pair<
        Scalar, std::vector<typename ApproximatorParams<Scalar>::Mat>>(
        const ApproximatorParams<Scalar>&)>& loss_and_grad,
    double epsilon, int samples_per_tensor, Rng& rng,
    double denom_floor = 1e-5) {
  auto [loss0, grads] = loss_and_grad(params);
  (void)loss0;
  double max_rel = 0.0;
  int t = 0;
  ApproximatorParams<Scalar> work = params;
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>*> tensors;
  work.for_each([&](const char*, auto& m) { tensors.push_back(&m); });
  for (auto* tensor : tensors) {
    const auto& g = grads[t++];
    const int n = static_cast<int>(tensor->size());
    for (int s = 0; s < std::min(samples_per_tensor, n); ++s) {
      int idx = rng.uniform_int(n);
      Scalar saved = tensor->data()[idx];
      tensor->data()[idx] = saved + static_cast<Scalar>(epsilon);
      double lp = static_cast<double>(loss_and_grad(work).first);
      tensor->data()[idx] = saved - static_cast<Scalar>(epsilon);
      double lm = static_cast<double>(loss_and_grad(work).first);
      tensor->data()[idx] = saved;
      double fd = (lp - lm) / (2.0 * epsilon);
      double an = static_cast<double>(g.data()[idx]);
      double rel = std::abs(an - fd) /
                   std::max({std::abs(an), std::abs(fd), denom_floor});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

// Versioned text checkpoint of named tensors, full double precision.
template <typename Scalar>
void save_params(const ApproximatorParams<Scalar>& params, std::ostream& os) {
  os << "fsrl-params v1\n";
  os << params.input_dim << " " << params.hidden_dim << " "
     << params.num_actions << "\n";
  os.precision(17);
  params.for_each([&](const char* name, const auto& m) {
    os << name << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        os << static_cast<double>(m(r, c))
           << (c + 1 == m.cols() ? '\n' : ' ');
      }
    }
  });
}

template <typename Scalar>
ApproximatorParams<Scalar> load_params(std::istream& is) {
  std::string magic, version;
  is >> magic >> version;
  if (magic != "fsrl-params" || version != "v1") {
    throw std::runtime_error("unrecognized checkpoint header");
  }
  ApproximatorParams<Scalar> p;
  is >> p.input_dim >> p.hidden_dim >> p.num_actions;
  p.for_each([&](const char* name, auto& m) {
    std::string got;
    Eigen::Index rows, cols;
    is >> got >> rows >> cols;
    if (got != name) {
      throw std::runtime_error("checkpoint tensor order mismatch: expected " +
                               std::string(name) + ", got " + got);
    }
    m.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        double v;
        is >> v;
        m(r, c) = static_cast<Scalar>(v);
      }
    }
  });
  if (!is) throw std::runtime_error("truncated checkpoint");
  return p;
}

}  // namespace fsrl
