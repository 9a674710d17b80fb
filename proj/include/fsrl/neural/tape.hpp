#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fsrl/errors.hpp"

namespace fsrl {

// Minimal reverse-mode differentiation tape over dense matrices, sized
// for the handful of operators the return-distribution network needs.
// Usage: build a graph inside one Tape, call backward(loss), read grads.
template <typename Scalar>
class Tape {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Id = int;

  Id leaf(const Mat& v, bool requires_grad = false) {
    return push(v, requires_grad, {});
  }

  // out = a * b
  Id matmul(Id a, Id b) {
    Id out = push(value(a) * value(b), needs(a) || needs(b),
                  [this, a, b](const Mat& g) {
                    accum(a, g * value(b).transpose());
                    accum(b, value(a).transpose() * g);
                  });
    return out;
  }

  Id add(Id a, Id b) {
    return push(value(a) + value(b), needs(a) || needs(b),
                [this, a, b](const Mat& g) {
                  accum(a, g);
                  accum(b, g);
                });
  }

  Id sub(Id a, Id b) {
    return push(value(a) - value(b), needs(a) || needs(b),
                [this, a, b](const Mat& g) {
                  accum(a, g);
                  accum(b, -g);
                });
  }

  Id hadamard(Id a, Id b) {
    return push(value(a).cwiseProduct(value(b)), needs(a) || needs(b),
                [this, a, b](const Mat& g) {
                  accum(a, g.cwiseProduct(value(b)));
                  accum(b, g.cwiseProduct(value(a)));
                });
  }

  Id scale(Id a, Scalar s) {
    return push(value(a) * s, needs(a),
                [this, a, s](const Mat& g) { accum(a, g * s); });
  }

  // Broadcast a 1 x n bias row over every row of m.
  Id add_rowvec(Id m, Id row) {
    Mat v = value(m);
    v.rowwise() += value(row).row(0);
    return push(std::move(v), needs(m) || needs(row),
                [this, m, row](const Mat& g) {
                  accum(m, g);
                  accum(row, g.colwise().sum());
                });
  }

  Id sigmoid(Id a) {
    Mat v = ((-value(a).array()).exp() + Scalar(1)).inverse().matrix();
    Id out = push(std::move(v), needs(a), {});
    if (needs(a)) {
      nodes_[out].backprop = [this, a, out](const Mat& g) {
        const Mat& s = value(out);
        accum(a, g.cwiseProduct(
                     s.cwiseProduct(Mat::Ones(s.rows(), s.cols()) - s)));
      };
    }
    return out;
  }

  Id tanh_(Id a) {
    Mat v = value(a).array().tanh().matrix();
    Id out = push(std::move(v), needs(a), {});
    if (needs(a)) {
      nodes_[out].backprop = [this, a, out](const Mat& g) {
        const Mat& t = value(out);
        accum(a, g.cwiseProduct(Mat::Ones(t.rows(), t.cols()) -
                                t.cwiseProduct(t)));
      };
    }
    return out;
  }

  Id relu(Id a) {
    Mat v = value(a).cwiseMax(Scalar(0));
    return push(std::move(v), needs(a), [this, a](const Mat& g) {
      accum(a, (value(a).array() > Scalar(0))
                   .select(g.array(), Scalar(0))
                   .matrix());
    });
  }

  Id slice_cols(Id a, int begin, int n) {
    return push(value(a).middleCols(begin, n), needs(a),
                [this, a, begin, n](const Mat& g) {
                  Mat full = Mat::Zero(value(a).rows(), value(a).cols());
                  full.middleCols(begin, n) = g;
                  accum(a, full);
                });
  }

  // Each row of a repeated k consecutive times: (B x n) -> (B*k x n).
  Id repeat_rows(Id a, int k) {
    const Mat& v = value(a);
    Mat out(v.rows() * k, v.cols());
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      out.middleRows(r * k, k).rowwise() = v.row(r);
    }
    return push(std::move(out), needs(a), [this, a, k](const Mat& g) {
      Mat red(value(a).rows(), value(a).cols());
      for (Eigen::Index r = 0; r < red.rows(); ++r) {
        red.row(r) = g.middleRows(r * k, k).colwise().sum();
      }
      accum(a, red);
    });
  }

  // Row-wise mean: (B x n) -> (B x 1).
  Id row_mean(Id a) {
    return push(value(a).rowwise().mean(), needs(a), [this, a](const Mat& g) {
      const Eigen::Index n = value(a).cols();
      accum(a, (g / Scalar(n)) * Mat::Ones(1, n));
    });
  }

  // (B x 1) column replicated to width n.
  Id broadcast_cols(Id a, int n) {
    return push(value(a) * Mat::Ones(1, n), needs(a),
                [this, a](const Mat& g) {
                  accum(a, g.rowwise().sum());
                });
  }

  // From z of shape (B*group x cols), pick column actions[b] within each
  // group of `group` consecutive rows: out(b, q) = z(b*group+q, actions[b]).
  Id gather_grouped(Id z, const std::vector<int>& actions, int group) {
    const Mat& v = value(z);
    const int B = static_cast<int>(actions.size());
    Mat out(B, group);
    for (int b = 0; b < B; ++b) {
      out.row(b) = v.col(actions[b]).segment(b * group, group).transpose();
    }
    return push(std::move(out), needs(z),
                [this, z, actions, group](const Mat& g) {
                  Mat full = Mat::Zero(value(z).rows(), value(z).cols());
                  for (int b = 0; b < static_cast<int>(actions.size()); ++b) {
                    full.col(actions[b]).segment(b * group, group) =
                        g.row(b).transpose();
                  }
                  accum(z, full);
                });
  }

  // Batched quantile-regression Huber loss. pred: B x Qp (differentiated);
  // targets: B x Qt and taus_prime: B x Qp (constants). Returns a 1x1 node
  // holding the loss averaged over the batch:
  //   (1/B) sum_b (1/Qt) sum_i sum_j |tau'_bj - 1{d<=0}| H_k(d)/k,
  //   d = pred(b,j) - targets(b,i).
  Id quantile_huber(Id pred, const Mat& targets, const Mat& taus_prime,
                    Scalar k) {
    using Arr = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Mat& p0 = value(pred);
    const Eigen::Index B = p0.rows(), Qp = p0.cols(), Qt = targets.cols();
    Scalar total = 0;
    for (Eigen::Index b = 0; b < B; ++b) {
      // d(i,j) = pred(b,j) - targets(b,i)
      Arr d = p0.row(b).replicate(Qt, 1).array() -
              targets.row(b).transpose().replicate(1, Qp).array();
      Arr w = (taus_prime.row(b).replicate(Qt, 1).array() -
               (d <= Scalar(0)).template cast<Scalar>())
                  .abs();
      Arr ad = d.abs();
      Arr h = (ad <= k).select(Scalar(0.5) * d * d, k * (ad - Scalar(0.5) * k));
      total += (w * h).sum() / k;
    }
    Mat out(1, 1);
    out(0, 0) = total / Scalar(B * Qt);
    return push(std::move(out), needs(pred),
                [this, pred, targets, taus_prime, k](const Mat& g) {
                  const Mat& p = value(pred);
                  const Eigen::Index B = p.rows(), Qp = p.cols(),
                                     Qt = targets.cols();
                  Mat dp(B, Qp);
                  const Scalar scale = g(0, 0) / Scalar(B * Qt);
                  for (Eigen::Index b = 0; b < B; ++b) {
                    Arr d = p.row(b).replicate(Qt, 1).array() -
                            targets.row(b).transpose().replicate(1, Qp).array();
                    Arr w = (taus_prime.row(b).replicate(Qt, 1).array() -
                             (d <= Scalar(0)).template cast<Scalar>())
                                .abs();
                    Arr hp = (d.abs() <= k).select(d, (d > Scalar(0))
                                                          .select(Arr::Constant(
                                                                      d.rows(),
                                                                      d.cols(),
                                                                      k),
                                                                  -k));
                    dp.row(b) =
                        scale / k * (w * hp).matrix().colwise().sum();
                  }
                  accum(pred, dp);
                });
  }

  // Mean of all entries: (B x n) -> 1x1. Handy for scalar test losses.
  Id mean_all(Id a) {
    Mat out(1, 1);
    out(0, 0) = value(a).mean();
    return push(std::move(out), needs(a), [this, a](const Mat& g) {
      const Mat& v = value(a);
      accum(a, Mat::Constant(v.rows(), v.cols(),
                             g(0, 0) / Scalar(v.rows() * v.cols())));
    });
  }

  Id sum_all(Id a) {
    Mat out(1, 1);
    out(0, 0) = value(a).sum();
    return push(std::move(out), needs(a), [this, a](const Mat& g) {
      accum(a, Mat::Constant(value(a).rows(), value(a).cols(), g(0, 0)));
    });
  }

  const Mat& value(Id id) const { return nodes_[id].value; }

  // Gradient accumulated in backward(); zero-shaped if the node was never
  // reached.
  Mat grad(Id id) const {
    if (nodes_[id].grad.size() == 0) {
      return Mat::Zero(nodes_[id].value.rows(), nodes_[id].value.cols());
    }
    return nodes_[id].grad;
  }

  void check_finite(Id id, const std::string& name) const {
    if (!value(id).allFinite()) throw NumericalFailure(name);
  }

  // Reverse sweep from a 1x1 root.
  void backward(Id root) {
    if (value(root).size() != 1) {
      throw std::invalid_argument("backward root must be scalar");
    }
    nodes_[root].grad = Mat::Constant(1, 1, Scalar(1));
    for (Id id = root; id >= 0; --id) {
      Node& n = nodes_[id];
      if (n.grad.size() == 0 || !n.backprop) continue;
      n.backprop(n.grad);
    }
  }

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool requires_grad = false;
    std::function<void(const Mat&)> backprop;
  };

  bool needs(Id id) const { return nodes_[id].requires_grad; }

  Id push(Mat v, bool requires_grad,
          std::function<void(const Mat&)> backprop) {
    Node n;
    n.value = std::move(v);
    n.requires_grad = requires_grad;
    if (requires_grad) n.backprop = std::move(backprop);
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size()) - 1;
  }

  void accum(Id id, const Mat& g) {
    if (!nodes_[id].requires_grad) return;
    if (nodes_[id].grad.size() == 0) {
      nodes_[id].grad = g;
    } else {
      nodes_[id].grad += g;
    }
  }

  std::vector<Node> nodes_;
};

}  // namespace fsrl
