#pragma once

#include <Eigen/Core>

#include "fsrl/rng.hpp"

namespace fsrl {

// Linear risk decay with a floor: alpha(n) = max(floor, alpha0 - decay*n).
struct RiskSchedule {
  double alpha0 = 0.5;
  double decay = 5e-4;
  double floor = 0.0;
};

double risk_alpha(long step, const RiskSchedule& schedule);

// Learning-rate modulation parameters.
struct TdlParams {
  double beta = 0.1;        // floor applied to the likelihood
  double base_lr = 5e-4;    // mu_bar
  double sigma_min = 1e-3;  // kernel width floor
};

// Standard normal CDF and its inverse (accurate to ~1e-15; the inverse
// uses a rational approximation refined by one Halley step).
double norm_cdf(double x);
double norm_inv(double p);

// Uniform quantile fractions, kept strictly inside (eps, 1-eps) so the
// Wang transform stays finite.
Eigen::MatrixXd sample_taus(Rng& rng, int batch, int quantile_dim,
                            double eps = 1e-6);

// Wang risk distortion Phi(Phi^-1(tau) + alpha), element-wise.
double wang_transform(double tau, double alpha);
Eigen::MatrixXd wang_transform(const Eigen::MatrixXd& taus, double alpha);

// Distributional TD matrix: delta(i,j) = pred[j] - (r + gamma*next[i]),
// with the bootstrap term dropped when done.
Eigen::MatrixXd td_error_matrix(const Eigen::VectorXd& pred_samples,
                                double reward, double gamma,
                                const Eigen::VectorXd& next_samples,
                                bool done);

// Huber function with threshold k.
double huber(double delta, double k);

// Quantile-regression Huber loss over one TD matrix:
// (1/Q_d) sum_i sum_j |tau'_j - 1{delta<=0}| * H_k(delta)/k.
// taus_prime aligns with the second (prediction) index of delta.
double quantile_huber_loss(const Eigen::MatrixXd& delta,
                           const Eigen::VectorXd& taus_prime, double huber_k);

// Likelihood that prediction and target quantile samples come from the
// same distribution: exp(-mean_j min_i |target_j - pred_i| / sigma) with
// sigma = max(std(pred), sigma_min).
double tdl_likelihood(const Eigen::VectorXd& pred_samples,
                      const Eigen::VectorXd& target_samples, double sigma_min);

// Learning rate for one update: the reduced rate max(beta, L_S)*mu_bar
// applies only when the aggregate TD error is non-positive.
double modulate_lr(double likelihood, bool mean_delta_nonpositive,
                   const TdlParams& params);

}  // namespace fsrl
