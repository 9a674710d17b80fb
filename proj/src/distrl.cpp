#include "fsrl/distrl.hpp"

#include <algorithm>
#include <cmath>

namespace fsrl {

double risk_alpha(long step, const RiskSchedule& schedule) {
  return std::max(schedule.floor, schedule.alpha0 - schedule.decay * step);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

namespace {

// Acklam's rational approximation for the inverse normal CDF.
double norm_inv_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_inv(double p) {
  p = std::clamp(p, 1e-300, 1.0 - 1e-16);
  double x = norm_inv_approx(p);
  // one Halley refinement
  double e = norm_cdf(x) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

Eigen::MatrixXd sample_taus(Rng& rng, int batch, int quantile_dim,
                            double eps) {
  Eigen::MatrixXd taus(batch, quantile_dim);
  for (int b = 0; b < batch; ++b) {
    for (int q = 0; q < quantile_dim; ++q) {
      taus(b, q) = std::clamp(rng.uniform(), eps, 1.0 - eps);
    }
  }
  return taus;
}

double wang_transform(double tau, double alpha) {
  if (alpha == 0.0) return tau;
  return norm_cdf(norm_inv(tau) + alpha);
}

Eigen::MatrixXd wang_transform(const Eigen::MatrixXd& taus, double alpha) {
  if (alpha == 0.0) return taus;
  return taus.unaryExpr(
      [alpha](double t) { return wang_transform(t, alpha); });
}

Eigen::MatrixXd td_error_matrix(const Eigen::VectorXd& pred_samples,
                                double reward, double gamma,
                                const Eigen::VectorXd& next_samples,
                                bool done) {
  const Eigen::Index qd = next_samples.size();
  const Eigen::Index qd_pred = pred_samples.size();
  Eigen::MatrixXd delta(qd, qd_pred);
  for (Eigen::Index i = 0; i < qd; ++i) {
    double target = reward + (done ? 0.0 : gamma * next_samples[i]);
    for (Eigen::Index j = 0; j < qd_pred; ++j) {
      delta(i, j) = pred_samples[j] - target;
    }
  }
  return delta;
}

double huber(double delta, double k) {
  double ad = std::abs(delta);
  return ad <= k ? 0.5 * delta * delta : k * (ad - 0.5 * k);
}

double quantile_huber_loss(const Eigen::MatrixXd& delta,
                           const Eigen::VectorXd& taus_prime, double huber_k) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < delta.rows(); ++i) {
    for (Eigen::Index j = 0; j < delta.cols(); ++j) {
      double d = delta(i, j);
      double w = std::abs(taus_prime[j] - (d <= 0.0 ? 1.0 : 0.0));
      total += w * huber(d, huber_k) / huber_k;
    }
  }
  return total / static_cast<double>(delta.rows());
}

double tdl_likelihood(const Eigen::VectorXd& pred_samples,
                      const Eigen::VectorXd& target_samples,
                      double sigma_min) {
  double mean = pred_samples.mean();
  double var = (pred_samples.array() - mean).square().mean();
  double sigma = std::max(std::sqrt(var), sigma_min);
  double total = 0.0;
  for (Eigen::Index j = 0; j < target_samples.size(); ++j) {
    double nearest = (pred_samples.array() - target_samples[j]).abs().minCoeff();
    total += nearest;
  }
  total /= static_cast<double>(target_samples.size());
  return std::exp(-total / sigma);
}

double modulate_lr(double likelihood, bool mean_delta_nonpositive,
                   const TdlParams& params) {
  if (!mean_delta_nonpositive) return params.base_lr;
  return std::max(params.beta, likelihood) * params.base_lr;
}

}  // namespace fsrl
