#include <doctest.h>

#include <cmath>

#include "fsrl/distrl.hpp"

using namespace fsrl;

TEST_CASE("sample_taus: reproducible, in range, mean near 1/2") {
  Rng a(99), b(99);
  auto t1 = sample_taus(a, 4, 8);
  auto t2 = sample_taus(b, 4, 8);
  CHECK(t1 == t2);

  Rng rng(123);
  auto big = sample_taus(rng, 100, 1000);
  CHECK(big.minCoeff() > 0.0);
  CHECK(big.maxCoeff() < 1.0);
  CHECK(big.mean() == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(big.mean() - 0.5) < 0.01);
}

TEST_CASE("wang_transform: identity at alpha 0") {
  Rng rng(5);
  auto taus = sample_taus(rng, 3, 7);
  auto out = wang_transform(taus, 0.0);
  CHECK((out - taus).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("wang_transform: known value and monotonicity") {
  CHECK(wang_transform(0.5, 0.5) == doctest::Approx(0.6915).epsilon(1e-4));
  CHECK(wang_transform(0.5, 0.5) ==
        doctest::Approx(norm_cdf(0.5)).epsilon(1e-12));
  double prev = 0.0;
  for (double tau = 0.05; tau < 1.0; tau += 0.05) {
    double w = wang_transform(tau, 0.3);
    CHECK(w > prev);
    CHECK(w > tau);  // alpha > 0 shifts mass up
    CHECK(w < 1.0);
    prev = w;
  }
  // monotone in alpha as well
  CHECK(wang_transform(0.3, 0.2) < wang_transform(0.3, 0.4));
}

TEST_CASE("norm_inv inverts norm_cdf") {
  for (double p = 0.001; p < 1.0; p += 0.013) {
    CHECK(norm_cdf(norm_inv(p)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("td_error_matrix") {
  Eigen::VectorXd pred(1), next(1);

  pred << 1.0;
  next << 0.0;
  auto d = td_error_matrix(pred, 1.0, 0.9, next, false);
  CHECK(d(0, 0) == doctest::Approx(0.0));

  pred << 5.0;
  next << 100.0;
  d = td_error_matrix(pred, 2.0, 0.9, next, true);
  CHECK(d(0, 0) == doctest::Approx(3.0));  // bootstrap dropped when done

  Eigen::VectorXd z(3);
  z << 0.5, 1.0, 1.5;
  Eigen::VectorXd target_base = z;
  // predictions equal to the target row exactly -> zero matrix
  Eigen::VectorXd zero_next = Eigen::VectorXd::Zero(3);
  auto dz = td_error_matrix(z, 0.0, 1.0, zero_next, true);
  for (int i = 0; i < 3; ++i) {
    CHECK(dz(i, i) == doctest::Approx(z[i]));
  }
  auto dd = td_error_matrix(z, 0.0, 1.0, z, false);
  for (int i = 0; i < 3; ++i) CHECK(dd(i, i) == doctest::Approx(0.0));
}

TEST_CASE("quantile_huber_loss: closed-form points") {
  Eigen::MatrixXd delta(1, 1);
  Eigen::VectorXd tau(1);
  tau << 0.5;

  delta(0, 0) = 0.0;
  CHECK(quantile_huber_loss(delta, tau, 1.0) == doctest::Approx(0.0));

  delta(0, 0) = 2.0;
  CHECK(quantile_huber_loss(delta, tau, 1.0) == doctest::Approx(0.75));

  delta(0, 0) = -2.0;
  CHECK(quantile_huber_loss(delta, tau, 1.0) == doctest::Approx(0.75));
}

TEST_CASE("quantile_huber_loss: scalar oracle over a grid") {
  Eigen::MatrixXd delta(1, 1);
  Eigen::VectorXd tau(1);
  for (double tp = 0.05; tp < 1.0; tp += 0.09) {
    for (double d = -3.0; d <= 3.0; d += 0.23) {
      tau << tp;
      delta(0, 0) = d;
      double indicator = d <= 0.0 ? 1.0 : 0.0;
      double h = std::abs(d) <= 1.0 ? 0.5 * d * d : std::abs(d) - 0.5;
      double expect = std::abs(tp - indicator) * h;
      CHECK(quantile_huber_loss(delta, tau, 1.0) ==
            doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("quantile_huber_loss: non-negative, zero iff delta zero") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    int qt = 1 + rng.uniform_int(5), qp = 1 + rng.uniform_int(5);
    Eigen::MatrixXd delta(qt, qp);
    Eigen::VectorXd tau(qp);
    for (int j = 0; j < qp; ++j) tau[j] = rng.uniform();
    bool all_zero = true;
    for (int i = 0; i < qt; ++i) {
      for (int j = 0; j < qp; ++j) {
        delta(i, j) = rng.uniform_sym(2.0);
        if (delta(i, j) != 0.0) all_zero = false;
      }
    }
    double loss = quantile_huber_loss(delta, tau, 1.0);
    CHECK(loss >= 0.0);
    if (!all_zero) CHECK(loss > 0.0);
  }
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 4);
  Eigen::VectorXd tau = Eigen::VectorXd::Constant(4, 0.3);
  CHECK(quantile_huber_loss(zero, tau, 1.0) == 0.0);
}

TEST_CASE("tdl_likelihood: identity, divergence, shift by sigma") {
  Eigen::VectorXd a(3), b(3);
  a << 1.0, 2.0, 3.0;
  CHECK(tdl_likelihood(a, a, 1e-3) == doctest::Approx(1.0));

  b << 1e6, 1e6, 1e6;
  CHECK(tdl_likelihood(a, b, 1e-3) < 1e-12);

  // pred (0,2) has population std 1; target shifted by exactly sigma
  Eigen::VectorXd pred(2), target(2);
  pred << 0.0, 2.0;
  target << 1.0, 3.0;
  CHECK(tdl_likelihood(pred, target, 1e-3) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("tdl_likelihood: translation invariance and symmetry") {
  Eigen::VectorXd a(4), b(4);
  a << -1.0, 0.5, 2.0, 3.5;
  b << -0.5, 0.0, 2.5, 4.0;
  double base = tdl_likelihood(a, b, 1e-3);
  CHECK(tdl_likelihood(a.array() + 7.0, b.array() + 7.0, 1e-3) ==
        doctest::Approx(base).epsilon(1e-12));
  // equal spread: exchanging the roles gives the same value
  Eigen::VectorXd c = a.array() + 1.0;
  CHECK(tdl_likelihood(a, c, 1e-3) ==
        doctest::Approx(tdl_likelihood(c, a, 1e-3)).epsilon(1e-12));
}

TEST_CASE("modulate_lr") {
  TdlParams params;  // beta 0.1, base 5e-4
  CHECK(modulate_lr(0.05, false, params) == doctest::Approx(5e-4));
  CHECK(modulate_lr(0.05, true, params) == doctest::Approx(0.1 * 5e-4));
  CHECK(modulate_lr(1.0, true, params) == doctest::Approx(5e-4));
  // output always within [beta*mu, mu]
  for (double ls = 0.01; ls <= 1.0; ls += 0.07) {
    for (bool neg : {false, true}) {
      double mu = modulate_lr(ls, neg, params);
      CHECK(mu >= 0.1 * 5e-4 - 1e-15);
      CHECK(mu <= 5e-4 + 1e-15);
    }
  }
}

TEST_CASE("risk_alpha schedule") {
  RiskSchedule sched;
  CHECK(risk_alpha(0, sched) == doctest::Approx(0.5));
  CHECK(risk_alpha(1000, sched) == doctest::Approx(0.0));
  CHECK(risk_alpha(1000000, sched) == doctest::Approx(0.0));
  CHECK(risk_alpha(500, sched) == doctest::Approx(0.25));
  // non-increasing
  double prev = 1.0;
  for (long n = 0; n <= 2000; n += 100) {
    double a = risk_alpha(n, sched);
    CHECK(a <= prev);
    prev = a;
  }
}
