#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "kboot/baselines.hpp"
#include "kboot/eligibility.hpp"

using namespace kboot;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t d) {
  std::normal_distribution<double> normal;
  std::vector<double> v(d);
  for (auto& x : v) x = normal(rng);
  return v;
}

}  // namespace

TEST(LinUCB, FreshStatesAreSymmetric) {
  LinUCB model(3, 4, 2.0);
  const std::vector<double> x{1, 2, 0, -2};
  for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(model.ucb(m, x), 2.0 * 3.0, 1e-12);
  Rng rng = make_rng(1);
  std::map<std::size_t, int> count;
  for (int i = 0; i < 30000; ++i) ++count[linucb_select(model, x, rng)];
  for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(count[m], 10000, 3 * std::sqrt(30000 * (1 / 3.0) * (2 / 3.0)));
}

TEST(LinUCB, SingleUpdateByHand) {
  const double alpha = 10.0;
  LinUCB model(2, 3, alpha);
  const std::vector<double> e1{1, 0, 0};
  model.update(0, e1, 1.0);
  EXPECT_NEAR(model.ucb(0, e1), 0.5 + alpha * std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(model.ucb(1, e1), alpha, 1e-12);
}

TEST(LinUCB, ZeroContextIsNoOp) {
  LinUCBArmState s(3);
  linucb_update(s, std::vector<double>{0, 0, 0}, 5.0);
  EXPECT_TRUE(s.design.isApprox(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_EQ(s.response.norm(), 0.0);
}

TEST(LinUCB, RepeatedUpdateLinear) {
  LinUCBArmState s(3);
  const std::vector<double> x{1, -2, 0.5};
  linucb_update(s, x, 0.3);
  linucb_update(s, x, 0.3);
  const auto v = as_vector(x);
  EXPECT_TRUE(s.design.isApprox(Eigen::MatrixXd::Identity(3, 3) + 2 * v * v.transpose(), 1e-14));
}

TEST(LinUCB, MatchesDenseSolve) {
  Rng rng = make_rng(2);
  const std::size_t d = 5;
  for (int trial = 0; trial < 50; ++trial) {
    LinUCBArmState s(d);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    for (int t = 0; t < 30; ++t) {
      const auto x = random_vector(rng, d);
      const double r = uniform01(rng);
      linucb_update(s, x, r);
      const auto v = as_vector(x);
      A += v * v.transpose();
      b += r * v;
    }
    const auto q = random_vector(rng, d);
    const auto qv = as_vector(q);
    const Eigen::LDLT<Eigen::MatrixXd> solver(A);
    const Eigen::VectorXd theta = solver.solve(b);
    const double expected = theta.dot(qv) + 1.5 * std::sqrt(qv.dot(solver.solve(Eigen::VectorXd(qv))));
    EXPECT_NEAR(linucb_score(s, q, 1.5), expected, 1e-10);
  }
}

TEST(LinUCB, ThetaMatchesBatchRidge) {
  Rng rng = make_rng(3);
  const std::size_t d = 6, n = 200;
  LinUCBArmState s(d);
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = random_vector(rng, d);
    const double r = std::sin(x[0]) + 0.1 * x[1];
    linucb_update(s, x, r);
    X.row(i) = as_vector(x).transpose();
    y[i] = r;
  }
  const Eigen::MatrixXd gram = X.transpose() * X + Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd ridge = gram.ldlt().solve(X.transpose() * y);
  EXPECT_LT((s.theta() - ridge).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(LinUCB, EigenvaluesAtLeastOne) {
  Rng rng = make_rng(4);
  LinUCBArmState s(4);
  for (int t = 0; t < 100; ++t) {
    linucb_update(s, random_vector(rng, 4), 1.0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.design);
    EXPECT_GE(es.eigenvalues().minCoeff(), 1.0 - 1e-9);
  }
}

TEST(LinUCB, RelabelingPermutesChoice) {
  Rng data = make_rng(5);
  const std::size_t M = 4, d = 3;
  LinUCB a(M, d, 1.0), b(M, d, 1.0);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  for (int t = 0; t < 80; ++t) {
    const auto x = random_vector(data, d);
    const std::size_t arm = t % M;
    const double r = x[0] * (arm + 1);
    a.update(arm, x, r);
    b.update(perm[arm], x, r);
  }
  Rng r1 = make_rng(6), r2 = make_rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto q = random_vector(data, d);
    EXPECT_EQ(perm[linucb_select(a, q, r1)], linucb_select(b, q, r2));
  }
}

TEST(Top1, Examples) {
  Rng rng = make_rng(7);
  EXPECT_EQ(top1_policy({{0.2, 0.8}}, rng), 1u);
  std::map<std::size_t, int> count;
  const int n = 20000;
  for (int i = 0; i < n; ++i) ++count[top1_policy({{0.6, 0.1, 0.6, 0.6}}, rng)];
  EXPECT_EQ(count.count(1), 0u);
  for (std::size_t m : {0u, 2u, 3u}) EXPECT_NEAR(count[m], n / 3.0, 3 * std::sqrt(n * (2.0 / 9)));
  // composed with the k = 1 filter: the pick is always in the tie set
  const EligibilityInput in{{0.6, 0.1, 0.6, 0.6}};
  const auto mask = ec_filter(in, 1);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(mask[top1_policy(in, rng)]);
}

TEST(Uniform, Examples) {
  Rng rng = make_rng(8);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(uniform_policy(1, rng), 0u);
  std::vector<int> count(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++count[uniform_policy(4, rng)];
  for (int c : count) EXPECT_NEAR(c, n / 4.0, 3 * std::sqrt(n * 0.25 * 0.75));
  Rng a = make_rng(9), b = make_rng(9);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(uniform_policy(7, a), uniform_policy(7, b));
  EXPECT_THROW(uniform_policy(0, rng), DomainError);
}
