#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kboot/bandit.hpp"
#include "kboot/eligibility.hpp"
#include "kboot/error.hpp"
#include "kboot/random.hpp"

namespace kboot {

// Disjoint ridge model of one arm. A^{-1} is carried alongside A and updated by Sherman-Morrison.
struct LinUCBArmState {
  Eigen::MatrixXd design;   // A = I + sum x x^T
  Eigen::MatrixXd inverse;  // A^{-1}
  Eigen::VectorXd response; // b = sum r x

  explicit LinUCBArmState(std::size_t dim)
      : design(Eigen::MatrixXd::Identity(dim, dim)),
        inverse(Eigen::MatrixXd::Identity(dim, dim)),
        response(Eigen::VectorXd::Zero(dim)) {}

  std::size_t dim() const { return static_cast<std::size_t>(response.size()); }
  Eigen::VectorXd theta() const { return inverse * response; }
};

inline Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

inline double linucb_score(const LinUCBArmState& s, std::span<const double> x, double alpha_ucb) {
  if (x.size() != s.dim()) throw DomainError("linucb: context dimension mismatch");
  const auto v = as_vector(x);
  const Eigen::VectorXd Ainv_x = s.inverse * v;
  const double var = std::max(0.0, v.dot(Ainv_x));
  return s.theta().dot(v) + alpha_ucb * std::sqrt(var);
}

inline void linucb_update(LinUCBArmState& s, std::span<const double> x, double reward) {
  if (x.size() != s.dim()) throw DomainError("linucb: context dimension mismatch");
  const auto v = as_vector(x);
  s.design.noalias() += v * v.transpose();
  s.response += reward * v;
  const Eigen::VectorXd u = s.inverse * v;
  const double denom = 1.0 + v.dot(u);
  if (!(denom > 0.0)) throw DomainError("linucb: design matrix lost positive definiteness");
  s.inverse.noalias() -= (u * u.transpose()) / denom;
}

class LinUCB {
 public:
  LinUCB(std::size_t arms, std::size_t dim, double alpha_ucb = 10.0)
      : alpha_ucb_(alpha_ucb), states_(arms, LinUCBArmState(dim)) {
    if (!(alpha_ucb >= 0.0)) throw DomainError("LinUCB: exploration weight must be nonnegative");
  }

  std::size_t arm_count() const { return states_.size(); }
  double alpha_ucb() const { return alpha_ucb_; }
  const LinUCBArmState& state(std::size_t arm) const { return states_.at(arm); }

  double ucb(std::size_t arm, std::span<const double> x) const {
    return linucb_score(states_.at(arm), x, alpha_ucb_);
  }

  template <class URBG>
  double estimate(std::size_t arm, std::span<const double> x, URBG&) const {
    return ucb(arm, x);
  }

  void update(std::size_t arm, std::span<const double> x, double reward) {
    linucb_update(states_.at(arm), x, reward);
  }

 private:
  double alpha_ucb_;
  std::vector<LinUCBArmState> states_;
};

template <class URBG>
std::size_t linucb_select(const LinUCB& model, std::span<const double> x, URBG& rng) {
  return choose_arm(model, [&](std::size_t) { return x; }, {}, rng);
}

// Pull the arm with the highest eligibility score.
template <class URBG>
std::size_t top1_policy(const EligibilityInput& scores, URBG& rng) {
  if (scores.scores.empty()) throw DomainError("top1_policy: no scores");
  return argmax_random_tie(std::span<const double>(scores.scores), rng);
}

template <class URBG>
std::size_t uniform_policy(std::size_t M, URBG& rng) {
  if (M < 1) throw DomainError("uniform_policy: no arms");
  return uniform_index(rng, M);
}

}  // namespace kboot
