#pragma once

// Tabular MDP data model and exact policy evaluation.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ppgkit/error.hpp"

namespace ppgkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Sorted list of action indices.
using ActionSet = std::vector<int>;

/// Finite discounted MDP (S, A, P, r, gamma, mu).
///
/// Transition and reward tensors are stored flat in [s][a][s'] order.  The
/// object is immutable after construction; construction checks shapes only,
/// use validate_mdp() for the probabilistic invariants.
class TabularMdp {
 public:
  TabularMdp() = default;
  TabularMdp(int num_states, int num_actions, std::vector<double> transition,
             std::vector<double> reward, double gamma, Vector mu);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double gamma() const { return gamma_; }
  const Vector& mu() const { return mu_; }
  double mu_tilde() const { return mu_.minCoeff(); }

  double p(int s, int a, int next) const { return transition_[index(s, a, next)]; }
  double r(int s, int a, int next) const { return reward_[index(s, a, next)]; }

  const std::vector<double>& transition() const { return transition_; }
  const std::vector<double>& reward() const { return reward_; }

  /// Row P(.|s,a) as a contiguous view.
  Eigen::Map<const Vector> transition_row(int s, int a) const {
    return {transition_.data() + index(s, a, 0), num_states_};
  }

  /// Expected one-step reward sum_{s'} P(s'|s,a) r(s,a,s').
  const Matrix& expected_reward() const { return expected_reward_; }

  /// Upper end of the value range, 1/(1-gamma).
  double value_scale() const { return 1.0 / (1.0 - gamma_); }

  /// Exact (bitwise-value) equality of every field.
  friend bool operator==(const TabularMdp& x, const TabularMdp& y);

 private:
  std::size_t index(int s, int a, int next) const {
    return (static_cast<std::size_t>(s) * num_actions_ + a) * num_states_ + next;
  }

  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> transition_;
  std::vector<double> reward_;
  double gamma_ = 0.0;
  Vector mu_;
  Matrix expected_reward_;
};

/// Row-stochastic policy table pi[s][a].
class Policy {
 public:
  Policy() = default;
  explicit Policy(Matrix probs);

  static Policy uniform(int num_states, int num_actions);
  /// Uniform over the given action set at every state.
  static Policy uniform_over(const std::vector<ActionSet>& sets, int num_actions);

  int num_states() const { return static_cast<int>(probs_.rows()); }
  int num_actions() const { return static_cast<int>(probs_.cols()); }
  const Matrix& probs() const { return probs_; }
  double operator()(int s, int a) const { return probs_(s, a); }
  Vector row(int s) const { return probs_.row(s).transpose(); }

  /// Actions with strictly positive probability at state s.
  ActionSet support(int s) const;

 private:
  Matrix probs_;
};

struct Violation {
  ErrorCode code;
  std::string field;
  std::vector<int> index;
  double value;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

ValidationReport validate_mdp(const TabularMdp& mdp);
/// Throws Error(InvalidPolicy / DimensionMismatch) on a malformed policy.
void validate_policy(const TabularMdp& mdp, const Policy& policy);

/// Exact V, Q, A and discounted visitation d^pi_mu for one policy.
struct ValueBundle {
  Vector v;
  Matrix q;
  Matrix adv;
  Vector visitation;
};

ValueBundle policy_evaluate(const TabularMdp& mdp, const Policy& policy);

/// d^pi_rho = (1-gamma) (I - gamma P_pi^T)^{-1} rho.
Vector visitation_measure(const TabularMdp& mdp, const Policy& policy, const Vector& rho);

/// Q(s,a) = sum_{s'} P(s'|s,a)(r(s,a,s') + gamma v(s')), for any vector v.
Matrix q_from_values(const TabularMdp& mdp, const Vector& v);

/// sum_s rho(s) v(s).
double value_under(const Vector& rho, const Vector& v);

/// Absolute tolerance for argmax membership: 1e-9 * max(1, 1/(1-gamma)).
double argmax_tolerance(double gamma);

/// Indices a with row(a) >= max(row) - tol.
ActionSet argmax_set(const Eigen::Ref<const Vector>& row, double tol);

struct BellmanBackup {
  Vector v;
  std::vector<ActionSet> greedy;
};

BellmanBackup bellman_backup(const TabularMdp& mdp, const Vector& v);

}  // namespace ppgkit
