#pragma once

// Convergence quantities: optimal solution and gap, b-mass, improvement
// bounds, convergence-rate bounds, optimality conditions and the step-size
// threshold beyond which the prototype update is a PI step.

#include <cstdint>
#include <map>
#include <string>

#include "ppgkit/mdp.hpp"

namespace ppgkit {

struct OptimalSolution {
  Vector v_star;
  Matrix q_star;
  Matrix a_star;
  std::vector<ActionSet> optimal_sets;
  /// Optimal advantage gap; +infinity when every action is optimal everywhere.
  double delta = 0.0;
  /// States with at least one non-optimal action.
  std::vector<int> s_tilde;
  Policy reference_policy;
  int solver_iterations = 0;

  bool delta_finite() const;
};

/// Exact solver: PI from the uniform policy until the greedy sets repeat.
OptimalSolution solve_optimal(const TabularMdp& mdp);

/// support(pi_s) is contained in A*_s at every state.
bool is_optimal_policy(const Policy& policy, const OptimalSolution& opt);

ActionSet pi_optimal_set(const Eigen::Ref<const Vector>& adv_row, double tol);

/// b_s = sum_{a not in A*_s} pi(s,a).
Vector nonoptimal_mass(const Policy& policy, const std::vector<ActionSet>& optimal_sets);

/// Closed-form f_s(eta_s) over the support B of the prototype update:
///   eta_s (sum_B A^2 - (sum_B A)^2/|B|) + sum_{a' not in B} pi_a' (1/|B|) sum_B (A_a - A_a').
double improvement_expression(const Eigen::Ref<const Vector>& policy_row,
                              const Eigen::Ref<const Vector>& adv_row, double eta_s);

/// f_s(eta_s) evaluated directly as sum_a pi+_a A_a.
double improvement_direct(const Eigen::Ref<const Vector>& policy_row,
                          const Eigen::Ref<const Vector>& adv_row, double eta_s);

/// (max A)^2 / (max A + (2 + 5|A|)/eta_s); 0 when max A <= 0.
double improvement_lower_bound(const Eigen::Ref<const Vector>& adv_row, double eta_s, int num_actions);

struct BoundReport {
  double bound_value = 0.0;
  std::map<std::string, double> inputs;
  bool satisfied = true;
  double slack = 0.0;

  /// slack = bound - observed, satisfied iff slack >= -1e-9.
  static BoundReport compare(double bound_value, double observed, std::map<std::string, double> inputs);
};

/// ||d*_rho / rho||_inf with d*_rho the visitation of the reference optimal policy.
double visitation_ratio(const TabularMdp& mdp, const OptimalSolution& opt, const Vector& rho);

/// (1/k)(1/(1-gamma)^2) ratio (1 + (2+5|A|)/(eta mu~)).
double sublinear_bound_value(int k, double gamma, double ratio, double eta, double mu_tilde,
                             int num_actions);

/// Sublinear bound for constant-step PPG checked against an observed gap.
BoundReport sublinear_bound_ppg(int k, const TabularMdp& mdp, const Vector& rho,
                                const OptimalSolution& opt, double eta, double observed_gap);

/// (1/(k+1))(1/(eta(1-gamma)) + 1/(1-gamma)^2): PQA value-error bound for a uniform start.
double pqa_sublinear_bound_value(int k, double gamma, double eta);

enum class FiniteRule { PPG, PQA, PI, VI };

struct K0Constants {
  double gamma = 0.0;
  double delta = 0.0;
  double eta = 1.0;
  double mu_tilde = 1.0;
  int num_actions = 1;
  /// ||d*_mu / mu||_inf (PPG only).
  double visitation_ratio = 1.0;
  /// ||V* - V^0||_inf (VI only).
  double initial_gap_inf = 0.0;
};

/// Finite-iteration bound k0 for the given rule.  Returns 0 when delta is
/// infinite (every policy is optimal) and never a negative value.
std::int64_t finite_k0(FiniteRule rule, const K0Constants& c);

/// Unrounded value of the k0 formula (before the ceiling).
double finite_k0_raw(FiniteRule rule, const K0Constants& c);

struct OptimalityCheck {
  /// b_s + ||eps_s||_inf <= eta_s Delta / 2.
  std::vector<bool> mass_condition;
  /// ||V* - V^pi||_inf <= (Delta/2) eta_s Delta / (1 + eta_s Delta).
  std::vector<bool> value_condition;
  /// b_s + 2||eps_s|| + min{sqrt(eta_s (V*(mu)-V^pi(mu)) / ((1-gamma) mu~)), 1} < eta_s Delta.
  std::vector<bool> cone_condition;
  Vector b;
  Vector eps_inf;

  bool all_mass() const;
  bool all_value() const;
  bool all_cone() const;
};

OptimalityCheck optimality_condition(const TabularMdp& mdp, const Policy& policy,
                                     const ValueBundle& bundle, const OptimalSolution& opt,
                                     const Vector& eta_s);

struct PiThreshold {
  /// min over states with non-pi-optimal actions of the advantage gap; +inf if none.
  double delta_pi = 0.0;
  /// (2/Delta^pi) max_s pi_s(A \ A^pi_s); 0 when every action is pi-optimal.
  double f_pi = 0.0;
  bool all_actions_pi_optimal = false;
};

PiThreshold pi_equivalence_threshold(const Policy& policy, const ValueBundle& bundle, double tol);

/// gamma^k (initial_gap_inf + c0/(1-gamma)).
double linear_rate_bound(int k, double gamma, double c0, double initial_gap_inf);

/// L = 2 gamma |A| / (1-gamma)^3.
double smoothness_coefficient(double gamma, int num_actions);

}  // namespace ppgkit
