#pragma once

// Prototype update and its instantiations: PPG, PQA, PI, VI and homotopic PQA.

#include <string>
#include <string_view>

#include "ppgkit/mdp.hpp"

namespace ppgkit {

/// Step-size rule eta_k.
struct StepSchedule {
  enum class Kind { Constant, GeometricIncreasing, AdaptivePiThreshold };

  Kind kind = Kind::Constant;
  /// eta for Constant, c0 for GeometricIncreasing, margin for AdaptivePiThreshold.
  double value = 1.0;
  double cap = 1e12;

  static StepSchedule constant(double eta, double cap = 1e12) { return {Kind::Constant, eta, cap}; }
  static StepSchedule geometric(double c0, double cap = 1e12) {
    return {Kind::GeometricIncreasing, c0, cap};
  }
  static StepSchedule adaptive(double margin, double cap = 1e12) {
    return {Kind::AdaptivePiThreshold, margin, cap};
  }

  /// Throws Error(BadSchedule) unless eta > 0, c0 > 0, margin > 1 and cap > 0.
  void validate() const;
};

struct UpdateRule {
  enum class Kind { PPG, PQA, PI, VI, HomotopicPQA };

  Kind kind = Kind::PPG;
  /// 1 + eta*tau for HomotopicPQA; must exceed 1.
  double coupling = 0.0;
  /// Regularisation anchor pi^0 for HomotopicPQA; empty means uniform.
  Policy anchor;

  static UpdateRule ppg() { return {Kind::PPG, 0.0, {}}; }
  static UpdateRule pqa() { return {Kind::PQA, 0.0, {}}; }
  static UpdateRule pi() { return {Kind::PI, 0.0, {}}; }
  static UpdateRule vi() { return {Kind::VI, 0.0, {}}; }
  static UpdateRule homotopic_pqa(double coupling, Policy anchor = {}) {
    return {Kind::HomotopicPQA, coupling, std::move(anchor)};
  }
};

std::string_view to_string(UpdateRule::Kind kind);
std::string_view to_string(StepSchedule::Kind kind);

/// Output of one per-state projection step.
struct RowUpdate {
  Vector row;
  /// Additive offset: row = (input + offset)_+ (PPG/PQA convention).
  double offset = 0.0;
  ActionSet support;
};

/// pi+_s = Proj(pi_s + eta_s A_s).  Using Q instead of A gives the same row.
RowUpdate prototype_update(const Eigen::Ref<const Vector>& policy_row,
                           const Eigen::Ref<const Vector>& adv_row, double eta_s);

/// Whole-policy result of a projected step.
struct PolicyStep {
  Policy policy;
  /// Effective per-state step eta_s that was applied.
  Vector eta_s;
  std::vector<ActionSet> supports;
};

/// Prototype update at every state with the given per-state steps.
PolicyStep prototype_step(const Policy& policy, const Matrix& adv, const Vector& eta_s);

/// PPG: eta_s = eta * d_mu(s) / (1 - gamma).
PolicyStep ppg_step(const TabularMdp& mdp, const Policy& policy, double eta);
PolicyStep ppg_step(const TabularMdp& mdp, const Policy& policy, const ValueBundle& bundle, double eta);

/// PQA: eta_s = eta.
PolicyStep pqa_step(const TabularMdp& mdp, const Policy& policy, double eta);
PolicyStep pqa_step(const TabularMdp& mdp, const Policy& policy, const ValueBundle& bundle, double eta);

/// PI: uniform over the (tolerance) argmax set of A^pi at every state.
Policy pi_step(const TabularMdp& mdp, const Policy& policy);
Policy pi_step(const TabularMdp& mdp, const ValueBundle& bundle);

struct ViStep {
  Vector v;
  /// Greedy policy w.r.t. Q^v of the *input* vector.
  Policy greedy;
};

ViStep vi_step(const TabularMdp& mdp, const Vector& v);

/// Homotopic PQA row update in the subtractive convention
///   row = (p - lambda)_+ / coupling,  sum_a (p_a - lambda)_+ = coupling,
/// with p = pi_s + eta A_s + (coupling - 1)(anchor_s - mean(anchor_s)).
struct HomotopicRowUpdate {
  Vector row;
  double lambda = 0.0;
  ActionSet support;
};

HomotopicRowUpdate homotopic_row_update(const Eigen::Ref<const Vector>& policy_row,
                                        const Eigen::Ref<const Vector>& adv_row,
                                        const Eigen::Ref<const Vector>& anchor_row, double eta,
                                        double coupling);

PolicyStep homotopic_pqa_step(const TabularMdp& mdp, const Policy& policy, const Policy& anchor,
                              double eta, double coupling);
PolicyStep homotopic_pqa_step(const TabularMdp& mdp, const Policy& policy, const ValueBundle& bundle,
                              const Policy& anchor, double eta, double coupling);

/// eta_k for iteration k.  Geometric returns (1/mu~)(1/c0)(2/gamma^{2k+1});
/// Adaptive returns margin * F^pi / mu~ (1 when F^pi = 0).  Clamped to cap.
double schedule_eta(const StepSchedule& schedule, int k, const TabularMdp& mdp, const Policy& policy);
double schedule_eta(const StepSchedule& schedule, int k, const TabularMdp& mdp, const Policy& policy,
                    const ValueBundle& bundle);

}  // namespace ppgkit
