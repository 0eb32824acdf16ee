#pragma once

// Optimization run loop with per-iteration diagnostics.

#include <optional>

#include "ppgkit/diagnostics.hpp"
#include "ppgkit/policy_opt.hpp"

namespace ppgkit {

/// Quantities tracked for the policy pi^k and the update applied to it.
struct IterationRecord {
  int k = 0;
  double eta = 0.0;
  Vector eta_s;
  double value_mu = 0.0;
  double gap_mu = 0.0;
  /// V*(rho) - V^k(rho) for the run's rho (equals gap_mu when rho = mu).
  double gap_rho = 0.0;
  /// ||V* - V^k||_inf; for VI this is the error of the iterate v^k.
  double gap_inf = 0.0;
  Vector max_adv;
  std::vector<int> support_sizes;
  double b_max = 0.0;
  /// f_s = sum_a pi^{k+1}_{s,a} A^k_{s,a}.
  Vector f_s;
  /// Improvement lower bound at eta_s, per state.
  Vector f_lower_bound;
  bool is_optimal = false;
};

enum class TerminationReason { ReachedOptimal, MaxIterations, NumericalFloor };

std::string_view to_string(TerminationReason reason);

struct RunTrace {
  std::vector<IterationRecord> records;
  Policy terminal_policy;
  TerminationReason terminated_reason = TerminationReason::MaxIterations;

  /// First k whose policy is exactly optimal, if any.
  std::optional<int> first_optimal() const;
};

struct RunOptions {
  /// Starting policy; uniform when empty.  Ignored by VI, which starts at v = 0.
  std::optional<Policy> initial_policy;
  /// Distribution used for gap_rho; mu when empty.
  std::optional<Vector> rho;
};

/// Iterates the rule, recording one IterationRecord per policy pi^0..pi^K with
/// K <= max_iters.  Stops early on exact optimality when requested, or with
/// NumericalFloor when successive iterates differ by < 1e-14 without optimality.
RunTrace run(const TabularMdp& mdp, const UpdateRule& rule, const StepSchedule& schedule, int max_iters,
             bool stop_on_optimal, const OptimalSolution& opt, const RunOptions& options = {});

RunTrace run(const TabularMdp& mdp, const UpdateRule& rule, const StepSchedule& schedule, int max_iters,
             bool stop_on_optimal);

}  // namespace ppgkit
