#include "ppgkit/run.hpp"

#include <cmath>

namespace ppgkit {

std::string_view to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::ReachedOptimal: return "ReachedOptimal";
    case TerminationReason::MaxIterations: return "MaxIterations";
    case TerminationReason::NumericalFloor: return "NumericalFloor";
  }
  return "Unknown";
}

std::optional<int> RunTrace::first_optimal() const {
  for (const auto& r : records) {
    if (r.is_optimal) return r.k;
  }
  return std::nullopt;
}

namespace {

constexpr double kFloor = 1e-14;

}  // namespace

RunTrace run(const TabularMdp& mdp, const UpdateRule& rule, const StepSchedule& schedule, int max_iters,
             bool stop_on_optimal, const OptimalSolution& opt, const RunOptions& options) {
  if (max_iters < 0) throw Error(ErrorCode::BadSpec, "max_iters must be non-negative");
  schedule.validate();
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  const Vector rho = options.rho.value_or(mdp.mu());
  if (rho.size() != ns) throw Error(ErrorCode::DimensionMismatch, "rho must have |S| entries");
  const double v_star_mu = value_under(mdp.mu(), opt.v_star);
  const double v_star_rho = value_under(rho, opt.v_star);
  const bool is_vi = rule.kind == UpdateRule::Kind::VI;

  Vector v_iterate = Vector::Zero(ns);
  Policy policy;
  if (is_vi) {
    policy = vi_step(mdp, v_iterate).greedy;
  } else {
    policy = options.initial_policy.value_or(Policy::uniform(ns, na));
  }

  RunTrace trace;
  for (int k = 0;; ++k) {
    const ValueBundle bundle = policy_evaluate(mdp, policy);

    IterationRecord rec;
    rec.k = k;
    rec.value_mu = value_under(mdp.mu(), bundle.v);
    rec.gap_mu = v_star_mu - rec.value_mu;
    rec.gap_rho = v_star_rho - value_under(rho, bundle.v);
    rec.gap_inf = (opt.v_star - (is_vi ? v_iterate : bundle.v)).cwiseAbs().maxCoeff();
    rec.max_adv = bundle.adv.rowwise().maxCoeff();
    rec.b_max = nonoptimal_mass(policy, opt.optimal_sets).maxCoeff();
    rec.is_optimal = is_optimal_policy(policy, opt);

    Policy next;
    Vector next_v;
    switch (rule.kind) {
      case UpdateRule::Kind::PPG:
      case UpdateRule::Kind::PQA:
      case UpdateRule::Kind::HomotopicPQA: {
        rec.eta = schedule_eta(schedule, k, mdp, policy, bundle);
        PolicyStep step = rule.kind == UpdateRule::Kind::PPG   ? ppg_step(mdp, policy, bundle, rec.eta)
                          : rule.kind == UpdateRule::Kind::PQA ? pqa_step(mdp, policy, bundle, rec.eta)
                                                               : homotopic_pqa_step(mdp, policy, bundle, rule.anchor,
                                                                                    rec.eta, rule.coupling);
        rec.eta_s = step.eta_s;
        for (const auto& s : step.supports) rec.support_sizes.push_back(static_cast<int>(s.size()));
        next = std::move(step.policy);
        break;
      }
      case UpdateRule::Kind::PI:
      case UpdateRule::Kind::VI: {
        // The eta -> infinity limit of the prototype update; reported at the cap.
        rec.eta = schedule.cap;
        rec.eta_s = Vector::Constant(ns, schedule.cap);
        if (is_vi) {
          next_v = bellman_backup(mdp, v_iterate).v;
          next = vi_step(mdp, next_v).greedy;
        } else {
          next = pi_step(mdp, bundle);
        }
        for (int s = 0; s < ns; ++s) rec.support_sizes.push_back(static_cast<int>(next.support(s).size()));
        break;
      }
    }

    rec.f_s.resize(ns);
    rec.f_lower_bound.resize(ns);
    for (int s = 0; s < ns; ++s) {
      rec.f_s(s) = next.probs().row(s).dot(bundle.adv.row(s));
      rec.f_lower_bound(s) = improvement_lower_bound(bundle.adv.row(s).transpose(), rec.eta_s(s), na);
    }
    const bool optimal = rec.is_optimal;
    trace.records.push_back(std::move(rec));

    if (stop_on_optimal && optimal) {
      trace.terminated_reason = TerminationReason::ReachedOptimal;
      break;
    }
    if (k >= max_iters) {
      trace.terminated_reason = TerminationReason::MaxIterations;
      break;
    }
    const double policy_change = (next.probs() - policy.probs()).cwiseAbs().maxCoeff();
    const double value_change = is_vi ? (next_v - v_iterate).cwiseAbs().maxCoeff() : 0.0;
    if (!optimal && policy_change < kFloor && value_change < kFloor) {
      trace.terminated_reason = TerminationReason::NumericalFloor;
      break;
    }
    policy = std::move(next);
    if (is_vi) v_iterate = std::move(next_v);
  }
  trace.terminal_policy = policy;
  return trace;
}

RunTrace run(const TabularMdp& mdp, const UpdateRule& rule, const StepSchedule& schedule, int max_iters,
             bool stop_on_optimal) {
  return run(mdp, rule, schedule, max_iters, stop_on_optimal, solve_optimal(mdp));
}

}  // namespace ppgkit
