#include "ppgkit/policy_opt.hpp"

#include <cmath>

#include "ppgkit/diagnostics.hpp"
#include "ppgkit/simplex.hpp"

namespace ppgkit {

std::string_view to_string(UpdateRule::Kind kind) {
  switch (kind) {
    case UpdateRule::Kind::PPG: return "ppg";
    case UpdateRule::Kind::PQA: return "pqa";
    case UpdateRule::Kind::PI: return "pi";
    case UpdateRule::Kind::VI: return "vi";
    case UpdateRule::Kind::HomotopicPQA: return "hpqa";
  }
  return "unknown";
}

std::string_view to_string(StepSchedule::Kind kind) {
  switch (kind) {
    case StepSchedule::Kind::Constant: return "constant";
    case StepSchedule::Kind::GeometricIncreasing: return "geometric";
    case StepSchedule::Kind::AdaptivePiThreshold: return "adaptive";
  }
  return "unknown";
}

void StepSchedule::validate() const {
  if (!(cap > 0.0)) throw Error(ErrorCode::BadSchedule, "cap must be positive");
  switch (kind) {
    case Kind::Constant:
      if (!(value > 0.0) || !std::isfinite(value)) throw Error(ErrorCode::BadSchedule, "eta must be positive");
      break;
    case Kind::GeometricIncreasing:
      if (!(value > 0.0) || !std::isfinite(value)) throw Error(ErrorCode::BadSchedule, "c0 must be positive");
      break;
    case Kind::AdaptivePiThreshold:
      if (!(value > 1.0) || !std::isfinite(value)) throw Error(ErrorCode::BadSchedule, "margin must exceed 1");
      break;
  }
}

RowUpdate prototype_update(const Eigen::Ref<const Vector>& policy_row,
                           const Eigen::Ref<const Vector>& adv_row, double eta_s) {
  if (policy_row.size() != adv_row.size()) {
    throw Error(ErrorCode::DimensionMismatch, "policy row and advantage row differ in length");
  }
  if (!adv_row.allFinite()) throw Error(ErrorCode::NonFiniteAdvantage, "advantage row is not finite");
  if (!(eta_s > 0.0) || !std::isfinite(eta_s)) {
    throw Error(ErrorCode::BadSchedule, "per-state step must be positive and finite");
  }
  ProjectionResult proj = project_simplex(policy_row + eta_s * adv_row);
  return {std::move(proj.point), proj.offset, std::move(proj.support)};
}

PolicyStep prototype_step(const Policy& policy, const Matrix& adv, const Vector& eta_s) {
  const int ns = policy.num_states();
  if (adv.rows() != ns || adv.cols() != policy.num_actions() || eta_s.size() != ns) {
    throw Error(ErrorCode::DimensionMismatch, "prototype_step inputs disagree in shape");
  }
  PolicyStep out;
  Matrix next(ns, policy.num_actions());
  out.supports.reserve(ns);
  for (int s = 0; s < ns; ++s) {
    RowUpdate row = prototype_update(policy.probs().row(s).transpose(), adv.row(s).transpose(), eta_s(s));
    next.row(s) = row.row.transpose();
    out.supports.push_back(std::move(row.support));
  }
  out.policy = Policy(std::move(next));
  out.eta_s = eta_s;
  return out;
}

PolicyStep ppg_step(const TabularMdp& mdp, const Policy& policy, const ValueBundle& bundle, double eta) {
  const Vector eta_s = eta * bundle.visitation / (1.0 - mdp.gamma());
  return prototype_step(policy, bundle.adv, eta_s);
}

PolicyStep ppg_step(const TabularMdp& mdp, const Policy& policy, double eta) {
  return ppg_step(mdp, policy, policy_evaluate(mdp, policy), eta);
}

PolicyStep pqa_step(const TabularMdp& mdp, const Policy& policy, const ValueBundle& bundle, double eta) {
  return prototype_step(policy, bundle.adv, Vector::Constant(mdp.num_states(), eta));
}

PolicyStep pqa_step(const TabularMdp& mdp, const Policy& policy, double eta) {
  return pqa_step(mdp, policy, policy_evaluate(mdp, policy), eta);
}

Policy pi_step(const TabularMdp& mdp, const ValueBundle& bundle) {
  const double tol = argmax_tolerance(mdp.gamma());
  std::vector<ActionSet> sets;
  sets.reserve(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) sets.push_back(argmax_set(bundle.adv.row(s).transpose(), tol));
  return Policy::uniform_over(sets, mdp.num_actions());
}

Policy pi_step(const TabularMdp& mdp, const Policy& policy) {
  return pi_step(mdp, policy_evaluate(mdp, policy));
}

ViStep vi_step(const TabularMdp& mdp, const Vector& v) {
  BellmanBackup backup = bellman_backup(mdp, v);
  return {std::move(backup.v), Policy::uniform_over(backup.greedy, mdp.num_actions())};
}

HomotopicRowUpdate homotopic_row_update(const Eigen::Ref<const Vector>& policy_row,
                                        const Eigen::Ref<const Vector>& adv_row,
                                        const Eigen::Ref<const Vector>& anchor_row, double eta,
                                        double coupling) {
  if (!(coupling > 1.0) || !std::isfinite(coupling)) {
    throw Error(ErrorCode::BadSchedule, "homotopic coupling must exceed 1");
  }
  if (!(eta > 0.0)) throw Error(ErrorCode::BadSchedule, "eta must be positive");
  if (policy_row.size() != adv_row.size() || anchor_row.size() != adv_row.size()) {
    throw Error(ErrorCode::DimensionMismatch, "homotopic row inputs differ in length");
  }
  if (!adv_row.allFinite()) throw Error(ErrorCode::NonFiniteAdvantage, "advantage row is not finite");

  // A uniform anchor contributes a constant shift and drops out.
  const Vector centred = anchor_row.array() - anchor_row.mean();
  const Vector p = policy_row + eta * adv_row + (coupling - 1.0) * centred;
  ProjectionResult proj = project_scaled_simplex(p, coupling);
  return {proj.point / coupling, -proj.offset, std::move(proj.support)};
}

PolicyStep homotopic_pqa_step(const TabularMdp& mdp, const Policy& policy, const ValueBundle& bundle,
                              const Policy& anchor, double eta, double coupling) {
  const Policy& anchor_policy =
      anchor.num_states() == 0 ? Policy::uniform(mdp.num_states(), mdp.num_actions()) : anchor;
  validate_policy(mdp, anchor_policy);
  const int ns = mdp.num_states();
  Matrix next(ns, mdp.num_actions());
  PolicyStep out;
  out.supports.reserve(ns);
  for (int s = 0; s < ns; ++s) {
    HomotopicRowUpdate row = homotopic_row_update(policy.probs().row(s).transpose(),
                                                  bundle.adv.row(s).transpose(),
                                                  anchor_policy.probs().row(s).transpose(), eta, coupling);
    next.row(s) = row.row.transpose();
    out.supports.push_back(std::move(row.support));
  }
  out.policy = Policy(std::move(next));
  out.eta_s = Vector::Constant(ns, eta);
  return out;
}

PolicyStep homotopic_pqa_step(const TabularMdp& mdp, const Policy& policy, const Policy& anchor,
                              double eta, double coupling) {
  return homotopic_pqa_step(mdp, policy, policy_evaluate(mdp, policy), anchor, eta, coupling);
}

double schedule_eta(const StepSchedule& schedule, int k, const TabularMdp& mdp, const Policy& policy,
                    const ValueBundle& bundle) {
  schedule.validate();
  if (k < 0) throw Error(ErrorCode::BadSchedule, "iteration index must be non-negative");
  double eta = 0.0;
  switch (schedule.kind) {
    case StepSchedule::Kind::Constant:
      eta = schedule.value;
      break;
    case StepSchedule::Kind::GeometricIncreasing: {
      // Evaluated in log space: gamma^{-(2k+1)} overflows long before the cap matters.
      const double gamma = mdp.gamma();
      if (gamma == 0.0) {
        eta = schedule.cap;
      } else {
        const double log_eta = std::log(2.0 / (mdp.mu_tilde() * schedule.value)) -
                               (2.0 * k + 1.0) * std::log(gamma);
        eta = log_eta >= std::log(schedule.cap) ? schedule.cap : std::exp(log_eta);
      }
      break;
    }
    case StepSchedule::Kind::AdaptivePiThreshold: {
      const PiThreshold threshold = pi_equivalence_threshold(policy, bundle, argmax_tolerance(mdp.gamma()));
      eta = threshold.f_pi > 0.0 ? schedule.value * threshold.f_pi / mdp.mu_tilde() : 1.0;
      break;
    }
  }
  return std::min(eta, schedule.cap);
}

double schedule_eta(const StepSchedule& schedule, int k, const TabularMdp& mdp, const Policy& policy) {
  if (schedule.kind == StepSchedule::Kind::AdaptivePiThreshold) {
    return schedule_eta(schedule, k, mdp, policy, policy_evaluate(mdp, policy));
  }
  return schedule_eta(schedule, k, mdp, policy, ValueBundle{});
}

}  // namespace ppgkit
