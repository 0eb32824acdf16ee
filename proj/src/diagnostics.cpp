#include "ppgkit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppgkit/policy_opt.hpp"
#include "ppgkit/simplex.hpp"

namespace ppgkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxSolverIterations = 100000;

bool contains(const ActionSet& set, int a) { return std::binary_search(set.begin(), set.end(), a); }

}  // namespace

bool OptimalSolution::delta_finite() const { return std::isfinite(delta); }

OptimalSolution solve_optimal(const TabularMdp& mdp) {
  const double tol = argmax_tolerance(mdp.gamma());
  Policy policy = Policy::uniform(mdp.num_states(), mdp.num_actions());
  std::vector<ActionSet> previous;
  ValueBundle bundle;
  int iterations = 0;
  for (; iterations < kMaxSolverIterations; ++iterations) {
    bundle = policy_evaluate(mdp, policy);
    std::vector<ActionSet> greedy;
    greedy.reserve(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) greedy.push_back(argmax_set(bundle.adv.row(s).transpose(), tol));
    if (greedy == previous) break;
    policy = Policy::uniform_over(greedy, mdp.num_actions());
    previous = std::move(greedy);
  }

  OptimalSolution opt;
  opt.solver_iterations = iterations;
  opt.v_star = bundle.v;
  opt.q_star = bundle.q;
  opt.a_star = bundle.adv;
  opt.reference_policy = policy;

  const BellmanBackup backup = bellman_backup(mdp, opt.v_star);
  const double residual = (backup.v - opt.v_star).cwiseAbs().maxCoeff();
  if (iterations == kMaxSolverIterations || residual > 1e-9 * std::max(1.0, mdp.value_scale())) {
    throw Error(ErrorCode::NoImprovementFixedPointNotOptimal,
                "policy iteration stopped at a non-optimal point (Bellman residual " +
                    std::to_string(residual) + ")");
  }

  opt.delta = kInf;
  for (int s = 0; s < mdp.num_states(); ++s) {
    ActionSet best = argmax_set(opt.q_star.row(s).transpose(), tol);
    if (static_cast<int>(best.size()) < mdp.num_actions()) {
      opt.s_tilde.push_back(s);
      for (int a = 0; a < mdp.num_actions(); ++a) {
        if (!contains(best, a)) opt.delta = std::min(opt.delta, std::abs(opt.a_star(s, a)));
      }
    }
    opt.optimal_sets.push_back(std::move(best));
  }
  return opt;
}

bool is_optimal_policy(const Policy& policy, const OptimalSolution& opt) {
  for (int s = 0; s < policy.num_states(); ++s) {
    for (int a = 0; a < policy.num_actions(); ++a) {
      if (policy(s, a) > 0.0 && !contains(opt.optimal_sets[static_cast<std::size_t>(s)], a)) return false;
    }
  }
  return true;
}

ActionSet pi_optimal_set(const Eigen::Ref<const Vector>& adv_row, double tol) {
  return argmax_set(adv_row, tol);
}

Vector nonoptimal_mass(const Policy& policy, const std::vector<ActionSet>& optimal_sets) {
  if (static_cast<int>(optimal_sets.size()) != policy.num_states()) {
    throw Error(ErrorCode::DimensionMismatch, "optimal_sets must have one entry per state");
  }
  Vector b = Vector::Zero(policy.num_states());
  for (int s = 0; s < policy.num_states(); ++s) {
    for (int a = 0; a < policy.num_actions(); ++a) {
      if (!contains(optimal_sets[static_cast<std::size_t>(s)], a)) b(s) += policy(s, a);
    }
  }
  return b;
}

double improvement_expression(const Eigen::Ref<const Vector>& policy_row,
                              const Eigen::Ref<const Vector>& adv_row, double eta_s) {
  const RowUpdate update = prototype_update(policy_row, adv_row, eta_s);
  const ActionSet& support = update.support;
  const double size = static_cast<double>(support.size());
  double sum = 0.0;
  for (int a : support) sum += adv_row(a);
  const double mean = sum / size;
  // sum_B A^2 - (sum_B A)^2/|B| written as a centred sum of squares.
  double spread = 0.0;
  for (int a : support) spread += (adv_row(a) - mean) * (adv_row(a) - mean);
  double outside = 0.0;
  for (Eigen::Index a = 0; a < adv_row.size(); ++a) {
    if (contains(support, static_cast<int>(a))) continue;
    outside += policy_row(a) * (mean - adv_row(a));
  }
  return eta_s * spread + outside;
}

double improvement_direct(const Eigen::Ref<const Vector>& policy_row,
                          const Eigen::Ref<const Vector>& adv_row, double eta_s) {
  return prototype_update(policy_row, adv_row, eta_s).row.dot(adv_row);
}

double improvement_lower_bound(const Eigen::Ref<const Vector>& adv_row, double eta_s, int num_actions) {
  if (!(eta_s > 0.0)) throw Error(ErrorCode::BadSchedule, "eta_s must be positive");
  const double best = adv_row.maxCoeff();
  if (best <= 0.0) return 0.0;
  return best * best / (best + (2.0 + 5.0 * num_actions) / eta_s);
}

BoundReport BoundReport::compare(double bound_value, double observed, std::map<std::string, double> inputs) {
  BoundReport r;
  r.bound_value = bound_value;
  r.inputs = std::move(inputs);
  r.inputs["observed"] = observed;
  r.slack = bound_value - observed;
  r.satisfied = r.slack >= -1e-9;
  return r;
}

double visitation_ratio(const TabularMdp& mdp, const OptimalSolution& opt, const Vector& rho) {
  if (rho.size() != mdp.num_states()) throw Error(ErrorCode::DimensionMismatch, "rho must have |S| entries");
  if (!(rho.minCoeff() > 0.0)) throw Error(ErrorCode::ZeroRhoComponent, "rho must be strictly positive");
  const Vector d_star = visitation_measure(mdp, opt.reference_policy, rho);
  return d_star.cwiseQuotient(rho).maxCoeff();
}

double sublinear_bound_value(int k, double gamma, double ratio, double eta, double mu_tilde,
                             int num_actions) {
  if (k < 1) throw Error(ErrorCode::BadSpec, "sublinear bound needs k >= 1");
  const double one_minus = 1.0 - gamma;
  return (1.0 / k) * ratio / (one_minus * one_minus) * (1.0 + (2.0 + 5.0 * num_actions) / (eta * mu_tilde));
}

BoundReport sublinear_bound_ppg(int k, const TabularMdp& mdp, const Vector& rho,
                                const OptimalSolution& opt, double eta, double observed_gap) {
  const double ratio = visitation_ratio(mdp, opt, rho);
  const double bound =
      sublinear_bound_value(k, mdp.gamma(), ratio, eta, mdp.mu_tilde(), mdp.num_actions());
  return BoundReport::compare(bound, observed_gap,
                              {{"k", k},
                               {"gamma", mdp.gamma()},
                               {"visitation_ratio", ratio},
                               {"eta", eta},
                               {"mu_tilde", mdp.mu_tilde()},
                               {"num_actions", mdp.num_actions()}});
}

double pqa_sublinear_bound_value(int k, double gamma, double eta) {
  const double one_minus = 1.0 - gamma;
  return (1.0 / (k + 1.0)) * (1.0 / (eta * one_minus) + 1.0 / (one_minus * one_minus));
}

double finite_k0_raw(FiniteRule rule, const K0Constants& c) {
  if (!std::isfinite(c.delta)) return 0.0;
  if (!(c.delta > 0.0)) throw Error(ErrorCode::BadSpec, "delta must be positive");
  const double one_minus = 1.0 - c.gamma;
  switch (rule) {
    case FiniteRule::PPG: {
      const double scaled = c.eta * c.mu_tilde;
      return (2.0 / c.delta) * (1.0 + 1.0 / (scaled * c.delta)) *
             (1.0 / (c.mu_tilde * one_minus * one_minus)) * c.visitation_ratio *
             (1.0 + (2.0 + 5.0 * c.num_actions) / scaled);
    }
    case FiniteRule::PQA:
      return (2.0 / c.delta) * (1.0 + 1.0 / (c.eta * c.delta)) *
                 (1.0 / (c.eta * one_minus) + 1.0 / (one_minus * one_minus)) -
             1.0;
    case FiniteRule::PI:
      return (1.0 / one_minus) * std::log(3.0 / (one_minus * c.delta));
    case FiniteRule::VI:
      if (c.initial_gap_inf <= 0.0) return 0.0;
      return (1.0 / one_minus) * std::log(3.0 * c.initial_gap_inf / c.delta);
  }
  return 0.0;
}

std::int64_t finite_k0(FiniteRule rule, const K0Constants& c) {
  const double raw = finite_k0_raw(rule, c);
  if (raw <= 0.0) return 0;
  // Formula values that are integers in exact arithmetic must not be bumped by round-off.
  const double rounded = std::ceil(raw * (1.0 - 1e-12));
  if (rounded >= 9.0e18) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(rounded);
}

bool OptimalityCheck::all_mass() const {
  return std::all_of(mass_condition.begin(), mass_condition.end(), [](bool x) { return x; });
}
bool OptimalityCheck::all_value() const {
  return std::all_of(value_condition.begin(), value_condition.end(), [](bool x) { return x; });
}
bool OptimalityCheck::all_cone() const {
  return std::all_of(cone_condition.begin(), cone_condition.end(), [](bool x) { return x; });
}

OptimalityCheck optimality_condition(const TabularMdp& mdp, const Policy& policy,
                                     const ValueBundle& bundle, const OptimalSolution& opt,
                                     const Vector& eta_s) {
  const int ns = mdp.num_states();
  if (eta_s.size() != ns) throw Error(ErrorCode::DimensionMismatch, "eta_s must have |S| entries");
  OptimalityCheck out;
  out.b = nonoptimal_mass(policy, opt.optimal_sets);
  out.eps_inf.resize(ns);
  const double gap_inf = (opt.v_star - bundle.v).cwiseAbs().maxCoeff();
  const double gap_mu = std::max(0.0, value_under(mdp.mu(), opt.v_star) - value_under(mdp.mu(), bundle.v));
  const double delta = opt.delta;
  for (int s = 0; s < ns; ++s) {
    const double eta = eta_s(s);
    out.eps_inf(s) = eta * (bundle.adv.row(s) - opt.a_star.row(s)).cwiseAbs().maxCoeff();
    if (!std::isfinite(delta)) {
      out.mass_condition.push_back(true);
      out.value_condition.push_back(true);
      out.cone_condition.push_back(true);
      continue;
    }
    out.mass_condition.push_back(out.b(s) + out.eps_inf(s) <= eta * delta / 2.0);
    out.value_condition.push_back(gap_inf <= (delta / 2.0) * eta * delta / (1.0 + eta * delta));
    const double step_term =
        std::min(std::sqrt(eta * gap_mu / ((1.0 - mdp.gamma()) * mdp.mu_tilde())), 1.0);
    out.cone_condition.push_back(out.b(s) + 2.0 * out.eps_inf(s) + step_term < eta * delta);
  }
  return out;
}

PiThreshold pi_equivalence_threshold(const Policy& policy, const ValueBundle& bundle, double tol) {
  PiThreshold out;
  out.delta_pi = kInf;
  double max_mass = 0.0;
  for (int s = 0; s < policy.num_states(); ++s) {
    const Vector adv = bundle.adv.row(s).transpose();
    const ActionSet best = pi_optimal_set(adv, tol);
    if (static_cast<int>(best.size()) == policy.num_actions()) continue;
    double best_outside = -kInf;
    double mass_outside = 0.0;
    for (int a = 0; a < policy.num_actions(); ++a) {
      if (contains(best, a)) continue;
      best_outside = std::max(best_outside, adv(a));
      mass_outside += policy(s, a);
    }
    out.delta_pi = std::min(out.delta_pi, std::abs(adv.maxCoeff() - best_outside));
    max_mass = std::max(max_mass, mass_outside);
  }
  out.all_actions_pi_optimal = !std::isfinite(out.delta_pi);
  out.f_pi = out.all_actions_pi_optimal ? 0.0 : 2.0 / out.delta_pi * max_mass;
  return out;
}

double linear_rate_bound(int k, double gamma, double c0, double initial_gap_inf) {
  if (k < 0) throw Error(ErrorCode::BadSpec, "k must be non-negative");
  return std::pow(gamma, k) * (initial_gap_inf + c0 / (1.0 - gamma));
}

double smoothness_coefficient(double gamma, int num_actions) {
  const double one_minus = 1.0 - gamma;
  return 2.0 * gamma * num_actions / (one_minus * one_minus * one_minus);
}

}  // namespace ppgkit
