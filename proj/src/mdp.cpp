#include "ppgkit/mdp.hpp"

#include <cmath>
#include <sstream>

namespace ppgkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RowNotStochastic: return "RowNotStochastic";
    case ErrorCode::RewardOutOfRange: return "RewardOutOfRange";
    case ErrorCode::InitialDistributionNotTraversal: return "InitialDistributionNotTraversal";
    case ErrorCode::BadGamma: return "BadGamma";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidPolicy: return "InvalidPolicy";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::BadPartition: return "BadPartition";
    case ErrorCode::NonFiniteAdvantage: return "NonFiniteAdvantage";
    case ErrorCode::InfiniteGap: return "InfiniteGap";
    case ErrorCode::ZeroRhoComponent: return "ZeroRhoComponent";
    case ErrorCode::AllActionsPiOptimal: return "AllActionsPiOptimal";
    case ErrorCode::NoImprovementFixedPointNotOptimal: return "NoImprovementFixedPointNotOptimal";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::BadSchedule: return "BadSchedule";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::BadFlag: return "BadFlag";
  }
  return "Unknown";
}

namespace {

constexpr double kSumTolerance = 1e-9;

}  // namespace

TabularMdp::TabularMdp(int num_states, int num_actions, std::vector<double> transition,
                       std::vector<double> reward, double gamma, Vector mu)
    : num_states_(num_states),
      num_actions_(num_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      gamma_(gamma),
      mu_(std::move(mu)) {
  if (num_states <= 0 || num_actions <= 0) {
    throw Error(ErrorCode::DimensionMismatch, "num_states and num_actions must be positive");
  }
  const auto expected = static_cast<std::size_t>(num_states) * num_actions * num_states;
  if (transition_.size() != expected || reward_.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch,
                "transition/reward tensors must have |S|*|A|*|S| = " + std::to_string(expected) +
                    " entries");
  }
  if (mu_.size() != num_states) {
    throw Error(ErrorCode::DimensionMismatch, "mu must have |S| entries");
  }
  expected_reward_.resize(num_states, num_actions);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      double acc = 0.0;
      for (int n = 0; n < num_states; ++n) acc += p(s, a, n) * r(s, a, n);
      expected_reward_(s, a) = acc;
    }
  }
}

bool operator==(const TabularMdp& x, const TabularMdp& y) {
  return x.num_states_ == y.num_states_ && x.num_actions_ == y.num_actions_ &&
         x.gamma_ == y.gamma_ && x.transition_ == y.transition_ && x.reward_ == y.reward_ &&
         x.mu_.size() == y.mu_.size() && x.mu_ == y.mu_;
}

Policy::Policy(Matrix probs) : probs_(std::move(probs)) {}

Policy Policy::uniform(int num_states, int num_actions) {
  return Policy(Matrix::Constant(num_states, num_actions, 1.0 / num_actions));
}

Policy Policy::uniform_over(const std::vector<ActionSet>& sets, int num_actions) {
  Matrix probs = Matrix::Zero(static_cast<Eigen::Index>(sets.size()), num_actions);
  for (std::size_t s = 0; s < sets.size(); ++s) {
    if (sets[s].empty()) throw Error(ErrorCode::InvalidPolicy, "empty action set");
    const double mass = 1.0 / static_cast<double>(sets[s].size());
    for (int a : sets[s]) probs(static_cast<Eigen::Index>(s), a) = mass;
  }
  return Policy(std::move(probs));
}

ActionSet Policy::support(int s) const {
  ActionSet out;
  for (int a = 0; a < num_actions(); ++a) {
    if (probs_(s, a) > 0.0) out.push_back(a);
  }
  return out;
}

std::string ValidationReport::describe() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << to_string(v.code) << " at " << v.field << "[";
    for (std::size_t i = 0; i < v.index.size(); ++i) os << (i ? "," : "") << v.index[i];
    os << "] = " << v.value << "\n";
  }
  return os.str();
}

ValidationReport validate_mdp(const TabularMdp& mdp) {
  ValidationReport report;
  auto& out = report.violations;
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();

  if (!(mdp.gamma() >= 0.0 && mdp.gamma() < 1.0)) {
    out.push_back({ErrorCode::BadGamma, "gamma", {}, mdp.gamma()});
  }
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      double row_sum = 0.0;
      for (int n = 0; n < ns; ++n) {
        const double p = mdp.p(s, a, n);
        if (!(p >= 0.0) || !std::isfinite(p)) {
          out.push_back({ErrorCode::RowNotStochastic, "P", {s, a, n}, p});
        }
        row_sum += p;
        const double r = mdp.r(s, a, n);
        if (!(r >= 0.0 && r <= 1.0)) {
          out.push_back({ErrorCode::RewardOutOfRange, "r", {s, a, n}, r});
        }
      }
      if (!(std::abs(row_sum - 1.0) <= kSumTolerance)) {
        out.push_back({ErrorCode::RowNotStochastic, "P", {s, a}, row_sum});
      }
    }
  }
  double mu_sum = 0.0;
  for (int s = 0; s < ns; ++s) {
    const double m = mdp.mu()(s);
    if (!(m > 0.0) || !std::isfinite(m)) {
      out.push_back({ErrorCode::InitialDistributionNotTraversal, "mu", {s}, m});
    }
    mu_sum += m;
  }
  if (!(std::abs(mu_sum - 1.0) <= kSumTolerance)) {
    out.push_back({ErrorCode::InitialDistributionNotTraversal, "mu", {}, mu_sum});
  }
  return report;
}

void validate_policy(const TabularMdp& mdp, const Policy& policy) {
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    throw Error(ErrorCode::DimensionMismatch, "policy shape does not match the MDP");
  }
  for (int s = 0; s < policy.num_states(); ++s) {
    double sum = 0.0;
    for (int a = 0; a < policy.num_actions(); ++a) {
      const double x = policy(s, a);
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw Error(ErrorCode::InvalidPolicy,
                    "negative or non-finite probability at state " + std::to_string(s));
      }
      sum += x;
    }
    if (!(std::abs(sum - 1.0) <= kSumTolerance)) {
      throw Error(ErrorCode::InvalidPolicy, "row " + std::to_string(s) + " sums to " +
                                                std::to_string(sum));
    }
  }
}

namespace {

// P_pi[s][s'] = sum_a pi[s][a] P[s][a][s'].
Eigen::MatrixXd policy_transition(const TabularMdp& mdp, const Policy& policy) {
  const int ns = mdp.num_states();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ns, ns);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const double w = policy(s, a);
      if (w == 0.0) continue;
      out.row(s) += w * mdp.transition_row(s, a).transpose();
    }
  }
  return out;
}

void check_finite(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (!x.allFinite()) throw Error(ErrorCode::SingularSystem, "linear solve produced non-finite values");
}

}  // namespace

ValueBundle policy_evaluate(const TabularMdp& mdp, const Policy& policy) {
  validate_policy(mdp, policy);
  const int ns = mdp.num_states();
  const double gamma = mdp.gamma();
  const Eigen::MatrixXd p_pi = policy_transition(mdp, policy);
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(ns, ns) - gamma * p_pi;

  Vector r_pi(ns);
  for (int s = 0; s < ns; ++s) r_pi(s) = policy.probs().row(s).dot(mdp.expected_reward().row(s));

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  ValueBundle out;
  out.v = lu.solve(r_pi);
  check_finite(out.v);
  out.q = q_from_values(mdp, out.v);
  out.adv = out.q.colwise() - out.v;

  out.visitation = (1.0 - gamma) * system.transpose().partialPivLu().solve(mdp.mu());
  check_finite(out.visitation);
  return out;
}

Vector visitation_measure(const TabularMdp& mdp, const Policy& policy, const Vector& rho) {
  validate_policy(mdp, policy);
  if (rho.size() != mdp.num_states()) {
    throw Error(ErrorCode::DimensionMismatch, "rho must have |S| entries");
  }
  const int ns = mdp.num_states();
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(ns, ns) - mdp.gamma() * policy_transition(mdp, policy).transpose();
  Vector d = (1.0 - mdp.gamma()) * system.partialPivLu().solve(rho);
  check_finite(d);
  return d;
}

Matrix q_from_values(const TabularMdp& mdp, const Vector& v) {
  if (v.size() != mdp.num_states()) {
    throw Error(ErrorCode::DimensionMismatch, "value vector must have |S| entries");
  }
  Matrix q = mdp.expected_reward();
  for (int s = 0; s < mdp.num_states(); ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      q(s, a) += mdp.gamma() * mdp.transition_row(s, a).dot(v);
    }
  }
  return q;
}

double value_under(const Vector& rho, const Vector& v) {
  if (rho.size() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch, "rho and v have different lengths");
  }
  return rho.dot(v);
}

double argmax_tolerance(double gamma) { return 1e-9 * std::max(1.0, 1.0 / (1.0 - gamma)); }

ActionSet argmax_set(const Eigen::Ref<const Vector>& row, double tol) {
  const double best = row.maxCoeff();
  ActionSet out;
  for (Eigen::Index a = 0; a < row.size(); ++a) {
    if (row(a) >= best - tol) out.push_back(static_cast<int>(a));
  }
  return out;
}

BellmanBackup bellman_backup(const TabularMdp& mdp, const Vector& v) {
  const Matrix q = q_from_values(mdp, v);
  const double tol = argmax_tolerance(mdp.gamma());
  BellmanBackup out;
  out.v = q.rowwise().maxCoeff();
  out.greedy.reserve(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) out.greedy.push_back(argmax_set(q.row(s).transpose(), tol));
  return out;
}

}  // namespace ppgkit
