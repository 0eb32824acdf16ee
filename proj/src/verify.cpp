#include "ppgkit/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>

#include "ppgkit/diagnostics.hpp"
#include "ppgkit/oracles.hpp"
#include "ppgkit/parallel.hpp"
#include "ppgkit/policy_opt.hpp"
#include "ppgkit/run.hpp"
#include "ppgkit/simplex.hpp"

namespace ppgkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::array<double, 7> kEtaGrid{1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};

bool contains(const ActionSet& set, int a) { return std::binary_search(set.begin(), set.end(), a); }

bool subset(const ActionSet& inner, const ActionSet& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

/// Ordered collection of properties; merging by position keeps batch output deterministic.
/// Stored in a deque so references returned by operator() stay valid.
class PropertySet {
 public:
  PropertyResult& operator()(const std::string& name, double tol) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      it = index_.emplace(name, items_.size()).first;
      items_.emplace_back(name, tol);
    }
    return items_[it->second];
  }

  void merge(const PropertySet& other) {
    for (const auto& p : other.items_) (*this)(p.name, p.tolerance).merge(p);
  }

  std::vector<PropertyResult> take() { return {items_.begin(), items_.end()}; }

 private:
  std::deque<PropertyResult> items_;
  std::map<std::string, std::size_t> index_;
};

template <typename Job>
SuiteReport run_batched(const std::string& suite, int count, Job&& job) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<PropertySet> parts =
      parallel_map<PropertySet>(static_cast<std::size_t>(count), [&](std::size_t i) {
        PropertySet local;
        job(static_cast<int>(i), local);
        return local;
      });
  PropertySet all;
  for (const auto& part : parts) all.merge(part);
  SuiteReport report;
  report.suite = suite;
  report.properties = all.take();
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

int count_or(const VerifyOptions& options, int fallback) {
  return options.instances > 0 ? options.instances : fallback;
}

Vector random_distribution(CounterRng& rng, int n) {
  Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = -std::log(rng.uniform_open_low());
  return x / x.sum();
}

/// Random policy; with probability `sparse` each row keeps a random non-empty subset of actions.
Policy random_policy(CounterRng& rng, int ns, int na, double sparse) {
  Matrix probs(ns, na);
  for (int s = 0; s < ns; ++s) {
    Vector row = random_distribution(rng, na);
    if (rng.uniform() < sparse) {
      const auto keep = static_cast<int>(rng.below(static_cast<std::uint64_t>(na)));
      for (int a = 0; a < na; ++a) {
        if (a != keep && rng.uniform() < 0.5) row(a) = 0.0;
      }
      row /= row.sum();
    }
    probs.row(s) = row.transpose();
  }
  return Policy(std::move(probs));
}

struct Sample {
  TabularMdp mdp;
  OptimalSolution opt;
  Policy policy;
  Policy other;
  Vector rho;
};

/// The sample shared by the lemma and improvement suites.
Sample make_sample(std::uint64_t seed, int i) {
  constexpr std::array<double, 5> gammas{0.5, 0.7, 0.8, 0.9, 0.95};
  constexpr std::array<double, 3> sparsities{0.0, 0.3, 0.6};
  CounterRng rng(seed, 0x5A3D'0000'0000ULL + static_cast<std::uint64_t>(i));
  RandomSpec spec;
  spec.seed = rng.next_u64();
  spec.num_states = 2 + static_cast<int>(rng.below(7));
  spec.num_actions = 2 + static_cast<int>(rng.below(4));
  spec.gamma = gammas[rng.below(gammas.size())];
  spec.sparsity = sparsities[rng.below(sparsities.size())];
  Sample out;
  out.mdp = generate(spec);
  out.opt = solve_optimal(out.mdp);
  out.policy = random_policy(rng, spec.num_states, spec.num_actions, 0.3);
  out.other = random_policy(rng, spec.num_states, spec.num_actions, 0.3);
  out.rho = random_distribution(rng, spec.num_states);
  return out;
}

double sup_norm(const Vector& x) { return x.cwiseAbs().maxCoeff(); }
double sup_norm(const Matrix& x) { return x.cwiseAbs().maxCoeff(); }

}  // namespace

PropertyResult::PropertyResult(std::string n, double tol) : name(std::move(n)), worst_slack(kInf), tolerance(tol) {}

void PropertyResult::record(double slack) {
  ++checks;
  if (!(slack >= -tolerance)) ++failures;
  worst_slack = std::min(worst_slack, slack);
  if (std::isnan(slack)) worst_slack = slack;
}

void PropertyResult::record_exact(bool ok) {
  ++checks;
  if (!ok) ++failures;
}

void PropertyResult::merge(const PropertyResult& other) {
  checks += other.checks;
  failures += other.failures;
  if (std::isnan(other.worst_slack) || other.worst_slack < worst_slack) worst_slack = other.worst_slack;
  if (note.empty()) note = other.note;
}

bool SuiteReport::passed() const {
  return !properties.empty() &&
         std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.passed(); });
}

std::string SuiteReport::format() const {
  std::string out;
  char line[512];
  for (const auto& p : properties) {
    if (std::isinf(p.worst_slack)) {
      std::snprintf(line, sizeof(line), "%s  %s/%s  checks=%lld failures=%lld  exact\n",
                    p.passed() ? "PASS" : "FAIL", suite.c_str(), p.name.c_str(),
                    static_cast<long long>(p.checks), static_cast<long long>(p.failures));
    } else {
      std::snprintf(line, sizeof(line), "%s  %s/%s  checks=%lld failures=%lld  worst_slack=%.3e  tol=%.0e\n",
                    p.passed() ? "PASS" : "FAIL", suite.c_str(), p.name.c_str(),
                    static_cast<long long>(p.checks), static_cast<long long>(p.failures), p.worst_slack,
                    p.tolerance);
    }
    out += line;
    if (!p.note.empty()) out += "      " + p.note + "\n";
  }
  return out;
}

std::vector<RandomSpec> benchmark_specs(std::uint64_t seed, int count) {
  constexpr std::array<double, 3> gammas{0.8, 0.9, 0.95};
  std::vector<RandomSpec> specs;
  specs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    RandomSpec spec;
    spec.seed = seed + static_cast<std::uint64_t>(i);
    CounterRng rng(spec.seed, 0xBE4C'4000ULL);
    spec.num_states = 2 + static_cast<int>(rng.below(5));
    spec.num_actions = 2 + static_cast<int>(rng.below(3));
    spec.gamma = gammas[static_cast<std::size_t>(i) % gammas.size()];
    spec.sparsity = 0.0;
    specs.push_back(spec);
  }
  return specs;
}

// ---------------------------------------------------------------------------
// projection

SuiteReport verify_projection(const VerifyOptions& options) {
  const int count = count_or(options, 10000);
  return run_batched("projection", count, [&](int i, PropertySet& props) {
    CounterRng rng(options.seed, 0x9A0F'0000'0000ULL + static_cast<std::uint64_t>(i));
    const int n = 1 + static_cast<int>(rng.below(6));
    constexpr std::array<double, 3> scales{0.5, 2.0, 10.0};
    const double scale = scales[rng.below(scales.size())];
    Vector p(n);
    if (rng.uniform() < 0.1) {
      p = random_distribution(rng, n);
    } else {
      for (int a = 0; a < n; ++a) p(a) = scale * (2.0 * rng.uniform() - 1.0);
    }

    const ProjectionResult proj = project_simplex(p);
    const Vector oracle = oracle::brute_force_projection(p);
    props("oracle_equivalence", 1e-10).record(-sup_norm(Vector(proj.point - oracle)));
    props("unit_mass", 1e-12).record(-std::abs(proj.point.sum() - 1.0));

    double threshold_err = 0.0;
    for (int a = 0; a < n; ++a) threshold_err = std::max(threshold_err, std::abs(proj.point(a) - std::max(p(a) + proj.offset, 0.0)));
    props("threshold_form", 1e-12).record(-threshold_err);

    const double c = 20.0 * rng.uniform() - 10.0;
    const Vector shifted = p.array() + c;
    props("shift_invariance", 1e-12).record(-sup_norm(Vector(project_simplex(shifted).point - proj.point)));
    props("idempotence", 1e-12).record(-sup_norm(Vector(project_simplex(proj.point).point - proj.point)));

    if (n >= 2) {
      // Random non-trivial partition.
      ActionSet b_set, c_set;
      const std::uint64_t mask = 1 + rng.below((std::uint64_t{1} << n) - 2);
      for (int a = 0; a < n; ++a) ((mask >> a) & 1 ? b_set : c_set).push_back(a);
      bool c_zero = true;
      for (int a : c_set) c_zero = c_zero && !contains(proj.support, a);
      props("gap_property_iff", 0.0).record_exact(is_excluded(p, b_set, c_set) == c_zero);
    }
  });
}

// ---------------------------------------------------------------------------
// lemmas

SuiteReport verify_lemmas(const VerifyOptions& options) {
  const int count = count_or(options, 500);
  return run_batched("lemmas", count, [&](int i, PropertySet& props) {
    const Sample smp = make_sample(options.seed, i);
    const TabularMdp& mdp = smp.mdp;
    const OptimalSolution& opt = smp.opt;
    const int ns = mdp.num_states();
    const int na = mdp.num_actions();
    const double gamma = mdp.gamma();
    const double scale = mdp.value_scale();
    const double tol_argmax = argmax_tolerance(gamma);

    const ValueBundle bundle = policy_evaluate(mdp, smp.policy);
    const ValueBundle other = policy_evaluate(mdp, smp.other);

    // Value ranges.
    auto& range = props("value_ranges", 1e-10);
    range.record(std::min(bundle.v.minCoeff(), scale - bundle.v.maxCoeff()));
    range.record(std::min(bundle.q.minCoeff(), scale - bundle.q.maxCoeff()));
    range.record(scale - sup_norm(bundle.adv));

    // Advantage identities.
    auto& identity = props("advantage_identity", 1e-10);
    for (int s = 0; s < ns; ++s) identity.record(-std::abs(smp.policy.probs().row(s).dot(bundle.adv.row(s))));

    // Q, A and V gaps are controlled by the rho-weighted value gap.
    const double v_gap_inf = sup_norm(Vector(opt.v_star - bundle.v));
    const double gap_rho = value_under(smp.rho, opt.v_star) - value_under(smp.rho, bundle.v);
    props("q_gap_le_gamma_v_gap", 1e-10).record(gamma * v_gap_inf - sup_norm(Matrix(opt.q_star - bundle.q)));
    props("a_gap_le_v_gap", 1e-10).record(v_gap_inf - sup_norm(Matrix(opt.a_star - bundle.adv)));
    props("v_gap_le_rho_gap_over_min_rho", 1e-10).record(gap_rho / smp.rho.minCoeff() - v_gap_inf);

    // Performance difference.
    const Vector d_rho = visitation_measure(mdp, smp.policy, smp.rho);
    double weighted = 0.0;
    for (int s = 0; s < ns; ++s) weighted += d_rho(s) * smp.policy.probs().row(s).dot(other.adv.row(s));
    const double lhs = value_under(smp.rho, bundle.v) - value_under(smp.rho, other.v);
    props("performance_difference", 1e-8).record(-std::abs(lhs - weighted / (1.0 - gamma)));

    // Visitation dominates (1 - gamma) rho and is a distribution.
    props("visitation_lower_bound", 1e-12).record((d_rho - (1.0 - gamma) * smp.rho).minCoeff());
    props("visitation_mass", 1e-12).record(-std::abs(d_rho.sum() - 1.0));

    // b-bounds.
    const Vector b = nonoptimal_mass(smp.policy, opt.optimal_sets);
    props("gap_le_visitation_b_mass", 1e-10).record(d_rho.dot(b) / ((1.0 - gamma) * (1.0 - gamma)) - gap_rho);
    if (opt.delta_finite()) {
      props("rho_b_mass_le_gap_over_delta", 1e-10).record(gap_rho / opt.delta - smp.rho.dot(b));
    }

    // Prototype-update support structure over the eta grid.
    for (int s = 0; s < ns; ++s) {
      const Vector pi_row = smp.policy.row(s);
      const Vector adv_row = bundle.adv.row(s).transpose();
      const ActionSet best = pi_optimal_set(adv_row, tol_argmax);
      double mass_outside = 0.0;
      for (int a = 0; a < na; ++a) {
        if (!contains(best, a)) mass_outside += pi_row(a);
      }
      ActionSet previous_support;
      for (std::size_t g = 0; g < kEtaGrid.size(); ++g) {
        const double eta = kEtaGrid[g];
        const RowUpdate up = prototype_update(pi_row, adv_row, eta);

        // Three cases: a strict subset of A^pi_s, equal to it, or a strict superset.
        const bool three_cases = subset(up.support, best) || subset(best, up.support);
        props("support_three_cases", 0.0).record_exact(three_cases);

        if (g > 0) props("support_monotone_in_eta", 0.0).record_exact(subset(up.support, previous_support));
        previous_support = up.support;

        double worst = kInf;
        for (int a : up.support) worst = std::min(worst, adv_row(a) - (adv_row.maxCoeff() - 2.0 * mass_outside / eta));
        props("support_advantage_bound", 1e-10).record(worst);

        // Gap property on the update vector with B = A^pi_s and a random partition.
        const Vector p = pi_row + eta * adv_row;
        if (static_cast<int>(best.size()) < na) {
          ActionSet rest;
          for (int a = 0; a < na; ++a) {
            if (!contains(best, a)) rest.push_back(a);
          }
          bool rest_zero = true;
          for (int a : rest) rest_zero = rest_zero && !contains(up.support, a);
          props("gap_property_iff", 0.0).record_exact(is_excluded(p, best, rest) == rest_zero);
        }
      }
    }

    // Monotone improvement of one PPG and one PQA step at every grid eta.
    for (double eta : kEtaGrid) {
      const ValueBundle ppg_next = policy_evaluate(mdp, ppg_step(mdp, smp.policy, bundle, eta).policy);
      const ValueBundle pqa_next = policy_evaluate(mdp, pqa_step(mdp, smp.policy, bundle, eta).policy);
      props("monotone_improvement", 1e-9).record(std::min((ppg_next.v - bundle.v).minCoeff(), (pqa_next.v - bundle.v).minCoeff()));
    }
  });
}

// ---------------------------------------------------------------------------
// improvement

SuiteReport verify_improvement(const VerifyOptions& options) {
  const int count = count_or(options, 500);
  SuiteReport report = run_batched("improvement", count, [&](int i, PropertySet& props) {
    const Sample smp = make_sample(options.seed, i);
    const ValueBundle bundle = policy_evaluate(smp.mdp, smp.policy);
    for (int s = 0; s < smp.mdp.num_states(); ++s) {
      const Vector pi_row = smp.policy.row(s);
      const Vector adv_row = bundle.adv.row(s).transpose();
      for (double eta : kEtaGrid) {
        const double closed = improvement_expression(pi_row, adv_row, eta);
        const double direct = improvement_direct(pi_row, adv_row, eta);
        props("closed_form_equals_direct", 1e-10).record(-std::abs(closed - direct));
        props("lower_bound_dominated", 1e-10)
            .record(closed - improvement_lower_bound(adv_row, eta, smp.mdp.num_actions()));
        props("nonnegative_improvement", 1e-10).record(direct);
      }
    }
  });

  // Large-step check on the two-action bandit.
  PropertyResult large("bandit_large_step", 1e-10);
  const Vector pi_row = Vector::Constant(2, 0.5);
  Vector adv_row(2);
  adv_row << 0.25, -0.25;
  for (double eta : {1.0, 10.0, 1e9}) {
    large.record(improvement_direct(pi_row, adv_row, eta) - improvement_lower_bound(adv_row, eta, 2));
  }
  report.properties.push_back(large);
  return report;
}

// ---------------------------------------------------------------------------
// sublinear

SuiteReport verify_sublinear(const VerifyOptions& options) {
  const int count = count_or(options, 20);
  const std::vector<RandomSpec> specs = benchmark_specs(options.seed, count);
  constexpr int kIters = 2000;
  return run_batched("sublinear", count, [&](int i, PropertySet& props) {
    const TabularMdp mdp = generate(specs[static_cast<std::size_t>(i)]);
    const OptimalSolution opt = solve_optimal(mdp);
    const Vector& rho = mdp.mu();
    const double ratio = visitation_ratio(mdp, opt, rho);
    const double inv_l = 1.0 / smoothness_coefficient(mdp.gamma(), mdp.num_actions());
    const double one_minus = 1.0 - mdp.gamma();
    for (double eta : {0.01, inv_l, 1.0, 100.0, 1e4}) {
      const RunTrace ppg = run(mdp, UpdateRule::ppg(), StepSchedule::constant(eta), kIters, false, opt);
      const double c = (2.0 + 5.0 * mdp.num_actions()) / (eta * mdp.mu_tilde());
      for (std::size_t k = 0; k < ppg.records.size(); ++k) {
        const IterationRecord& rec = ppg.records[k];
        if (rec.k >= 1) {
          const double bound =
              sublinear_bound_value(rec.k, mdp.gamma(), ratio, eta, mdp.mu_tilde(), mdp.num_actions());
          props("ppg_gap_le_bound", 1e-9).record(bound - rec.gap_rho);
        }
        if (k + 1 < ppg.records.size()) {
          const double delta_k = rec.gap_rho;
          const double progress = delta_k - ppg.records[k + 1].gap_rho;
          const double required = one_minus * one_minus * delta_k * delta_k / (ratio * (one_minus * delta_k + c));
          props("ppg_quadratic_progress", 1e-9).record(progress - required);
        }
      }
      const RunTrace pqa = run(mdp, UpdateRule::pqa(), StepSchedule::constant(eta), kIters, false, opt);
      for (const IterationRecord& rec : pqa.records) {
        props("pqa_gap_inf_le_bound", 1e-9).record(pqa_sublinear_bound_value(rec.k, mdp.gamma(), eta) - rec.gap_inf);
      }
    }
  });
}

// ---------------------------------------------------------------------------
// finite termination

namespace {

void finite_run(const TabularMdp& mdp, const OptimalSolution& opt, FiniteRule rule, double eta,
                PropertySet& props) {
  K0Constants c;
  c.gamma = mdp.gamma();
  c.delta = opt.delta;
  c.eta = eta;
  c.mu_tilde = mdp.mu_tilde();
  c.num_actions = mdp.num_actions();
  c.visitation_ratio = visitation_ratio(mdp, opt, mdp.mu());
  const std::int64_t k0 = finite_k0(rule, c);
  const std::int64_t cap = std::min<std::int64_t>(k0, 100000);
  const std::string prefix = rule == FiniteRule::PPG ? "ppg_" : "pqa_";

  Policy policy = Policy::uniform(mdp.num_states(), mdp.num_actions());
  std::int64_t first_optimal = -1;
  for (std::int64_t k = 0; k <= cap; ++k) {
    if (is_optimal_policy(policy, opt)) {
      first_optimal = k;
      break;
    }
    const ValueBundle bundle = policy_evaluate(mdp, policy);
    PolicyStep step = rule == FiniteRule::PPG ? ppg_step(mdp, policy, bundle, eta) : pqa_step(mdp, policy, bundle, eta);
    if (opt.delta_finite()) {
      const OptimalityCheck check = optimality_condition(mdp, policy, bundle, opt, step.eta_s);
      for (int s = 0; s < mdp.num_states(); ++s) {
        const bool next_optimal = subset(step.supports[static_cast<std::size_t>(s)],
                                         opt.optimal_sets[static_cast<std::size_t>(s)]);
        if (check.mass_condition[static_cast<std::size_t>(s)]) props(prefix + "mass_condition_implies_optimal", 0.0).record_exact(next_optimal);
        if (check.value_condition[static_cast<std::size_t>(s)]) props(prefix + "value_condition_implies_optimal", 0.0).record_exact(next_optimal);
        if (check.cone_condition[static_cast<std::size_t>(s)]) props(prefix + "cone_condition_implies_optimal", 0.0).record_exact(next_optimal);
      }
    }
    policy = std::move(step.policy);
  }
  auto& term = props(prefix + "optimal_within_k0", 0.0);
  if (first_optimal < 0) {
    term.record(-1.0);
    term.note = "no optimal iterate within cap " + std::to_string(cap) + " (k0 = " + std::to_string(k0) + ")";
  } else {
    term.record(static_cast<double>(k0 - first_optimal));
  }
}

}  // namespace

SuiteReport verify_finite(const VerifyOptions& options) {
  const int count = count_or(options, 20);
  const std::vector<RandomSpec> specs = benchmark_specs(options.seed, count);
  return run_batched("finite", count, [&](int i, PropertySet& props) {
    const TabularMdp mdp = generate(specs[static_cast<std::size_t>(i)]);
    const OptimalSolution opt = solve_optimal(mdp);
    for (double eta : {0.1, 1.0, 10.0}) {
      finite_run(mdp, opt, FiniteRule::PPG, eta, props);
      finite_run(mdp, opt, FiniteRule::PQA, eta, props);
    }
  });
}

SuiteReport verify_pi_vi(const VerifyOptions& options) {
  const int count = count_or(options, 20);
  std::vector<GeneratorSpec> specs;
  for (const RandomSpec& s : benchmark_specs(options.seed, count)) specs.emplace_back(s);
  specs.emplace_back(BanditSpec{0.9, 0.5});
  specs.emplace_back(ChainSpec{5, 0.9});
  return run_batched("pi-vi", static_cast<int>(specs.size()), [&](int i, PropertySet& props) {
    const TabularMdp mdp = generate(specs[static_cast<std::size_t>(i)]);
    const OptimalSolution opt = solve_optimal(mdp);
    K0Constants c;
    c.gamma = mdp.gamma();
    c.delta = opt.delta;
    c.num_actions = mdp.num_actions();
    c.initial_gap_inf = sup_norm(opt.v_star);  // VI starts from v = 0

    const std::int64_t k0_pi = finite_k0(FiniteRule::PI, c);
    const RunTrace pi = run(mdp, UpdateRule::pi(), StepSchedule{}, static_cast<int>(k0_pi), true, opt);
    const auto first = pi.first_optimal();
    props("pi_optimal_within_k0", 0.0).record(first ? static_cast<double>(k0_pi - *first) : -1.0);

    const std::int64_t k0_vi = finite_k0(FiniteRule::VI, c);
    const int horizon = static_cast<int>(k0_vi) + 25;
    const RunTrace vi = run(mdp, UpdateRule::vi(), StepSchedule{}, horizon, false, opt);
    auto& tail = props("vi_greedy_optimal_after_k0", 0.0);
    auto& lemma = props("vi_small_error_implies_greedy_optimal", 0.0);
    for (const IterationRecord& rec : vi.records) {
      if (rec.k >= k0_vi) tail.record_exact(rec.is_optimal);
      if (opt.delta_finite() && mdp.gamma() * rec.gap_inf <= opt.delta / 3.0) lemma.record_exact(rec.is_optimal);
    }
    // Independent value-iteration oracle agrees with the exact solver.
    const Vector v_oracle = oracle::value_iteration(mdp.num_states(), mdp.num_actions(), mdp.transition().data(),
                                                    mdp.reward().data(), mdp.gamma());
    props("v_star_matches_vi_oracle", 1e-9).record(-sup_norm(Vector(v_oracle - opt.v_star)));
  });
}

// ---------------------------------------------------------------------------
// linear rate

SuiteReport verify_linear(const VerifyOptions& options) {
  const int count = count_or(options, 5);
  std::vector<GeneratorSpec> specs{BanditSpec{0.9, 0.5}};
  for (const RandomSpec& s : benchmark_specs(options.seed, count)) specs.emplace_back(s);
  constexpr double kC0 = 1.0;
  return run_batched("linear", static_cast<int>(specs.size()), [&](int i, PropertySet& props) {
    const TabularMdp mdp = generate(specs[static_cast<std::size_t>(i)]);
    const OptimalSolution opt = solve_optimal(mdp);
    const RunTrace trace = run(mdp, UpdateRule::ppg(), StepSchedule::geometric(kC0), 10000, true, opt);
    const double gap0 = trace.records.front().gap_inf;
    for (const IterationRecord& rec : trace.records) {
      props("ppg_geometric_gap_below_bound", 1e-9).record(linear_rate_bound(rec.k, mdp.gamma(), kC0, gap0) - rec.gap_inf);
    }
    props("ppg_geometric_reaches_optimal", 0.0).record_exact(trace.terminated_reason == TerminationReason::ReachedOptimal);
  });
}

// ---------------------------------------------------------------------------
// PI equivalence

SuiteReport verify_pi_equivalence(const VerifyOptions& options) {
  const int count = count_or(options, 200);
  return run_batched("pi-equiv", count, [&](int i, PropertySet& props) {
    const Sample smp = make_sample(options.seed ^ 0x7E57ULL, i);
    const ValueBundle bundle = policy_evaluate(smp.mdp, smp.policy);
    const double tol = argmax_tolerance(smp.mdp.gamma());
    const PiThreshold threshold = pi_equivalence_threshold(smp.policy, bundle, tol);
    const double eta = threshold.f_pi > 0.0 ? 1.01 * threshold.f_pi : 1.0;
    const PolicyStep step =
        prototype_step(smp.policy, bundle.adv, Vector::Constant(smp.mdp.num_states(), eta));
    bool inside = true;
    for (int s = 0; s < smp.mdp.num_states(); ++s) {
      inside = inside && subset(step.supports[static_cast<std::size_t>(s)],
                                pi_optimal_set(bundle.adv.row(s).transpose(), tol));
    }
    props("support_within_pi_optimal_set", 0.0).record_exact(inside);

    // PPG under the adaptive schedule has eta_s >= eta mu~ > F^pi at every state.
    const double adaptive = schedule_eta(StepSchedule::adaptive(1.01), 0, smp.mdp, smp.policy, bundle);
    const PolicyStep ppg = ppg_step(smp.mdp, smp.policy, bundle, adaptive);
    bool ppg_inside = true;
    for (int s = 0; s < smp.mdp.num_states(); ++s) {
      ppg_inside = ppg_inside && subset(ppg.supports[static_cast<std::size_t>(s)],
                                        pi_optimal_set(bundle.adv.row(s).transpose(), tol));
    }
    props("adaptive_step_is_pi_step", 0.0).record_exact(ppg_inside);
  });
}

// ---------------------------------------------------------------------------
// homotopic

SuiteReport verify_homotopic(const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SuiteReport report;
  report.suite = "homotopic";

  const double gamma = 0.9;
  const double delta = 0.5;
  const TabularMdp bandit = generate(BanditSpec{gamma, delta});
  const OptimalSolution opt = solve_optimal(bandit);
  const Policy optimal(Matrix{{1.0, 0.0}});
  const ValueBundle bundle = policy_evaluate(bandit, optimal);
  const Vector anchor = Vector::Constant(2, 0.5);

  PropertyResult closed("bandit_eta_0.1_closed_form", 1e-12);
  const double eta_small = 0.1;
  const HomotopicRowUpdate small =
      homotopic_row_update(optimal.row(0), bundle.adv.row(0).transpose(), anchor, eta_small, 1.0 / gamma);
  const double lambda = 0.5 * (1.0 - 1.0 / gamma - eta_small * delta);
  closed.record(-std::abs(small.lambda - lambda));
  closed.record(-std::abs(small.row(0) - gamma * (1.0 - lambda)));
  char note[160];
  std::snprintf(note, sizeof(note), "pi+ = (%.12f, %.12f), lambda = %.12f", small.row(0), small.row(1), small.lambda);
  closed.note = note;
  report.properties.push_back(closed);

  PropertyResult lost("bandit_eta_0.1_loses_optimality", 0.0);
  lost.record_exact(small.row(0) < 1.0 && small.row(1) > 0.0);
  report.properties.push_back(lost);

  PropertyResult kept("bandit_eta_0.3_exact", 0.0);
  const HomotopicRowUpdate large =
      homotopic_row_update(optimal.row(0), bundle.adv.row(0).transpose(), anchor, 0.3, 1.0 / gamma);
  kept.record_exact(large.row(0) == 1.0 && large.row(1) == 0.0);
  report.properties.push_back(kept);

  // Plain PQA from the optimal policy never leaves it.
  PropertyResult pqa("bandit_pqa_keeps_optimality", 0.0);
  for (double eta : kEtaGrid) pqa.record_exact(is_optimal_policy(pqa_step(bandit, optimal, bundle, eta).policy, opt));
  report.properties.push_back(pqa);

  // Rows stay on the simplex for random inputs.
  PropertyResult simplex("rows_on_simplex", 1e-12);
  const int count = count_or(options, 200);
  for (int i = 0; i < count; ++i) {
    CounterRng rng(options.seed, 0x4040'0000ULL + static_cast<std::uint64_t>(i));
    const int n = 2 + static_cast<int>(rng.below(4));
    const Vector row = random_distribution(rng, n);
    const Vector anchor_row = random_distribution(rng, n);
    Vector adv(n);
    for (int a = 0; a < n; ++a) adv(a) = 4.0 * rng.uniform() - 2.0;
    const HomotopicRowUpdate up = homotopic_row_update(row, adv, anchor_row, 0.5, 1.0 + rng.uniform());
    simplex.record(std::min(-std::abs(up.row.sum() - 1.0), up.row.minCoeff()));
  }
  report.properties.push_back(simplex);

  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"projection", "lemmas", "improvement", "sublinear",
                                              "finite", "linear", "pi-equiv", "homotopic"};
  return names;
}

SuiteReport run_suite(std::string_view name, const VerifyOptions& options) {
  if (name == "projection") return verify_projection(options);
  if (name == "lemmas") return verify_lemmas(options);
  if (name == "improvement") return verify_improvement(options);
  if (name == "sublinear") return verify_sublinear(options);
  if (name == "finite") {
    SuiteReport report = verify_finite(options);
    SuiteReport pi_vi = verify_pi_vi(options);
    for (auto& p : pi_vi.properties) report.properties.push_back(std::move(p));
    report.seconds += pi_vi.seconds;
    return report;
  }
  if (name == "linear") return verify_linear(options);
  if (name == "pi-equiv") return verify_pi_equivalence(options);
  if (name == "homotopic") return verify_homotopic(options);
  throw Error(ErrorCode::BadFlag, "unknown suite \"" + std::string(name) + "\"");
}

}  // namespace ppgkit
