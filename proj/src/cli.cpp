#include "ppgkit/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppgkit/instances.hpp"
#include "ppgkit/parallel.hpp"
#include "ppgkit/verify.hpp"

namespace ppgkit {

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitError = 2;

UpdateRule::Kind parse_rule(const std::string& name) {
  if (name == "ppg") return UpdateRule::Kind::PPG;
  if (name == "pqa") return UpdateRule::Kind::PQA;
  if (name == "pi") return UpdateRule::Kind::PI;
  if (name == "vi") return UpdateRule::Kind::VI;
  if (name == "hpqa") return UpdateRule::Kind::HomotopicPQA;
  throw Error(ErrorCode::BadFlag, "unknown rule \"" + name + "\"");
}

StepSchedule::Kind parse_schedule(const std::string& name) {
  if (name == "constant") return StepSchedule::Kind::Constant;
  if (name == "geometric") return StepSchedule::Kind::GeometricIncreasing;
  if (name == "adaptive") return StepSchedule::Kind::AdaptivePiThreshold;
  throw Error(ErrorCode::BadFlag, "unknown schedule \"" + name + "\"");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::optional<double> rho_ratio(const TabularMdp& mdp, const OptimalSolution& opt, const Vector& rho) {
  try {
    return visitation_ratio(mdp, opt, rho);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroRhoComponent) return std::nullopt;
    throw;
  }
}

Policy initial_policy(const TabularMdp& mdp, const UpdateRule& rule) {
  if (rule.kind == UpdateRule::Kind::VI) return vi_step(mdp, Vector::Zero(mdp.num_states())).greedy;
  return Policy::uniform(mdp.num_states(), mdp.num_actions());
}

K0Constants k0_constants(const TabularMdp& mdp, const OptimalSolution& opt, double eta) {
  K0Constants c;
  c.gamma = mdp.gamma();
  c.delta = opt.delta;
  c.eta = eta;
  c.mu_tilde = mdp.mu_tilde();
  c.num_actions = mdp.num_actions();
  c.visitation_ratio = rho_ratio(mdp, opt, mdp.mu()).value_or(std::numeric_limits<double>::infinity());
  c.initial_gap_inf = opt.v_star.cwiseAbs().maxCoeff();
  return c;
}

}  // namespace

std::string trace_csv(const TabularMdp& mdp, const RunTrace& trace, const TraceContext& ctx) {
  const bool constant = ctx.schedule.kind == StepSchedule::Kind::Constant;
  const bool ppg_bound = constant && ctx.rule.kind == UpdateRule::Kind::PPG;
  const bool pqa_bound = constant && ctx.rule.kind == UpdateRule::Kind::PQA;
  const bool has_linear = ctx.schedule.kind == StepSchedule::Kind::GeometricIncreasing &&
                          (ctx.rule.kind == UpdateRule::Kind::PPG || ctx.rule.kind == UpdateRule::Kind::PQA);
  const std::optional<double> ratio = ppg_bound ? rho_ratio(mdp, ctx.opt, ctx.rho) : std::nullopt;
  const double gap0 = trace.records.empty() ? 0.0 : trace.records.front().gap_inf;

  std::string out =
      "k,eta,eta_s_min,eta_s_max,value_mu,gap_mu,gap_inf,max_adv_max,b_max,f_min,f_lb_min,f_slack_min,"
      "sublinear_bound,linear_bound,support_min,support_max,is_optimal\n";
  for (const IterationRecord& rec : trace.records) {
    std::string sublinear;
    if (ppg_bound && ratio) {
      sublinear = rec.k == 0 ? format_double(mdp.value_scale())
                             : format_double(sublinear_bound_value(rec.k, mdp.gamma(), *ratio, ctx.schedule.value,
                                                                   mdp.mu_tilde(), mdp.num_actions()));
    } else if (pqa_bound) {
      sublinear = format_double(pqa_sublinear_bound_value(rec.k, mdp.gamma(), ctx.schedule.value));
    }
    const std::string linear =
        has_linear ? format_double(linear_rate_bound(rec.k, mdp.gamma(), ctx.schedule.value, gap0)) : "";
    const auto [smin, smax] = std::minmax_element(rec.support_sizes.begin(), rec.support_sizes.end());
    const double f_slack = (rec.f_s - rec.f_lower_bound).minCoeff();

    out += std::to_string(rec.k);
    for (double x : {rec.eta, rec.eta_s.minCoeff(), rec.eta_s.maxCoeff(), rec.value_mu, rec.gap_mu, rec.gap_inf,
                     rec.max_adv.maxCoeff(), rec.b_max, rec.f_s.minCoeff(), rec.f_lower_bound.minCoeff(), f_slack}) {
      out += ',' + format_double(x);
    }
    out += ',' + sublinear + ',' + linear + ',' + std::to_string(*smin) + ',' + std::to_string(*smax) + ',' +
           (rec.is_optimal ? "1" : "0") + '\n';
  }
  return out;
}

std::string trace_meta_json(const TabularMdp& mdp, const RunTrace& trace, const TraceContext& ctx) {
  using nlohmann::json;
  const auto finite_or_null = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  const double l = smoothness_coefficient(mdp.gamma(), mdp.num_actions());
  const Policy start = initial_policy(mdp, ctx.rule);
  const PiThreshold threshold =
      pi_equivalence_threshold(start, policy_evaluate(mdp, start), argmax_tolerance(mdp.gamma()));

  json meta;
  meta["rule"] = std::string(to_string(ctx.rule.kind));
  meta["schedule"] = std::string(to_string(ctx.schedule.kind));
  meta["schedule_value"] = ctx.schedule.value;
  if (ctx.rule.kind == UpdateRule::Kind::HomotopicPQA) meta["coupling"] = ctx.rule.coupling;
  meta["rho"] = ctx.rho_name;
  meta["num_states"] = mdp.num_states();
  meta["num_actions"] = mdp.num_actions();
  meta["gamma"] = mdp.gamma();
  meta["L"] = l;
  meta["inv_L"] = finite_or_null(1.0 / l);
  meta["delta"] = finite_or_null(ctx.opt.delta);
  meta["F_pi0"] = threshold.f_pi;
  meta["mu_tilde"] = mdp.mu_tilde();
  const std::optional<double> ratio = rho_ratio(mdp, ctx.opt, ctx.rho);
  meta["visitation_ratio_rho"] = ratio ? json(*ratio) : json(nullptr);

  const bool constant = ctx.schedule.kind == StepSchedule::Kind::Constant;
  const K0Constants c = k0_constants(mdp, ctx.opt, ctx.schedule.value);
  json k0 = json::object();
  json k0_raw = json::object();
  const auto put = [&](const char* name, FiniteRule rule) {
    k0[name] = finite_k0(rule, c);
    k0_raw[name] = finite_or_null(finite_k0_raw(rule, c));
  };
  if (constant) {
    put("ppg", FiniteRule::PPG);
    put("pqa", FiniteRule::PQA);
  }
  put("pi", FiniteRule::PI);
  put("vi", FiniteRule::VI);
  meta["k0"] = k0;
  meta["k0_raw"] = k0_raw;
  meta["records"] = trace.records.size();
  const auto first = trace.first_optimal();
  meta["first_optimal"] = first ? json(*first) : json(nullptr);
  meta["terminated_reason"] = std::string(to_string(trace.terminated_reason));
  return meta.dump(2) + "\n";
}

std::filesystem::path meta_path_for(const std::filesystem::path& csv_path) {
  std::filesystem::path out = csv_path;
  out.replace_extension(".meta.json");
  return out;
}

std::vector<SweepRow> sweep(const TabularMdp& mdp, UpdateRule::Kind rule, const std::vector<double>& etas,
                            int iters) {
  if (rule != UpdateRule::Kind::PPG && rule != UpdateRule::Kind::PQA) {
    throw Error(ErrorCode::BadFlag, "sweep supports the ppg and pqa rules only");
  }
  const OptimalSolution opt = solve_optimal(mdp);
  const double l = smoothness_coefficient(mdp.gamma(), mdp.num_actions());
  const std::optional<double> ratio =
      rule == UpdateRule::Kind::PPG ? rho_ratio(mdp, opt, mdp.mu()) : std::nullopt;
  if (rule == UpdateRule::Kind::PPG && !ratio) {
    throw Error(ErrorCode::ZeroRhoComponent, "sweep needs a strictly positive mu for the PPG bound");
  }
  return parallel_map<SweepRow>(etas.size(), [&](std::size_t i) {
    const double eta = etas[i];
    const UpdateRule update = rule == UpdateRule::Kind::PPG ? UpdateRule::ppg() : UpdateRule::pqa();
    const RunTrace trace = run(mdp, update, StepSchedule::constant(eta), iters, true, opt);
    SweepRow row;
    row.eta = eta;
    row.eta_over_inv_l = eta * l;
    row.iters_to_optimal = trace.first_optimal();
    row.min_f_slack = std::numeric_limits<double>::infinity();
    for (const IterationRecord& rec : trace.records) {
      if (rule == UpdateRule::Kind::PPG) {
        if (rec.k >= 1) {
          const double bound =
              sublinear_bound_value(rec.k, mdp.gamma(), *ratio, eta, mdp.mu_tilde(), mdp.num_actions());
          row.max_bound_violation = std::max(row.max_bound_violation, rec.gap_mu - bound);
        }
      } else {
        row.max_bound_violation =
            std::max(row.max_bound_violation, rec.gap_inf - pqa_sublinear_bound_value(rec.k, mdp.gamma(), eta));
      }
      row.min_f_slack = std::min(row.min_f_slack, (rec.f_s - rec.f_lower_bound).minCoeff());
    }
    return row;
  });
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "eta,eta_over_inv_L,iters_to_optimal,max_bound_violation,min_f_slack\n";
  for (const SweepRow& row : rows) {
    out += format_double(row.eta) + ',' + format_double(row.eta_over_inv_l) + ',' +
           (row.iters_to_optimal ? std::to_string(*row.iters_to_optimal) : std::string()) + ',' +
           format_double(row.max_bound_violation) + ',' + format_double(row.min_f_slack) + '\n';
  }
  return out;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Projected policy gradient toolkit for tabular MDPs"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an MDP instance as JSON");
  std::string kind = "random";
  int states = 5;
  int actions = 3;
  double gamma = 0.9;
  double gap = 0.5;
  std::uint64_t seed = 1;
  double sparsity = 0.0;
  std::string gen_out;
  gen->add_option("--kind", kind, "random | bandit | chain")->check(CLI::IsMember({"random", "bandit", "chain"}));
  gen->add_option("--states", states, "Number of states (chain length for --kind chain)");
  gen->add_option("--actions", actions, "Number of actions (random only)");
  gen->add_option("--gamma", gamma, "Discount factor in [0, 1)");
  gen->add_option("--delta", gap, "Reward gap of the bandit");
  gen->add_option("--seed", seed, "Seed of the random generator");
  gen->add_option("--sparsity", sparsity, "Fraction of next states left out per row");
  gen->add_option("--out", gen_out, "Output JSON path")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one algorithm and write a CSV trace");
  std::string mdp_path;
  std::string rule_name = "ppg";
  std::string schedule_name = "constant";
  double eta = 1.0;
  double c0 = 1.0;
  double margin = 1.01;
  std::optional<double> coupling;
  int iters = 1000;
  std::string rho_name = "mu";
  bool stop_on_optimal = false;
  std::string run_out;
  run_cmd->add_option("--mdp", mdp_path, "MDP JSON file")->required();
  run_cmd->add_option("--rule", rule_name, "ppg | pqa | pi | vi | hpqa")
      ->check(CLI::IsMember({"ppg", "pqa", "pi", "vi", "hpqa"}));
  run_cmd->add_option("--schedule", schedule_name, "constant | geometric | adaptive")
      ->check(CLI::IsMember({"constant", "geometric", "adaptive"}));
  run_cmd->add_option("--eta", eta, "Constant step size");
  run_cmd->add_option("--c0", c0, "Geometric schedule constant");
  run_cmd->add_option("--margin", margin, "Adaptive schedule margin (> 1)");
  run_cmd->add_option("--coupling", coupling, "Homotopic coupling 1 + eta*tau (default 1/gamma)");
  run_cmd->add_option("--iters", iters, "Maximum number of iterations");
  run_cmd->add_option("--rho", rho_name, "mu | uniform")->check(CLI::IsMember({"mu", "uniform"}));
  run_cmd->add_flag("--stop-on-optimal", stop_on_optimal, "Stop at the first exactly optimal policy");
  run_cmd->add_option("--out", run_out, "Output CSV path")->required();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run constant step sizes and summarize");
  std::string sweep_mdp;
  std::string sweep_rule = "ppg";
  std::vector<double> etas{0.01, 0.1, 1, 10, 100, 1000};
  int sweep_iters = 1000;
  std::string sweep_out;
  sweep_cmd->add_option("--mdp", sweep_mdp, "MDP JSON file")->required();
  sweep_cmd->add_option("--rule", sweep_rule, "ppg | pqa")->check(CLI::IsMember({"ppg", "pqa"}));
  sweep_cmd->add_option("--etas", etas, "Comma-separated step sizes")->delimiter(',');
  sweep_cmd->add_option("--iters", sweep_iters, "Maximum iterations per run");
  sweep_cmd->add_option("--out", sweep_out, "Output CSV path")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run property suites");
  std::string suite = "all";
  std::uint64_t verify_seed = 1;
  int instances = 0;
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  verify_cmd->add_option("--suite", suite, "Suite name or all")->check(CLI::IsMember(suites));
  verify_cmd->add_option("--seed", verify_seed, "Seed for the random batches");
  verify_cmd->add_option("--instances", instances, "Batch size (0 = suite default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*gen) {
      GeneratorSpec spec;
      if (kind == "random") spec = RandomSpec{seed, states, actions, gamma, sparsity};
      else if (kind == "bandit") spec = BanditSpec{gamma, gap};
      else spec = ChainSpec{states, gamma};
      save_mdp(generate(spec), gen_out);
      return 0;
    }

    if (*run_cmd) {
      const TabularMdp mdp = load_mdp(mdp_path);
      TraceContext ctx;
      const UpdateRule::Kind rule_kind = parse_rule(rule_name);
      ctx.rule.kind = rule_kind;
      if (rule_kind == UpdateRule::Kind::HomotopicPQA) ctx.rule.coupling = coupling.value_or(1.0 / mdp.gamma());
      ctx.schedule.kind = parse_schedule(schedule_name);
      ctx.schedule.value = ctx.schedule.kind == StepSchedule::Kind::Constant             ? eta
                           : ctx.schedule.kind == StepSchedule::Kind::GeometricIncreasing ? c0
                                                                                          : margin;
      ctx.opt = solve_optimal(mdp);
      ctx.rho_name = rho_name;
      ctx.rho = rho_name == "mu" ? mdp.mu() : Vector::Constant(mdp.num_states(), 1.0 / mdp.num_states());
      RunOptions options;
      options.rho = ctx.rho;
      const RunTrace trace = run(mdp, ctx.rule, ctx.schedule, iters, stop_on_optimal, ctx.opt, options);
      write_file(run_out, trace_csv(mdp, trace, ctx));
      write_file(meta_path_for(run_out), trace_meta_json(mdp, trace, ctx));
      return 0;
    }

    if (*sweep_cmd) {
      const TabularMdp mdp = load_mdp(sweep_mdp);
      write_file(sweep_out, sweep_csv(sweep(mdp, parse_rule(sweep_rule), etas, sweep_iters)));
      return 0;
    }

    if (*verify_cmd) {
      VerifyOptions options;
      options.seed = verify_seed;
      options.instances = instances;
      const std::vector<std::string> selected =
          suite == "all" ? suite_names() : std::vector<std::string>{suite};
      bool all_passed = true;
      double total = 0.0;
      for (const std::string& name : selected) {
        const SuiteReport report = run_suite(name, options);
        out << report.format();
        char line[128];
        std::snprintf(line, sizeof(line), "%s  %s  (%.2f s)\n", report.passed() ? "PASS" : "FAIL", name.c_str(),
                      report.seconds);
        out << line << std::flush;
        all_passed = all_passed && report.passed();
        total += report.seconds;
      }
      char line[128];
      std::snprintf(line, sizeof(line), "%s  total (%.2f s)\n", all_passed ? "PASS" : "FAIL", total);
      out << line;
      return all_passed ? 0 : kExitFailure;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace ppgkit
