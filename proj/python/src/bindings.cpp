#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ppgkit/diagnostics.hpp"
#include "ppgkit/instances.hpp"
#include "ppgkit/policy_opt.hpp"
#include "ppgkit/run.hpp"
#include "ppgkit/simplex.hpp"
#include "ppgkit/verify.hpp"

namespace py = pybind11;
using namespace ppgkit;

namespace {

// Tensors cross the boundary as C-contiguous (S, A, S) arrays.
using Tensor = py::array_t<double, py::array::c_style | py::array::forcecast>;

TabularMdp make_mdp(const Tensor& transition, const Tensor& reward, double gamma, const Vector& mu) {
  if (transition.ndim() != 3 || reward.ndim() != 3) {
    throw Error(ErrorCode::DimensionMismatch, "P and r must be 3-d arrays of shape (S, A, S)");
  }
  const auto ns = static_cast<int>(transition.shape(0));
  const auto na = static_cast<int>(transition.shape(1));
  if (transition.shape(2) != ns) throw Error(ErrorCode::DimensionMismatch, "P must have shape (S, A, S)");
  std::vector<double> p(transition.data(), transition.data() + transition.size());
  std::vector<double> r(reward.data(), reward.data() + reward.size());
  TabularMdp mdp(ns, na, std::move(p), std::move(r), gamma, mu);
  const ValidationReport report = validate_mdp(mdp);
  if (!report.ok()) throw Error(report.violations.front().code, report.describe());
  return mdp;
}

Tensor tensor_of(const TabularMdp& mdp, const std::vector<double>& flat) {
  Tensor out({mdp.num_states(), mdp.num_actions(), mdp.num_states()});
  std::copy(flat.begin(), flat.end(), out.mutable_data());
  return out;
}

UpdateRule rule_from(const std::string& name, double coupling, const std::optional<Matrix>& anchor) {
  if (name == "ppg") return UpdateRule::ppg();
  if (name == "pqa") return UpdateRule::pqa();
  if (name == "pi") return UpdateRule::pi();
  if (name == "vi") return UpdateRule::vi();
  if (name == "hpqa") return UpdateRule::homotopic_pqa(coupling, anchor ? Policy(*anchor) : Policy{});
  throw Error(ErrorCode::BadFlag, "unknown rule '" + name + "'");
}

StepSchedule schedule_from(const std::string& name, double value) {
  if (name == "constant") return StepSchedule::constant(value);
  if (name == "geometric") return StepSchedule::geometric(value);
  if (name == "adaptive") return StepSchedule::adaptive(value);
  throw Error(ErrorCode::BadFlag, "unknown schedule '" + name + "'");
}

FiniteRule finite_rule_from(const std::string& name) {
  if (name == "ppg") return FiniteRule::PPG;
  if (name == "pqa") return FiniteRule::PQA;
  if (name == "pi") return FiniteRule::PI;
  if (name == "vi") return FiniteRule::VI;
  throw Error(ErrorCode::BadFlag, "unknown rule '" + name + "'");
}

py::dict step_dict(const PolicyStep& step) {
  py::dict d;
  d["policy"] = step.policy.probs();
  d["eta_s"] = step.eta_s;
  d["supports"] = step.supports;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tabular MDP policy optimisation: projected updates, exact evaluation, bound diagnostics.";

  static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      py::set_error(error_type, exc);
    }
  });

  py::class_<TabularMdp>(m, "Mdp")
      .def(py::init(&make_mdp), py::arg("P"), py::arg("r"), py::arg("gamma"), py::arg("mu"),
           "Build and validate an MDP from (S, A, S) transition and reward arrays.")
      .def_property_readonly("num_states", &TabularMdp::num_states)
      .def_property_readonly("num_actions", &TabularMdp::num_actions)
      .def_property_readonly("gamma", &TabularMdp::gamma)
      .def_property_readonly("mu", &TabularMdp::mu)
      .def_property_readonly("P", [](const TabularMdp& x) { return tensor_of(x, x.transition()); })
      .def_property_readonly("r", [](const TabularMdp& x) { return tensor_of(x, x.reward()); })
      .def_property_readonly("expected_reward", &TabularMdp::expected_reward)
      .def("to_json", &mdp_to_json)
      .def_static("from_json", &mdp_from_json)
      .def("save", [](const TabularMdp& x, const std::string& path) { save_mdp(x, path); })
      .def_static("load", [](const std::string& path) { return load_mdp(path); });

  m.def("random_mdp", [](std::uint64_t seed, int states, int actions, double gamma, double sparsity) {
    return generate(RandomSpec{seed, states, actions, gamma, sparsity});
  }, py::arg("seed"), py::arg("states") = 2, py::arg("actions") = 2, py::arg("gamma") = 0.9,
     py::arg("sparsity") = 0.0);
  m.def("bandit", [](double gamma, double delta) { return generate(BanditSpec{gamma, delta}); },
        py::arg("gamma") = 0.9, py::arg("delta") = 0.5);
  m.def("chain", [](int n, double gamma) { return generate(ChainSpec{n, gamma}); },
        py::arg("n") = 2, py::arg("gamma") = 0.9);

  m.def("evaluate", [](const TabularMdp& mdp, const Matrix& policy) {
    const ValueBundle b = policy_evaluate(mdp, Policy(policy));
    py::dict d;
    d["v"] = b.v;
    d["q"] = b.q;
    d["adv"] = b.adv;
    d["visitation"] = b.visitation;
    return d;
  }, py::arg("mdp"), py::arg("policy"), "Exact V, Q, advantage and mu-visitation of a policy.");

  m.def("project_simplex", [](const Vector& p, double mass) {
    const ProjectionResult r = mass == 1.0 ? project_simplex(p) : project_scaled_simplex(p, mass);
    return py::make_tuple(r.point, r.offset, r.support);
  }, py::arg("p"), py::arg("mass") = 1.0, "Returns (point, offset, support).");

  m.def("ppg_step", [](const TabularMdp& mdp, const Matrix& policy, double eta) {
    return step_dict(ppg_step(mdp, Policy(policy), eta));
  }, py::arg("mdp"), py::arg("policy"), py::arg("eta"));
  m.def("pqa_step", [](const TabularMdp& mdp, const Matrix& policy, double eta) {
    return step_dict(pqa_step(mdp, Policy(policy), eta));
  }, py::arg("mdp"), py::arg("policy"), py::arg("eta"));
  m.def("homotopic_pqa_step",
        [](const TabularMdp& mdp, const Matrix& policy, const Matrix& anchor, double eta, double coupling) {
          return step_dict(homotopic_pqa_step(mdp, Policy(policy), Policy(anchor), eta, coupling));
        },
        py::arg("mdp"), py::arg("policy"), py::arg("anchor"), py::arg("eta"), py::arg("coupling"));
  m.def("pi_step", [](const TabularMdp& mdp, const Matrix& policy) {
    return pi_step(mdp, Policy(policy)).probs();
  }, py::arg("mdp"), py::arg("policy"));

  m.def("solve_optimal", [](const TabularMdp& mdp) {
    const OptimalSolution opt = solve_optimal(mdp);
    py::dict d;
    d["v_star"] = opt.v_star;
    d["q_star"] = opt.q_star;
    d["optimal_sets"] = opt.optimal_sets;
    d["delta"] = opt.delta;
    d["policy"] = opt.reference_policy.probs();
    return d;
  }, py::arg("mdp"));

  m.def("finite_k0", [](const std::string& rule, double gamma, double delta, double eta, double mu_tilde,
                        double ratio, int num_actions, double initial_gap_inf) {
    K0Constants c;
    c.gamma = gamma;
    c.delta = delta;
    c.eta = eta;
    c.mu_tilde = mu_tilde;
    c.visitation_ratio = ratio;
    c.num_actions = num_actions;
    c.initial_gap_inf = initial_gap_inf;
    const FiniteRule r = finite_rule_from(rule);
    return py::make_tuple(finite_k0(r, c), finite_k0_raw(r, c));
  }, py::arg("rule"), py::arg("gamma"), py::arg("delta"), py::arg("eta") = 1.0, py::arg("mu_tilde") = 1.0,
     py::arg("ratio") = 1.0, py::arg("num_actions") = 1, py::arg("initial_gap_inf") = 0.0, "Returns (k0, raw bound before the ceiling).");

  m.def("run",
        [](const TabularMdp& mdp, const std::string& rule, double eta, int iters, const std::string& schedule,
           double coupling, std::optional<Matrix> anchor, bool stop_on_optimal) {
          const RunTrace trace = run(mdp, rule_from(rule, coupling, anchor), schedule_from(schedule, eta), iters,
                                     stop_on_optimal);
          py::list records;
          for (const IterationRecord& rec : trace.records) {
            py::dict d;
            d["k"] = rec.k;
            d["eta"] = rec.eta;
            d["value_mu"] = rec.value_mu;
            d["gap_mu"] = rec.gap_mu;
            d["gap_inf"] = rec.gap_inf;
            d["b_max"] = rec.b_max;
            d["is_optimal"] = rec.is_optimal;
            records.append(d);
          }
          py::dict out;
          out["records"] = records;
          out["policy"] = trace.terminal_policy.probs();
          out["terminated_reason"] = std::string(to_string(trace.terminated_reason));
          out["first_optimal"] = trace.first_optimal();
          return out;
        },
        py::arg("mdp"), py::arg("rule"), py::arg("eta") = 1.0, py::arg("iters") = 100,
        py::arg("schedule") = "constant", py::arg("coupling") = 2.0, py::arg("anchor") = py::none(),
        py::arg("stop_on_optimal") = false);

  m.def("suite_names", &suite_names);
  m.def("verify", [](const std::string& suite, std::uint64_t seed, int instances) {
    VerifyOptions o;
    o.seed = seed;
    o.instances = instances;
    SuiteReport report;
    {
      py::gil_scoped_release release;
      report = run_suite(suite, o);
    }
    return py::make_tuple(report.passed(), report.format());
  }, py::arg("suite"), py::arg("seed") = 1, py::arg("instances") = 0,
     "Runs one verification suite; returns (passed, report text).");
}
