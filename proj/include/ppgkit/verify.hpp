#pragma once

// Property suites that check the library's invariants and convergence bounds on
// randomized instance batches.  Each property reports a pass/fail verdict and the
// worst slack observed (rhs - lhs of the checked inequality).

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ppgkit/instances.hpp"

namespace ppgkit {

struct PropertyResult {
  std::string name;
  std::int64_t checks = 0;
  std::int64_t failures = 0;
  /// Smallest slack seen; +inf when the property is purely boolean.
  double worst_slack;
  /// Failures are slack < -tolerance.
  double tolerance = 0.0;
  std::string note;

  explicit PropertyResult(std::string n = {}, double tol = 0.0);

  bool passed() const { return failures == 0 && checks > 0; }
  /// Counts one check of an inequality with the given slack.
  void record(double slack);
  /// Counts one exact (boolean) check.
  void record_exact(bool ok);
  void merge(const PropertyResult& other);
};

struct SuiteReport {
  std::string suite;
  std::vector<PropertyResult> properties;
  double seconds = 0.0;

  bool passed() const;
  /// "PASS|FAIL  suite/property  checks=..  worst_slack=..", one line per property.
  std::string format() const;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  /// Batch size; 0 selects the suite default.
  int instances = 0;
};

/// Suite names accepted by run_suite, excluding "all".
const std::vector<std::string>& suite_names();

/// Runs one named suite ("all" is handled by the caller).  Throws BadFlag on unknown names.
SuiteReport run_suite(std::string_view name, const VerifyOptions& options);

/// Random instances used by the convergence suites: for i in [0, count), seed + i,
/// |S| in [2, 6], |A| in [2, 4], gamma cycling through {0.8, 0.9, 0.95}, no sparsity.
std::vector<RandomSpec> benchmark_specs(std::uint64_t seed, int count);

SuiteReport verify_projection(const VerifyOptions& options);
SuiteReport verify_lemmas(const VerifyOptions& options);
SuiteReport verify_improvement(const VerifyOptions& options);
SuiteReport verify_sublinear(const VerifyOptions& options);
/// PPG and PQA finite termination plus the one-step optimality conditions.
SuiteReport verify_finite(const VerifyOptions& options);
SuiteReport verify_pi_vi(const VerifyOptions& options);
SuiteReport verify_linear(const VerifyOptions& options);
SuiteReport verify_pi_equivalence(const VerifyOptions& options);
SuiteReport verify_homotopic(const VerifyOptions& options);

}  // namespace ppgkit
