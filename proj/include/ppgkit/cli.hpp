#pragma once

// Command-line front end: gen, run, sweep and verify subcommands.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ppgkit/run.hpp"

namespace ppgkit {

/// Everything needed to render one run as CSV and metadata.
struct TraceContext {
  UpdateRule rule;
  StepSchedule schedule;
  OptimalSolution opt;
  Vector rho;
  std::string rho_name = "mu";
};

/// Header and one row per record, numbers with 17 significant digits.
std::string trace_csv(const TabularMdp& mdp, const RunTrace& trace, const TraceContext& ctx);

/// JSON object with L, Delta, F^{pi^0}, mu~, the k0 values and run settings.
std::string trace_meta_json(const TabularMdp& mdp, const RunTrace& trace, const TraceContext& ctx);

/// "trace.csv" -> "trace.meta.json".
std::filesystem::path meta_path_for(const std::filesystem::path& csv_path);

struct SweepRow {
  double eta = 0.0;
  double eta_over_inv_l = 0.0;
  std::optional<int> iters_to_optimal;
  double max_bound_violation = 0.0;
  double min_f_slack = 0.0;
};

/// One constant-step run per eta (in parallel), rows in input order.
std::vector<SweepRow> sweep(const TabularMdp& mdp, UpdateRule::Kind rule, const std::vector<double>& etas,
                            int iters);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Exit codes: 0 success, 1 verification failure, 2 usage or runtime error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ppgkit
