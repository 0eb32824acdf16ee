// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "ppgkit/diagnostics.hpp"
#include "ppgkit/verify.hpp"

#ifndef PPGKIT_CLI_PATH
#define PPGKIT_CLI_PATH "ppgkit"
#endif

using namespace ppgkit;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string failing_properties(const SuiteReport& report) {
  std::string out;
  for (const auto& p : report.properties) {
    if (!p.passed()) out += " " + report.suite + "/" + p.name;
  }
  return out;
}

std::string worst_slack(const SuiteReport& report) {
  double worst = std::numeric_limits<double>::infinity();
  std::int64_t checks = 0;
  for (const auto& p : report.properties) {
    worst = std::min(worst, p.worst_slack);
    checks += p.checks;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%lld checks, worst slack %.2e", static_cast<long long>(checks), worst);
  return buf;
}

Outcome suite_outcome(const std::vector<SuiteReport>& reports, double limit_seconds) {
  Outcome o;
  o.passed = true;
  double seconds = 0.0;
  std::string failures;
  std::string summary;
  for (const auto& r : reports) {
    o.passed = o.passed && r.passed();
    seconds += r.seconds;
    failures += failing_properties(r);
    summary += (summary.empty() ? "" : "; ") + worst_slack(r);
  }
  const bool fast = seconds < limit_seconds;
  o.passed = o.passed && fast;
  char buf[128];
  std::snprintf(buf, sizeof(buf), ", %.2f s (limit %.0f s)", seconds, limit_seconds);
  o.detail = summary + buf + (failures.empty() ? "" : ", failing:" + failures) + (fast ? "" : ", too slow");
  return o;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int shell(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const std::string cli = PPGKIT_CLI_PATH;
  const auto dir = std::filesystem::temp_directory_path() / "ppgkit_acceptance";
  std::filesystem::create_directories(dir);
  const std::string mdp = (dir / "mdp.json").string();
  Outcome o;
  if (shell(cli + " gen --kind random --states 6 --actions 4 --gamma 0.95 --seed 17 --out " + mdp) != 0) {
    o.detail = "gen failed";
    return o;
  }
  o.passed = true;
  int compared = 0;
  for (const char* rule : {"ppg", "pqa", "pi", "vi", "hpqa"}) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      const std::string out = (dir / ("trace_" + std::string(rule) + std::to_string(rep) + ".csv")).string();
      const int code = shell(cli + " run --mdp " + mdp + " --rule " + rule + " --eta 0.5 --iters 300 --out " + out);
      const std::string csv = slurp(out);
      if (code != 0 || csv.empty()) {
        o.passed = false;
        o.detail += std::string(" run ") + rule + " failed;";
      } else if (rep == 0) {
        first = csv;
      } else if (csv != first) {
        o.passed = false;
        o.detail += std::string(" ") + rule + " differs;";
      }
    }
    ++compared;
  }
  const auto start = std::chrono::steady_clock::now();
  const int code = shell(cli + " verify --suite all > " + (dir / "verify_all.txt").string());
  const double secs = seconds_since(start);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d rules bit-identical across two runs; verify --suite all exit %d in %.2f s (limit 600 s)",
                compared, code, secs);
  o.passed = o.passed && code == 0 && secs < 600.0;
  o.detail = buf + o.detail;
  return o;
}

Outcome pi_vi() {
  VerifyOptions options;
  options.seed = 1;
  options.instances = 20;
  const SuiteReport report = verify_pi_vi(options);
  K0Constants c;
  c.gamma = 0.9;
  c.delta = 0.5;
  const std::int64_t example = finite_k0(FiniteRule::PI, c);
  Outcome o = suite_outcome({report}, 30.0);
  o.passed = o.passed && example == 41;
  o.detail += ", PI bound at gamma=0.9, Delta=0.5 is " + std::to_string(example);
  return o;
}

}  // namespace

int main() {
  VerifyOptions seed1;
  seed1.seed = 1;
  const auto with_count = [](int n) {
    VerifyOptions o;
    o.seed = 1;
    o.instances = n;
    return o;
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 projection oracle (1e4 vectors, dim <= 6)",
       [&] { return suite_outcome({verify_projection(with_count(10000))}, 5.0); }},
      {"2 lemma suite (500 samples)", [&] { return suite_outcome({verify_lemmas(with_count(500))}, 30.0); }},
      {"3 improvement theorem (same sweep)",
       [&] { return suite_outcome({verify_improvement(with_count(500))}, 30.0); }},
      {"4 sublinear bound (20 MDPs x 5 steps x 2000 iterations)",
       [&] { return suite_outcome({verify_sublinear(with_count(20))}, 120.0); }},
      {"5 finite convergence of PPG and PQA", [&] { return suite_outcome({verify_finite(with_count(20))}, 180.0); }},
      {"6 PI and VI bounds", [&] { return pi_vi(); }},
      {"7 linear rate under the geometric schedule",
       [&] { return suite_outcome({verify_linear(with_count(5))}, 30.0); }},
      {"8 PI equivalence above F^pi (200 pairs)",
       [&] { return suite_outcome({verify_pi_equivalence(with_count(200))}, 30.0); }},
      {"9 homotopic bandit counterexample", [&] { return suite_outcome({verify_homotopic(seed1)}, 1.0); }},
      {"10 determinism and full verify", [&] { return determinism(); }},
  };

  bool all = true;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s  criterion %s: %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    all = all && o.passed;
  }
  std::printf("%s  acceptance\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
