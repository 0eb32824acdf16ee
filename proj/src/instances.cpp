#include "ppgkit/instances.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace ppgkit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::BadSpec, message);
}

TabularMdp generate_random(const RandomSpec& spec) {
  require(spec.num_states >= 1 && spec.num_actions >= 1, "random: |S| and |A| must be positive");
  require(spec.gamma >= 0.0 && spec.gamma < 1.0, "random: gamma must lie in [0, 1)");
  require(spec.sparsity >= 0.0 && spec.sparsity < 1.0, "random: sparsity must lie in [0, 1)");
  const int ns = spec.num_states;
  const int na = spec.num_actions;
  const auto row_support =
      static_cast<int>(std::ceil((1.0 - spec.sparsity) * static_cast<double>(ns) - 1e-12));
  const int support_size = std::clamp(row_support, 1, ns);

  std::vector<double> transition(static_cast<std::size_t>(ns) * na * ns, 0.0);
  std::vector<double> reward(transition.size(), 0.0);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      CounterRng rng(spec.seed, static_cast<std::uint64_t>(s) * na + a);
      const std::size_t base = (static_cast<std::size_t>(s) * na + a) * ns;

      // Random support: first support_size entries of a Fisher-Yates shuffle.
      std::vector<int> states(static_cast<std::size_t>(ns));
      std::iota(states.begin(), states.end(), 0);
      for (int i = 0; i < support_size; ++i) {
        const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(ns - i)));
        std::swap(states[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(j)]);
      }
      // Symmetric Dirichlet(1): normalised exponential variates.
      double total = 0.0;
      for (int i = 0; i < support_size; ++i) {
        const double e = -std::log(rng.uniform_open_low());
        transition[base + static_cast<std::size_t>(states[static_cast<std::size_t>(i)])] = e;
        total += e;
      }
      if (total <= 0.0) {
        transition[base + static_cast<std::size_t>(states[0])] = 1.0;
        total = 1.0;
      }
      for (int n = 0; n < ns; ++n) transition[base + static_cast<std::size_t>(n)] /= total;
      for (int n = 0; n < ns; ++n) reward[base + static_cast<std::size_t>(n)] = rng.uniform();
    }
  }
  return TabularMdp(ns, na, std::move(transition), std::move(reward), spec.gamma,
                    Vector::Constant(ns, 1.0 / ns));
}

TabularMdp generate_bandit(const BanditSpec& spec) {
  require(spec.gamma >= 0.0 && spec.gamma < 1.0, "bandit: gamma must lie in [0, 1)");
  require(spec.delta > 0.0 && spec.delta <= 1.0, "bandit: delta must lie in (0, 1]");
  std::vector<double> transition{1.0, 1.0};
  std::vector<double> reward{0.5 + spec.delta / 2.0, 0.5 - spec.delta / 2.0};
  return TabularMdp(1, 2, std::move(transition), std::move(reward), spec.gamma, Vector::Ones(1));
}

TabularMdp generate_chain(const ChainSpec& spec) {
  require(spec.n >= 1, "chain: n must be positive");
  require(spec.gamma >= 0.0 && spec.gamma < 1.0, "chain: gamma must lie in [0, 1)");
  const int ns = spec.n;
  constexpr int na = 2;  // 0 = left, 1 = right
  std::vector<double> transition(static_cast<std::size_t>(ns) * na * ns, 0.0);
  std::vector<double> reward(transition.size(), 0.0);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      const int next = a == 0 ? std::max(s - 1, 0) : std::min(s + 1, ns - 1);
      const std::size_t idx = (static_cast<std::size_t>(s) * na + a) * ns + static_cast<std::size_t>(next);
      transition[idx] = 1.0;
      if (next == ns - 1) reward[idx] = 1.0;
    }
  }
  return TabularMdp(ns, na, std::move(transition), std::move(reward), spec.gamma,
                    Vector::Constant(ns, 1.0 / ns));
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream + 0xD1B54A32D192ED03ULL))) {}

std::uint64_t CounterRng::next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::uniform_open_low() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

std::uint64_t CounterRng::below(std::uint64_t bound) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % bound;
}

TabularMdp generate(const GeneratorSpec& spec) {
  TabularMdp mdp = std::visit(
      [](const auto& s) -> TabularMdp {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RandomSpec>) return generate_random(s);
        else if constexpr (std::is_same_v<T, BanditSpec>) return generate_bandit(s);
        else return generate_chain(s);
      },
      spec);
  const ValidationReport report = validate_mdp(mdp);
  if (!report.ok()) throw Error(ErrorCode::BadSpec, "generated MDP is invalid:\n" + report.describe());
  return mdp;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string mdp_to_json(const TabularMdp& mdp) {
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  std::string out;
  out += "{\n  \"num_states\": " + std::to_string(ns) + ",\n";
  out += "  \"num_actions\": " + std::to_string(na) + ",\n";
  out += "  \"gamma\": " + format_double(mdp.gamma()) + ",\n";
  out += "  \"mu\": [";
  for (int s = 0; s < ns; ++s) out += (s ? ", " : "") + format_double(mdp.mu()(s));
  out += "],\n";
  const auto tensor = [&](const char* name, auto&& get) {
    out += std::string("  \"") + name + "\": [";
    for (int s = 0; s < ns; ++s) {
      out += s ? ",\n    [" : "\n    [";
      for (int a = 0; a < na; ++a) {
        out += a ? ", [" : "[";
        for (int n = 0; n < ns; ++n) out += (n ? ", " : "") + format_double(get(s, a, n));
        out += "]";
      }
      out += "]";
    }
    out += "\n  ]";
  };
  tensor("P", [&](int s, int a, int n) { return mdp.p(s, a, n); });
  out += ",\n";
  tensor("r", [&](int s, int a, int n) { return mdp.r(s, a, n); });
  out += "\n}\n";
  return out;
}

namespace {

const nlohmann::json& field(const nlohmann::json& doc, const char* name) {
  if (!doc.contains(name)) throw Error(ErrorCode::ParseError, std::string("missing field \"") + name + "\"");
  return doc.at(name);
}

double number(const nlohmann::json& x, const std::string& where) {
  if (!x.is_number()) throw Error(ErrorCode::ParseError, "expected a number at " + where);
  return x.get<double>();
}

std::vector<double> read_tensor(const nlohmann::json& doc, const char* name, int ns, int na) {
  const auto& t = field(doc, name);
  const std::string where(name);
  if (!t.is_array() || static_cast<int>(t.size()) != ns) {
    throw Error(ErrorCode::ParseError, where + " must be an array of |S| entries");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(ns) * na * ns);
  for (int s = 0; s < ns; ++s) {
    const auto& per_action = t[static_cast<std::size_t>(s)];
    if (!per_action.is_array() || static_cast<int>(per_action.size()) != na) {
      throw Error(ErrorCode::ParseError, where + "[" + std::to_string(s) + "] must have |A| entries");
    }
    for (int a = 0; a < na; ++a) {
      const auto& row = per_action[static_cast<std::size_t>(a)];
      if (!row.is_array() || static_cast<int>(row.size()) != ns) {
        throw Error(ErrorCode::ParseError,
                    where + "[" + std::to_string(s) + "][" + std::to_string(a) + "] must have |S| entries");
      }
      for (int n = 0; n < ns; ++n) out.push_back(number(row[static_cast<std::size_t>(n)], where));
    }
  }
  return out;
}

}  // namespace

TabularMdp mdp_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "top level must be an object");
  const auto& ns_field = field(doc, "num_states");
  const auto& na_field = field(doc, "num_actions");
  if (!ns_field.is_number_integer() || !na_field.is_number_integer()) {
    throw Error(ErrorCode::ParseError, "num_states and num_actions must be integers");
  }
  const int ns = ns_field.get<int>();
  const int na = na_field.get<int>();
  if (ns <= 0 || na <= 0) throw Error(ErrorCode::ParseError, "num_states and num_actions must be positive");
  const double gamma = number(field(doc, "gamma"), "gamma");
  const auto& mu_field = field(doc, "mu");
  if (!mu_field.is_array() || static_cast<int>(mu_field.size()) != ns) {
    throw Error(ErrorCode::ParseError, "mu must be an array of |S| numbers");
  }
  Vector mu(ns);
  for (int s = 0; s < ns; ++s) mu(s) = number(mu_field[static_cast<std::size_t>(s)], "mu");
  std::vector<double> transition = read_tensor(doc, "P", ns, na);
  std::vector<double> reward = read_tensor(doc, "r", ns, na);

  TabularMdp mdp(ns, na, std::move(transition), std::move(reward), gamma, std::move(mu));
  const ValidationReport report = validate_mdp(mdp);
  if (!report.ok()) {
    throw Error(ErrorCode::ValidationFailed,
                std::string(to_string(report.violations.front().code)) + "\n" + report.describe());
  }
  return mdp;
}

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << mdp_to_json(mdp);
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

TabularMdp load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return mdp_from_json(buffer.str());
}

}  // namespace ppgkit
