#pragma once

// MDP generators and JSON persistence.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include "ppgkit/mdp.hpp"

namespace ppgkit {

struct RandomSpec {
  std::uint64_t seed = 0;
  int num_states = 2;
  int num_actions = 2;
  double gamma = 0.9;
  /// Fraction of next states left out of each transition row, in [0, 1).
  double sparsity = 0.0;
};

/// One state, two self-looping actions with rewards 0.5 +/- delta/2.
struct BanditSpec {
  double gamma = 0.9;
  double delta = 0.5;
};

/// n states on a line, actions {left, right}, reward 1 on landing in the last state.
struct ChainSpec {
  int n = 2;
  double gamma = 0.9;
};

using GeneratorSpec = std::variant<RandomSpec, BanditSpec, ChainSpec>;

TabularMdp generate(const GeneratorSpec& spec);

/// Counter-based generator: the k-th draw of stream (seed, stream) is a pure
/// function of (seed, stream, k).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in (0, 1].
  double uniform_open_low();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// {"num_states", "num_actions", "gamma", "mu", "P", "r"}, numbers with 17 significant digits.
std::string mdp_to_json(const TabularMdp& mdp);
/// Parses and validates; throws ParseError naming the field or ValidationFailed.
TabularMdp mdp_from_json(const std::string& text);

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path);
TabularMdp load_mdp(const std::filesystem::path& path);

/// Shortest-independent, locale-free "%.17g" formatting.
std::string format_double(double x);

}  // namespace ppgkit
