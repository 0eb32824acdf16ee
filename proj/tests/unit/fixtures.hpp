#pragma once

#include <vector>

#include "ppgkit/instances.hpp"
#include "ppgkit/mdp.hpp"

namespace ppgkit::testing {

/// One state, two self-looping actions with rewards (0.75, 0.25).
inline TabularMdp bandit(double gamma = 0.9) { return generate(BanditSpec{gamma, 0.5}); }

/// Two states, two actions, dense transitions.
inline TabularMdp two_state(double gamma = 0.9) {
  std::vector<double> p{0.7, 0.3, 0.2, 0.8,   // s0: a0, a1
                        0.5, 0.5, 0.9, 0.1};  // s1: a0, a1
  std::vector<double> r{0.1, 0.9, 0.4, 0.6,
                        1.0, 0.0, 0.3, 0.2};
  Vector mu(2);
  mu << 0.4, 0.6;
  return TabularMdp(2, 2, std::move(p), std::move(r), gamma, mu);
}

inline TabularMdp zero_reward(int ns, int na, double gamma = 0.9) {
  const auto size = static_cast<std::size_t>(ns) * na * ns;
  std::vector<double> p(size, 1.0 / ns);
  return TabularMdp(ns, na, std::move(p), std::vector<double>(size, 0.0), gamma, Vector::Constant(ns, 1.0 / ns));
}

inline Policy row_policy(std::initializer_list<double> row) {
  Matrix m(1, static_cast<Eigen::Index>(row.size()));
  Eigen::Index i = 0;
  for (double x : row) m(0, i++) = x;
  return Policy(std::move(m));
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace ppgkit::testing
