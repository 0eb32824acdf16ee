#include "ppgkit/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ppgkit::oracle {

Eigen::VectorXd brute_force_projection(const Eigen::VectorXd& p) {
  const int n = static_cast<int>(p.size());
  if (n < 1 || n > 20) throw std::invalid_argument("brute_force_projection: dimension out of range");
  Eigen::VectorXd best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    // On support B the KKT point is y_B = p_B + (1 - sum p_B)/|B|, zero elsewhere.
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        sum += p(i);
        ++count;
      }
    }
    const double shift = (1.0 - sum) / count;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    bool feasible = true;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        y(i) = p(i) + shift;
        if (y(i) < 0.0) feasible = false;
      }
    }
    if (!feasible) continue;
    const double dist = (y - p).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = y;
    }
  }
  return best;
}

Eigen::VectorXd value_iteration(int num_states, int num_actions, const double* transition,
                                const double* reward, double gamma, double tol, int max_iters) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(num_states);
  Eigen::VectorXd next(num_states);
  for (int it = 0; it < max_iters; ++it) {
    for (int s = 0; s < num_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < num_actions; ++a) {
        double q = 0.0;
        const std::size_t base = (static_cast<std::size_t>(s) * num_actions + a) * num_states;
        for (int n = 0; n < num_states; ++n) q += transition[base + n] * (reward[base + n] + gamma * v(n));
        best = std::max(best, q);
      }
      next(s) = best;
    }
    const double residual = (next - v).cwiseAbs().maxCoeff();
    v.swap(next);
    if (residual * gamma / (1.0 - gamma) <= tol || residual == 0.0) return v;
  }
  throw std::runtime_error("value_iteration: no convergence");
}

}  // namespace ppgkit::oracle
