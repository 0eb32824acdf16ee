#pragma once

// Slow, independent reference implementations used to cross-check the main code.

#include <Eigen/Dense>

namespace ppgkit::oracle {

/// Simplex projection by enumerating every non-empty support set and keeping the
/// feasible candidate closest to p.  Exponential in dimension; meant for n <= 10.
Eigen::VectorXd brute_force_projection(const Eigen::VectorXd& p);

/// Value iteration on flat [s][a][s'] tensors until the sup-norm residual is below tol.
Eigen::VectorXd value_iteration(int num_states, int num_actions, const double* transition,
                                const double* reward, double gamma, double tol = 1e-12,
                                int max_iters = 10'000'000);

}  // namespace ppgkit::oracle
