#pragma once

// Euclidean projection onto the probability simplex.

#include <Eigen/Dense>

#include "ppgkit/mdp.hpp"

namespace ppgkit {

/// y = max(p + offset, 0) coordinatewise, summing to the target mass.
struct ProjectionResult {
  Vector point;
  double offset = 0.0;
  ActionSet support;
};

/// Projection of p onto {y >= 0, sum y = 1} by sort-and-threshold, O(n log n).
///
/// Coordinates whose shifted value does not clear a round-off threshold
/// (4 eps max(1, |p|_inf)) are reported outside the support, so exact ties
/// at the truncation point are excluded.  Equal entries are ordered by index.
ProjectionResult project_simplex(const Eigen::Ref<const Vector>& p);

/// Same scheme for the scaled simplex {y >= 0, sum y = mass}, mass > 0.
ProjectionResult project_scaled_simplex(const Eigen::Ref<const Vector>& p, double mass);

/// Gap predicate: sum_{a in B} (p_a - max_{a' in C} p_a')_+ >= 1.  Holds iff
/// the projection of p puts zero mass on every coordinate of C.  B and C must
/// be disjoint, non-empty and cover every coordinate.
bool is_excluded(const Eigen::Ref<const Vector>& p, const ActionSet& b_set, const ActionSet& c_set);

}  // namespace ppgkit
