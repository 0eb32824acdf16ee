#include "ppgkit/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ppgkit {

ProjectionResult project_scaled_simplex(const Eigen::Ref<const Vector>& p, double mass) {
  const auto n = p.size();
  if (n == 0) throw Error(ErrorCode::EmptyVector, "cannot project an empty vector");
  if (!p.allFinite()) throw Error(ErrorCode::NonFiniteAdvantage, "projection input is not finite");
  if (!(mass > 0.0)) throw Error(ErrorCode::BadSpec, "target mass must be positive");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return p(x) > p(y); });

  const double threshold =
      4.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, mass, p.cwiseAbs().maxCoeff()});

  // The admissible support sizes form a prefix of the sorted order; keep the largest.
  double prefix = 0.0;
  double offset = mass - p(order[0]);
  std::size_t count = 1;
  for (std::size_t k = 0; k < order.size(); ++k) {
    prefix += p(order[k]);
    const double candidate = (mass - prefix) / static_cast<double>(k + 1);
    if (p(order[k]) + candidate > threshold) {
      offset = candidate;
      count = k + 1;
    } else {
      break;
    }
  }

  ProjectionResult out;
  out.offset = offset;
  out.point = Vector::Zero(n);
  out.support.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.support.begin(), out.support.end());
  double total = 0.0;
  for (int a : out.support) {
    out.point(a) = p(a) + offset;
    total += out.point(a);
  }
  if (count == 1) {
    out.point(out.support.front()) = mass;
  } else {
    out.point *= mass / total;
  }
  return out;
}

ProjectionResult project_simplex(const Eigen::Ref<const Vector>& p) {
  return project_scaled_simplex(p, 1.0);
}

bool is_excluded(const Eigen::Ref<const Vector>& p, const ActionSet& b_set, const ActionSet& c_set) {
  const auto n = static_cast<std::size_t>(p.size());
  if (b_set.empty() || c_set.empty()) throw Error(ErrorCode::BadPartition, "B and C must be non-empty");
  std::vector<int> seen(n, 0);
  for (const auto* set : {&b_set, &c_set}) {
    for (int a : *set) {
      if (a < 0 || static_cast<std::size_t>(a) >= n) {
        throw Error(ErrorCode::BadPartition, "coordinate out of range");
      }
      if (seen[static_cast<std::size_t>(a)]++) throw Error(ErrorCode::BadPartition, "B and C overlap");
    }
  }
  if (b_set.size() + c_set.size() != n) throw Error(ErrorCode::BadPartition, "B and C do not cover p");

  double c_max = -std::numeric_limits<double>::infinity();
  for (int a : c_set) c_max = std::max(c_max, p(a));
  double gap = 0.0;
  for (int a : b_set) gap += std::max(p(a) - c_max, 0.0);
  return gap >= 1.0;
}

}  // namespace ppgkit
