#pragma once

#include <optional>
#include <vector>

#include "sbm/linalg.hpp"

namespace sbm {

/// Solution of  min sum(lambda)  s.t.  sum_j lambda_j v_j = target, lambda >= 0.
struct MinSumSolution {
  std::vector<double> lambda;
  double sum = 0.0;
};

/// Exact solve by enumerating basic feasible solutions. Intended for a handful of
/// vectors in dimension <= kMaxDim; returns nullopt when the target is not in the
/// cone generated by `vectors`.
std::optional<MinSumSolution> minSumNonnegative(const std::vector<Vec>& vectors, const Vec& target,
                                                double tol = 1e-10);

/// Rank of the matrix whose columns are `vectors`.
int columnRank(const std::vector<Vec>& vectors, double tol = 1e-10);

}  // namespace sbm
