#include "sbm/small_lp.hpp"

#include <cmath>

#include "sbm/error.hpp"

namespace sbm {

namespace {

using DynMat = Eigen::MatrixXd;

DynMat columns(const std::vector<Vec>& vectors, unsigned mask) {
  const Eigen::Index rows = vectors.front().size();
  Eigen::Index cols = 0;
  for (std::size_t j = 0; j < vectors.size(); ++j) cols += (mask >> j) & 1U;
  DynMat m(rows, cols);
  Eigen::Index c = 0;
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if ((mask >> j) & 1U) m.col(c++) = vectors[j];
  }
  return m;
}

}  // namespace

int columnRank(const std::vector<Vec>& vectors, double tol) {
  if (vectors.empty()) return 0;
  Eigen::FullPivLU<DynMat> lu(columns(vectors, (1U << vectors.size()) - 1U));
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

std::optional<MinSumSolution> minSumNonnegative(const std::vector<Vec>& vectors, const Vec& target,
                                                double tol) {
  if (vectors.empty() || vectors.size() > 16) throw InvalidInput("need between 1 and 16 vectors");
  for (const auto& v : vectors) {
    if (v.size() != target.size()) throw InvalidInput("vector dimension mismatch");
    if (!v.allFinite()) throw InvalidInput("non-finite vector");
  }
  if (!target.allFinite()) throw InvalidInput("non-finite target");

  const double scale = std::max(1.0, target.lpNorm<Eigen::Infinity>());
  std::optional<MinSumSolution> best;
  if (target.lpNorm<Eigen::Infinity>() <= tol) {
    return MinSumSolution{std::vector<double>(vectors.size(), 0.0), 0.0};
  }

  const unsigned subsets = 1U << vectors.size();
  for (unsigned mask = 1; mask < subsets; ++mask) {
    const DynMat basis = columns(vectors, mask);
    if (basis.cols() > basis.rows()) continue;
    Eigen::ColPivHouseholderQR<DynMat> qr(basis);
    qr.setThreshold(tol);
    if (qr.rank() < basis.cols()) continue;  // not a basis
    const Eigen::VectorXd coef = qr.solve(Eigen::VectorXd(target));
    if ((basis * coef - Eigen::VectorXd(target)).lpNorm<Eigen::Infinity>() > tol * scale * 10.0) {
      continue;
    }
    if (coef.minCoeff() < -tol * scale) continue;

    MinSumSolution sol;
    sol.lambda.assign(vectors.size(), 0.0);
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      if ((mask >> j) & 1U) sol.lambda[j] = std::max(0.0, coef[c++]);
    }
    for (double l : sol.lambda) sol.sum += l;
    if (!best || sol.sum < best->sum - 1e-15) best = std::move(sol);
  }
  return best;
}

}  // namespace sbm
