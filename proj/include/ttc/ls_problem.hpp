#pragma once

#include <optional>
#include <vector>

#include "ttc/model.hpp"
#include "ttc/tr_solver.hpp"

namespace ttc {

// Least-squares cost over factors and the sparse tensor jointly:
// || (sum_k lambda_k (Z x_k U_k U_k^T))_Omega - Y_Omega ||_F^2.
// No explicit regularizer; the rank caps and the shared Z provide it.
class LsCost final : public CostModel {
 public:
  LsCost(SparseTensor y, std::vector<double> lambdas,
         std::vector<Index> ranks);

  double value(const ProductPoint& x) override;
  ProductVec egrad(const ProductPoint& x) override;
  ProductVec ehess_vec(const ProductPoint& x, const ProductVec& xi) override;

  // Fit residual on the support (cached per point).
  const SparseTensor& residual(const ProductPoint& x);

  CompletionModel recover_model(const ProductPoint& x);

  const SparseTensor& y() const { return y_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::vector<Index>& ranks() const { return ranks_; }

  ProductManifold manifold() const;

 private:
  void ensure_point(const ProductPoint& x);

  SparseTensor y_;
  std::vector<double> lambdas_;
  std::vector<Index> ranks_;

  std::vector<Eigen::MatrixXd> cached_factors_;
  std::optional<SparseTensor> cached_z_;
  std::optional<SparseTensor> residual_;
};

}  // namespace ttc
