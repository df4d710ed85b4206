#pragma once

#include <optional>
#include <vector>

#include "ttc/model.hpp"
#include "ttc/tr_solver.hpp"

namespace ttc {

// Symmetric positive definite operator of the inner linear system:
// z |-> z + sum_k lambda_k (z x_k U_k U_k^T) restricted to the support.
struct InnerSystemOp {
  std::vector<Eigen::MatrixXd> factors;
  std::vector<double> lambdas;
  std::shared_ptr<const Support> support;

  SparseTensor apply(const SparseTensor& z) const;
};

struct CgStats {
  int iterations = 0;
  double rel_residual = 0.0;
};

// Conjugate gradients for the inner system. Stops when the residual drops
// below rel_tol * ||rhs|| or after max_iters iterations. x0 may be null.
SparseTensor conjugate_gradient(const InnerSystemOp& op,
                                const SparseTensor& rhs,
                                const SparseTensor* x0, double rel_tol,
                                int max_iters, CgStats* stats = nullptr);

struct DualOptions {
  double inner_tol = 1e-10;
  int inner_max_iters = 100;
};

// Cost of the fixed-rank dual formulation: the value of the inner
// maximization over sparse tensors at the current factors. The maximizer
// solves the linear system above; its value, gradient and
// Hessian-products come out in closed form from the maximizer and its
// directional derivative.
class DualCost final : public CostModel {
 public:
  DualCost(SparseTensor y, std::vector<double> lambdas,
           std::vector<Index> ranks, DualOptions options = {});

  double value(const ProductPoint& x) override;
  ProductVec egrad(const ProductPoint& x) override;
  ProductVec ehess_vec(const ProductPoint& x, const ProductVec& xi) override;

  // Maximizer of the inner problem at x (cached per point).
  const SparseTensor& inner_solution(const ProductPoint& x);
  // Directional derivative of the maximizer along xi.
  SparseTensor inner_solution_dot(const ProductPoint& x, const ProductVec& xi);

  CompletionModel recover_model(const ProductPoint& x);

  const SparseTensor& y() const { return y_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::vector<Index>& ranks() const { return ranks_; }
  CgStats last_inner_stats() const { return last_stats_; }

  ProductManifold manifold() const;

 private:
  void ensure_point(const ProductPoint& x);

  SparseTensor y_;
  std::vector<double> lambdas_;
  std::vector<Index> ranks_;
  DualOptions options_;

  // Per-point cache plus the warm start carried across points.
  std::vector<Eigen::MatrixXd> cached_factors_;
  std::optional<SparseTensor> z_hat_;
  std::optional<SparseTensor> warm_start_;
  CgStats last_stats_;
};

}  // namespace ttc
