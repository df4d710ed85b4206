#include "ttc/ls_problem.hpp"

#include <algorithm>
#include <string>

namespace ttc {

namespace {

void check_problem_shapes(const SparseTensor& y,
                          const std::vector<double>& lambdas,
                          const std::vector<Index>& ranks) {
  const int order = y.dims().order();
  if (static_cast<int>(lambdas.size()) != order ||
      static_cast<int>(ranks.size()) != order) {
    throw ShapeError("lambda/rank count does not match the tensor order");
  }
  for (int k = 0; k < order; ++k) {
    if (!(lambdas[k] > 0.0)) throw ConfigError("lambda_k must be positive");
    if (ranks[k] < 1 || ranks[k] > y.dims().size(k)) {
      throw ShapeError("rank out of range for mode " + std::to_string(k));
    }
  }
}

}  // namespace

LsCost::LsCost(SparseTensor y, std::vector<double> lambdas,
               std::vector<Index> ranks)
    : y_(std::move(y)),
      lambdas_(std::move(lambdas)),
      ranks_(std::move(ranks)) {
  check_problem_shapes(y_, lambdas_, ranks_);
}

ProductManifold LsCost::manifold() const {
  std::vector<Spectrahedron> parts;
  for (int k = 0; k < y_.dims().order(); ++k) {
    parts.emplace_back(y_.dims().size(k), ranks_[k]);
  }
  return ProductManifold(std::move(parts), y_.support_ptr());
}

void LsCost::ensure_point(const ProductPoint& x) {
  const int order = y_.dims().order();
  if (static_cast<int>(x.factors.size()) != order) {
    throw ShapeError("point factor count mismatch");
  }
  for (int k = 0; k < order; ++k) {
    if (x.factors[k].rows() != y_.dims().size(k) ||
        x.factors[k].cols() != ranks_[k]) {
      throw ShapeError("factor shape mismatch for mode " + std::to_string(k));
    }
  }
  if (!x.z) throw ShapeError("point is missing its sparse component");
  check_aligned(*x.z, y_);

  if (residual_ && cached_z_ &&
      cached_z_->values().size() == x.z->values().size() &&
      std::equal(cached_z_->values().begin(), cached_z_->values().end(),
                 x.z->values().begin())) {
    bool same = cached_factors_.size() == x.factors.size();
    for (std::size_t k = 0; same && k < x.factors.size(); ++k) {
      same = cached_factors_[k] == x.factors[k];
    }
    if (same) return;
  }

  SparseTensor r = axpy(-1.0, y_, SparseTensor::zeros(y_.support_ptr()));
  for (int k = 0; k < order; ++k) {
    const SparseTensor wk = mode_product_on_support(
        *x.z, k, x.factors[k], x.factors[k], y_.support_ptr());
    r = axpy(lambdas_[k], wk, r);
  }
  residual_ = std::move(r);
  cached_factors_ = x.factors;
  cached_z_ = x.z;
}

const SparseTensor& LsCost::residual(const ProductPoint& x) {
  ensure_point(x);
  return *residual_;
}

double LsCost::value(const ProductPoint& x) {
  ensure_point(x);
  return inner(*residual_, *residual_);
}

ProductVec LsCost::egrad(const ProductPoint& x) {
  ensure_point(x);
  const SparseTensor& r = *residual_;
  const SparseTensor& z = *x.z;
  ProductVec g;
  g.factors.reserve(x.factors.size());
  for (std::size_t k = 0; k < x.factors.size(); ++k) {
    const int mode = static_cast<int>(k);
    // d/dU of ||R||^2: 2 lambda_k (R_k Z_k^T + Z_k R_k^T) U.
    Eigen::MatrixXd gu = outer_apply(r, z, mode, x.factors[k]);
    gu.noalias() += outer_apply(z, r, mode, x.factors[k]);
    g.factors.push_back(2.0 * lambdas_[k] * gu);
  }
  // d/dZ of ||R||^2: 2 sum_k lambda_k (R x_k U_k U_k^T) on the support.
  SparseTensor gz = SparseTensor::zeros(y_.support_ptr());
  for (std::size_t k = 0; k < x.factors.size(); ++k) {
    const SparseTensor t = mode_product_on_support(
        r, static_cast<int>(k), x.factors[k], x.factors[k], y_.support_ptr());
    gz = axpy(2.0 * lambdas_[k], t, gz);
  }
  g.z = std::move(gz);
  return g;
}

ProductVec LsCost::ehess_vec(const ProductPoint& x, const ProductVec& xi) {
  ensure_point(x);
  if (xi.factors.size() != x.factors.size() || !xi.z) {
    throw ShapeError("direction layout mismatch");
  }
  const SparseTensor& r = *residual_;
  const SparseTensor& z = *x.z;
  const SparseTensor& zdot = *xi.z;
  check_aligned(zdot, y_);
  const std::size_t order = x.factors.size();

  // Rdot = sum_k lambda_k (Zdot x_k U U^T + Z x_k (V U^T + U V^T)).
  SparseTensor rdot = SparseTensor::zeros(y_.support_ptr());
  for (std::size_t k = 0; k < order; ++k) {
    const int mode = static_cast<int>(k);
    const auto& u = x.factors[k];
    const auto& v = xi.factors[k];
    rdot = axpy(lambdas_[k],
                mode_product_on_support(zdot, mode, u, u, y_.support_ptr()),
                rdot);
    rdot = axpy(lambdas_[k],
                mode_product_on_support(z, mode, v, u, y_.support_ptr()),
                rdot);
    rdot = axpy(lambdas_[k],
                mode_product_on_support(z, mode, u, v, y_.support_ptr()),
                rdot);
  }

  ProductVec h;
  h.factors.reserve(order);
  for (std::size_t k = 0; k < order; ++k) {
    const int mode = static_cast<int>(k);
    const auto& u = x.factors[k];
    const auto& v = xi.factors[k];
    Eigen::MatrixXd hu = outer_apply(rdot, z, mode, u);
    hu.noalias() += outer_apply(z, rdot, mode, u);
    hu.noalias() += outer_apply(r, zdot, mode, u);
    hu.noalias() += outer_apply(zdot, r, mode, u);
    hu.noalias() += outer_apply(r, z, mode, v);
    hu.noalias() += outer_apply(z, r, mode, v);
    h.factors.push_back(2.0 * lambdas_[k] * hu);
  }
  SparseTensor hz = SparseTensor::zeros(y_.support_ptr());
  for (std::size_t k = 0; k < order; ++k) {
    const int mode = static_cast<int>(k);
    const auto& u = x.factors[k];
    const auto& v = xi.factors[k];
    hz = axpy(2.0 * lambdas_[k],
              mode_product_on_support(rdot, mode, u, u, y_.support_ptr()), hz);
    hz = axpy(2.0 * lambdas_[k],
              mode_product_on_support(r, mode, v, u, y_.support_ptr()), hz);
    hz = axpy(2.0 * lambdas_[k],
              mode_product_on_support(r, mode, u, v, y_.support_ptr()), hz);
  }
  h.z = std::move(hz);
  return h;
}

CompletionModel LsCost::recover_model(const ProductPoint& x) {
  ensure_point(x);
  CompletionModel model{y_.dims(), ranks_,    0.0,
                        lambdas_,  x.factors, *x.z,
                        Formulation::ls};
  return model;
}

}  // namespace ttc
