#include "ttc/dual_problem.hpp"

#include <cmath>
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

void check_point_shapes(const ProductPoint& x, const SparseTensor& y,
                        const std::vector<Index>& ranks, bool expect_z) {
  const int order = y.dims().order();
  if (static_cast<int>(x.factors.size()) != order) {
    throw ShapeError("point factor count mismatch");
  }
  for (int k = 0; k < order; ++k) {
    if (x.factors[k].rows() != y.dims().size(k) ||
        x.factors[k].cols() != ranks[k]) {
      throw ShapeError("factor shape mismatch for mode " + std::to_string(k));
    }
  }
  if (expect_z != x.z.has_value()) {
    throw ShapeError(expect_z ? "point is missing its sparse component"
                              : "point has an unexpected sparse component");
  }
}

bool factors_equal(const std::vector<Eigen::MatrixXd>& a,
                   const std::vector<Eigen::MatrixXd>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].rows() != b[k].rows() || a[k].cols() != b[k].cols()) return false;
    if (a[k] != b[k]) return false;
  }
  return true;
}

}  // namespace

SparseTensor InnerSystemOp::apply(const SparseTensor& z) const {
  if (!z.support().same_as(*support)) {
    throw SupportError("operand support differs from the system support");
  }
  std::vector<double> out(z.values().begin(), z.values().end());
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const SparseTensor term = mode_product_on_support(
        z, static_cast<int>(k), factors[k], factors[k], z.support_ptr());
    const auto tv = term.values();
    for (std::size_t e = 0; e < out.size(); ++e) out[e] += lambdas[k] * tv[e];
  }
  return z.with_values(std::move(out));
}

SparseTensor conjugate_gradient(const InnerSystemOp& op,
                                const SparseTensor& rhs,
                                const SparseTensor* x0, double rel_tol,
                                int max_iters, CgStats* stats) {
  const double rhs_norm = frob_norm(rhs);
  if (rhs_norm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return SparseTensor::zeros(rhs.support_ptr());
  }
  SparseTensor x =
      x0 ? *x0 : SparseTensor::zeros(rhs.support_ptr());
  if (x0) check_aligned(*x0, rhs);

  SparseTensor r = axpy(-1.0, op.apply(x), rhs);  // b - A x
  SparseTensor p = r;
  double rr = inner(r, r);
  int it = 0;
  for (; it < max_iters && std::sqrt(rr) > rel_tol * rhs_norm; ++it) {
    const SparseTensor q = op.apply(p);
    const double p_q = inner(p, q);
    if (!std::isfinite(p_q) || p_q <= 0.0) {
      throw NumericalError(
          "conjugate gradient breakdown: curvature " + std::to_string(p_q) +
          " at iteration " + std::to_string(it));
    }
    const double alpha = rr / p_q;
    x = axpy(alpha, p, x);
    r = axpy(-alpha, q, r);
    const double rr_next = inner(r, r);
    if (!std::isfinite(rr_next)) {
      throw NumericalError("non-finite residual in conjugate gradient");
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    p = axpy(beta, p, r);
  }
  if (stats) {
    // True residual, not the recurrence value.
    const double res = frob_norm(axpy(-1.0, op.apply(x), rhs));
    *stats = {it, res / rhs_norm};
  }
  return x;
}

DualCost::DualCost(SparseTensor y, std::vector<double> lambdas,
                   std::vector<Index> ranks, DualOptions options)
    : y_(std::move(y)),
      lambdas_(std::move(lambdas)),
      ranks_(std::move(ranks)),
      options_(options) {
  check_problem_shapes(y_, lambdas_, ranks_);
  if (!(options_.inner_tol > 0.0)) {
    throw ConfigError("inner tolerance must be positive");
  }
  if (options_.inner_max_iters < 1) {
    throw ConfigError("inner iteration budget must be positive");
  }
}

ProductManifold DualCost::manifold() const {
  std::vector<Spectrahedron> parts;
  for (int k = 0; k < y_.dims().order(); ++k) {
    parts.emplace_back(y_.dims().size(k), ranks_[k]);
  }
  return ProductManifold(std::move(parts));
}

void DualCost::ensure_point(const ProductPoint& x) {
  check_point_shapes(x, y_, ranks_, /*expect_z=*/false);
  if (z_hat_ && factors_equal(cached_factors_, x.factors)) return;

  InnerSystemOp op{x.factors, lambdas_, y_.support_ptr()};
  const SparseTensor* warm = warm_start_ ? &*warm_start_ : &y_;
  z_hat_ = conjugate_gradient(op, y_, warm, options_.inner_tol,
                              options_.inner_max_iters, &last_stats_);
  warm_start_ = z_hat_;
  cached_factors_ = x.factors;
}

const SparseTensor& DualCost::inner_solution(const ProductPoint& x) {
  ensure_point(x);
  return *z_hat_;
}

SparseTensor DualCost::inner_solution_dot(const ProductPoint& x,
                                          const ProductVec& xi) {
  ensure_point(x);
  if (xi.factors.size() != x.factors.size()) {
    throw ShapeError("direction factor count mismatch");
  }
  const SparseTensor& zh = *z_hat_;
  // rhs = -sum_k lambda_k (Zhat x_k (V_k U_k^T + U_k V_k^T)) on the support.
  SparseTensor rhs = SparseTensor::zeros(y_.support_ptr());
  for (std::size_t k = 0; k < x.factors.size(); ++k) {
    const int mode = static_cast<int>(k);
    const SparseTensor a = mode_product_on_support(
        zh, mode, xi.factors[k], x.factors[k], y_.support_ptr());
    const SparseTensor b = mode_product_on_support(
        zh, mode, x.factors[k], xi.factors[k], y_.support_ptr());
    rhs = axpy(-lambdas_[k], a, rhs);
    rhs = axpy(-lambdas_[k], b, rhs);
  }
  InnerSystemOp op{x.factors, lambdas_, y_.support_ptr()};
  CgStats stats;
  SparseTensor zdot = conjugate_gradient(op, rhs, nullptr, options_.inner_tol,
                                         options_.inner_max_iters, &stats);
  return zdot;
}

double DualCost::value(const ProductPoint& x) {
  ensure_point(x);
  const SparseTensor& zh = *z_hat_;
  double quad = 0.0;
  for (std::size_t k = 0; k < x.factors.size(); ++k) {
    quad += 0.5 * lambdas_[k] *
            gram_norm(zh, static_cast<int>(k), x.factors[k]);
  }
  // Objective of the maximization whose stationarity is the inner linear
  // system; at the exact maximizer this equals <Zhat, Y>/2.
  return inner(zh, y_) - 0.5 * inner(zh, zh) - quad;
}

ProductVec DualCost::egrad(const ProductPoint& x) {
  ensure_point(x);
  const SparseTensor& zh = *z_hat_;
  ProductVec g;
  g.factors.reserve(x.factors.size());
  for (std::size_t k = 0; k < x.factors.size(); ++k) {
    g.factors.push_back(-lambdas_[k] *
                        zzt_u(zh, static_cast<int>(k), x.factors[k]));
  }
  return g;
}

ProductVec DualCost::ehess_vec(const ProductPoint& x, const ProductVec& xi) {
  ensure_point(x);
  const SparseTensor& zh = *z_hat_;
  const SparseTensor zdot = inner_solution_dot(x, xi);
  ProductVec h;
  h.factors.reserve(x.factors.size());
  for (std::size_t k = 0; k < x.factors.size(); ++k) {
    const int mode = static_cast<int>(k);
    Eigen::MatrixXd a = outer_apply(zh, zh, mode, xi.factors[k]);
    a.noalias() += outer_apply(zdot, zh, mode, x.factors[k]);
    a.noalias() += outer_apply(zh, zdot, mode, x.factors[k]);
    h.factors.push_back(-lambdas_[k] * a);
  }
  return h;
}

CompletionModel DualCost::recover_model(const ProductPoint& x) {
  ensure_point(x);
  CompletionModel model{y_.dims(), ranks_,   0.0,
                        lambdas_,  x.factors, *z_hat_,
                        Formulation::dual};
  return model;
}

}  // namespace ttc
