#include "ttc/model.hpp"

#include <cmath>

#include "ttc/errors.hpp"

namespace ttc {

const char* to_string(Formulation f) {
  return f == Formulation::dual ? "dual" : "ls";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "dual") return Formulation::dual;
  if (s == "ls") return Formulation::ls;
  throw ConfigError("unknown formulation '" + s + "' (expected dual or ls)");
}

void CompletionModel::validate() const {
  const int k = dims.order();
  if (static_cast<int>(ranks.size()) != k ||
      static_cast<int>(lambdas.size()) != k ||
      static_cast<int>(factors.size()) != k) {
    throw ShapeError("model component count does not match the tensor order");
  }
  for (int m = 0; m < k; ++m) {
    if (ranks[m] < 1 || ranks[m] > dims.size(m)) {
      throw ShapeError("rank out of range for mode " + std::to_string(m));
    }
    if (factors[m].rows() != dims.size(m) || factors[m].cols() != ranks[m]) {
      throw ShapeError("factor shape mismatch for mode " + std::to_string(m));
    }
    if (!(lambdas[m] > 0.0)) {
      throw ConfigError("lambda must be positive for mode " +
                        std::to_string(m));
    }
  }
  if (!(z.dims() == dims)) throw ShapeError("model tensor dims mismatch");
}

SparseTensor predict(const CompletionModel& model,
                     std::shared_ptr<const Support> queries) {
  model.validate();
  if (!queries) throw ShapeError("null query support");
  SparseTensor out = SparseTensor::zeros(queries);
  for (int k = 0; k < model.dims.order(); ++k) {
    const SparseTensor wk = mode_product_on_support(
        model.z, k, model.factors[k], model.factors[k], queries);
    out = axpy(model.lambdas[k], wk, out);
  }
  return out;
}

std::vector<double> relative_sparsity(const CompletionModel& model) {
  model.validate();
  const int order = model.dims.order();
  std::vector<double> norms(order, 0.0);
  for (int k = 0; k < order; ++k) {
    // ||lambda_k Z x_k U U^T||_F^2 = lambda_k^2 sum_f w_f^T (U^T U) w_f
    // with w_f = U^T z_f per fiber; the unfolding is never formed.
    const Eigen::MatrixXd& u = model.factors[k];
    const Eigen::MatrixXd gram = u.transpose() * u;
    const FiberIndex& fi = model.z.support().fibers(k);
    const auto vals = model.z.values();
    Eigen::RowVectorXd w(u.cols());
    double acc = 0.0;
    for (std::size_t f = 0; f + 1 < fi.offsets.size(); ++f) {
      w.setZero();
      for (std::size_t p = fi.offsets[f]; p < fi.offsets[f + 1]; ++p) {
        w.noalias() += vals[fi.order[p]] * u.row(fi.rows[p]);
      }
      acc += (w * gram).dot(w);
    }
    norms[k] = model.lambdas[k] * std::sqrt(std::max(acc, 0.0));
  }
  double total = 0.0;
  for (double n : norms) total += n;
  if (!(total > 0.0)) {
    throw MetricError("relative sparsity undefined for an all-zero model");
  }
  for (double& n : norms) n /= total;
  return norms;
}

}  // namespace ttc
