#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttc/sparse_tensor.hpp"

namespace ttc {

enum class Formulation { dual, ls };

const char* to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

// Trained completion model: K unit-norm factors, one sparse tensor and the
// regularization weights. Predicts any entry as
// sum_k lambda_k (Z x_k U_k U_k^T) without forming a dense tensor.
struct CompletionModel {
  Dims dims;
  std::vector<Index> ranks;
  double lambda = 0.0;           // base weight; lambdas[k] = lambda * n_k
                                 // under the standard training protocol
  std::vector<double> lambdas;   // per-mode weights actually used
  std::vector<Eigen::MatrixXd> factors;
  SparseTensor z;
  Formulation formulation = Formulation::dual;

  void validate() const;
};

// Predictions at the query support.
SparseTensor predict(const CompletionModel& model,
                     std::shared_ptr<const Support> queries);

// Mixture shares ||W_k||_F / sum_j ||W_j||_F of the K component tensors,
// computed in factored form. Throws MetricError for an all-zero model.
std::vector<double> relative_sparsity(const CompletionModel& model);

}  // namespace ttc
