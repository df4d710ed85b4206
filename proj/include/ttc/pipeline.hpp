#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ttc/dual_problem.hpp"
#include "ttc/ls_problem.hpp"
#include "ttc/model.hpp"
#include "ttc/tr_solver.hpp"

namespace ttc {

// ---- Metrics ---------------------------------------------------------------

// Root mean squared error over aligned supports. Symmetric in its
// arguments; empty input is an error.
double rmse(const SparseTensor& pred, const SparseTensor& truth);

// Area under the ROC curve via the rank statistic, ties resolved by
// average ranks. Labels must be 0/1 with both classes present.
double auc(std::span<const double> scores, std::span<const double> labels);

// ---- Training --------------------------------------------------------------

struct TrainOptions {
  Formulation formulation = Formulation::dual;
  std::vector<Index> ranks;
  double lambda = 1.0;  // per-mode weights are lambda * n_k
  TRConfig tr;
  DualOptions inner;
  enum class ZInit { scaled_y, zero } z_init = ZInit::scaled_y;
};

struct TrainResult {
  CompletionModel model;
  TRTrace trace;
  bool converged = false;
  double final_cost = 0.0;
  double final_grad_norm = 0.0;
};

TrainResult train(const SparseTensor& y, const TrainOptions& options);

// ---- Cross-validation ------------------------------------------------------

// {1e-3, 1e-2, ..., 1e3}
std::vector<double> default_lambda_grid();

struct CvRow {
  double lambda = 0.0;
  std::vector<double> fold_rmse;
  double mean = 0.0;
  double stddev = 0.0;
};

struct CvResult {
  double best_lambda = 0.0;
  std::vector<CvRow> rows;
  void write_csv(std::ostream& os) const;
};

// Entries are shuffled by `seed` and dealt into `folds` validation sets;
// each (lambda, fold) cell is a fresh solve. Best lambda minimizes the
// mean validation RMSE, ties broken toward the smaller lambda.
CvResult cross_validate(const SparseTensor& y, const TrainOptions& base,
                        const std::vector<double>& grid, int folds,
                        std::uint64_t seed);

// ---- Reconstruction bound --------------------------------------------------

struct BoundInterpretation {
  std::string name;  // "raw" (lambda_k = lambda) or "mode_scaled"
  double discrepancy = 0.0;
  double bound = 0.0;
  bool holds = false;
  double train_cost = 0.0;
};

struct BoundCheckReport {
  double lambda = 0.0;
  double assumption_threshold = 0.0;  // 1 / sqrt(sum_k ||E_k||_2^2)
  bool assumption_ok = false;
  double w_star_norm = 0.0;
  double noise_norm = 0.0;
  std::vector<BoundInterpretation> interpretations;
  void print(std::ostream& os) const;
};

// Fully-observed denoising check of the reconstruction inequality
// ||What - W*||_F <= (2 / lambda) sqrt(min_k n_k). Both tensors must
// cover every entry. The check still runs when lambda violates the noise
// assumption; the report flags it as non-binding. Spectral norms of the
// noise unfoldings come from power iteration.
BoundCheckReport reconstruction_bound_check(const SparseTensor& w_star,
                                            const SparseTensor& noise,
                                            double lambda,
                                            const std::vector<Index>& ranks,
                                            const TRConfig& tr_config,
                                            std::uint64_t seed = 7);

// ---- Synthetic data --------------------------------------------------------

struct SynthData {
  SparseTensor train;
  SparseTensor test;
  CompletionModel planted;  // ground-truth accessor: predict(planted, .)
};

// Plants a model of the given ranks, samples round(density * total)
// distinct entries, splits them 80/20 into train/test, and adds
// N(0, noise_sigma^2) noise to the train values only.
SynthData synth_generate(const Dims& dims, const std::vector<Index>& ranks,
                         double density, double noise_sigma,
                         std::uint64_t seed);

// Spectral norm of the mode-k unfolding by power iteration on Z_k Z_k^T.
double unfolding_spectral_norm(const SparseTensor& z, int mode,
                               std::uint64_t seed = 11, int iters = 200);

}  // namespace ttc
