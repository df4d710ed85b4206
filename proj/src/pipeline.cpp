#include "ttc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

namespace ttc {

double rmse(const SparseTensor& pred, const SparseTensor& truth) {
  check_aligned(pred, truth);
  const std::size_t n = pred.nnz();
  if (n == 0) throw MetricError("rmse of empty data");
  double acc = 0.0;
  for (std::size_t e = 0; e < n; ++e) {
    const double d = pred.value(e) - truth.value(e);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

double auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) {
    throw ShapeError("score/label count mismatch");
  }
  if (scores.empty()) throw MetricError("auc of empty data");
  std::size_t npos = 0, nneg = 0;
  for (double l : labels) {
    if (l == 1.0) {
      ++npos;
    } else if (l == 0.0) {
      ++nneg;
    } else {
      throw MetricError("auc labels must be 0 or 1");
    }
  }
  if (npos == 0 || nneg == 0) {
    throw MetricError("auc undefined with a single class");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Average ranks over tied score groups (Mann-Whitney convention).
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t p = i; p < j; ++p) {
      if (labels[order[p]] == 1.0) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const double np = static_cast<double>(npos);
  const double nn = static_cast<double>(nneg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

namespace {

std::vector<double> mode_scaled_lambdas(const Dims& dims, double lambda) {
  std::vector<double> out(static_cast<std::size_t>(dims.order()));
  for (int k = 0; k < dims.order(); ++k) {
    out[static_cast<std::size_t>(k)] =
        lambda * static_cast<double>(dims.size(k));
  }
  return out;
}

TrainResult train_with_lambdas(const SparseTensor& y,
                               const TrainOptions& options,
                               const std::vector<double>& lambdas) {
  const Dims& dims = y.dims();
  if (static_cast<int>(options.ranks.size()) != dims.order()) {
    throw ConfigError("rank count does not match the tensor order");
  }
  std::mt19937_64 rng(options.tr.seed);

  if (options.formulation == Formulation::dual) {
    DualCost cost(y, lambdas, options.ranks, options.inner);
    ProductManifold manifold = cost.manifold();
    ProductPoint x0;
    x0.factors.reserve(static_cast<std::size_t>(dims.order()));
    for (int k = 0; k < dims.order(); ++k) {
      x0.factors.push_back(manifold.part(k).random_point(rng));
    }
    TRResult res = tr_solve(cost, manifold, x0, options.tr);
    return TrainResult{cost.recover_model(res.x), std::move(res.trace),
                       res.converged, res.final_cost, res.final_grad_norm};
  }

  LsCost cost(y, lambdas, options.ranks);
  ProductManifold manifold = cost.manifold();
  ProductPoint x0;
  x0.factors.reserve(static_cast<std::size_t>(dims.order()));
  for (int k = 0; k < dims.order(); ++k) {
    x0.factors.push_back(manifold.part(k).random_point(rng));
  }
  if (options.z_init == TrainOptions::ZInit::zero) {
    x0.z = SparseTensor::zeros(y.support_ptr());
  } else {
    // Exact solution of the scalar collapse of the fit equations.
    double lam_sum = 0.0;
    for (double l : lambdas) lam_sum += l;
    std::vector<double> vals(y.values().begin(), y.values().end());
    for (double& v : vals) v /= (1.0 + lam_sum);
    x0.z = SparseTensor(y.support_ptr(), std::move(vals));
  }
  TRResult res = tr_solve(cost, manifold, x0, options.tr);
  return TrainResult{cost.recover_model(res.x), std::move(res.trace),
                     res.converged, res.final_cost, res.final_grad_norm};
}

}  // namespace

TrainResult train(const SparseTensor& y, const TrainOptions& options) {
  if (!(options.lambda > 0.0)) throw ConfigError("lambda must be positive");
  TrainResult out = train_with_lambdas(
      y, options, mode_scaled_lambdas(y.dims(), options.lambda));
  out.model.lambda = options.lambda;
  return out;
}

std::vector<double> default_lambda_grid() {
  return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
}

void CvResult::write_csv(std::ostream& os) const {
  os << "lambda";
  if (!rows.empty()) {
    for (std::size_t f = 0; f < rows.front().fold_rmse.size(); ++f) {
      os << ",fold" << f;
    }
  }
  os << ",mean,std\n";
  char buf[64];
  const auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& row : rows) {
    os << fmt(row.lambda);
    for (double v : row.fold_rmse) os << "," << fmt(v);
    os << "," << fmt(row.mean) << "," << fmt(row.stddev) << "\n";
  }
}

CvResult cross_validate(const SparseTensor& y, const TrainOptions& base,
                        const std::vector<double>& grid, int folds,
                        std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("empty lambda grid");
  if (folds < 2) throw ConfigError("need at least 2 folds");
  const std::size_t n = y.nnz();
  if (n < static_cast<std::size_t>(folds)) {
    throw Error("fewer observed entries than folds");
  }
  for (double l : grid) {
    if (!(l > 0.0)) throw ConfigError("grid lambdas must be positive");
  }

  // Shuffle entry ids and deal them round-robin into folds, so every fold
  // has at least one validation entry.
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<int> fold_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    fold_of[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }

  CvResult out;
  std::vector<double> sorted_grid = grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());

  // Pre-split the data once per fold.
  std::vector<SparseTensor> fit_parts;
  std::vector<SparseTensor> val_parts;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::vector<Index>> fit_idx, val_idx;
    std::vector<double> fit_vals, val_vals;
    for (std::size_t e = 0; e < n; ++e) {
      const auto t = y.index(e);
      std::vector<Index> tup(t.begin(), t.end());
      if (fold_of[e] == f) {
        val_idx.push_back(std::move(tup));
        val_vals.push_back(y.value(e));
      } else {
        fit_idx.push_back(std::move(tup));
        fit_vals.push_back(y.value(e));
      }
    }
    if (val_idx.empty() || fit_idx.empty()) {
      throw Error("empty split in cross-validation");
    }
    fit_parts.emplace_back(y.dims(), fit_idx, std::move(fit_vals));
    val_parts.emplace_back(y.dims(), val_idx, std::move(val_vals));
  }

  double best_mean = std::numeric_limits<double>::infinity();
  for (double lambda : sorted_grid) {
    CvRow row;
    row.lambda = lambda;
    for (int f = 0; f < folds; ++f) {
      TrainOptions cell = base;
      cell.lambda = lambda;
      const TrainResult fit = train(fit_parts[static_cast<std::size_t>(f)], cell);
      const SparseTensor pred =
          predict(fit.model, val_parts[static_cast<std::size_t>(f)].support_ptr());
      row.fold_rmse.push_back(
          rmse(pred, val_parts[static_cast<std::size_t>(f)]));
    }
    double mean = 0.0;
    for (double v : row.fold_rmse) mean += v;
    mean /= static_cast<double>(folds);
    double var = 0.0;
    for (double v : row.fold_rmse) var += (v - mean) * (v - mean);
    row.mean = mean;
    row.stddev = std::sqrt(var / static_cast<double>(folds));
    if (mean < best_mean) {  // strict: ties keep the smaller lambda
      best_mean = mean;
      out.best_lambda = lambda;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

double unfolding_spectral_norm(const SparseTensor& z, int mode,
                               std::uint64_t seed, int iters) {
  const Index n = z.dims().size(mode);
  if (frob_norm(z) == 0.0) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd v(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) v(i, 0) = normal(rng);
  v /= v.norm();
  double eig = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::MatrixXd w = zzt_u(z, mode, v);  // Z_k Z_k^T v
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    eig = norm;
    v = w;
  }
  return std::sqrt(eig);
}

void BoundCheckReport::print(std::ostream& os) const {
  os << "lambda " << lambda << ", assumption threshold "
     << assumption_threshold << " ("
     << (assumption_ok ? "satisfied" : "violated, check non-binding") << ")\n";
  os << "||W*||_F " << w_star_norm << ", ||E||_F " << noise_norm << "\n";
  for (const auto& in : interpretations) {
    os << "  [" << in.name << "] discrepancy " << in.discrepancy << " vs bound "
       << in.bound << " -> " << (in.holds ? "holds" : "VIOLATED")
       << " (train cost " << in.train_cost << ")\n";
  }
}

BoundCheckReport reconstruction_bound_check(const SparseTensor& w_star,
                                            const SparseTensor& noise,
                                            double lambda,
                                            const std::vector<Index>& ranks,
                                            const TRConfig& tr_config,
                                            std::uint64_t seed) {
  const Dims& dims = w_star.dims();
  check_aligned(w_star, noise);
  if (w_star.nnz() != static_cast<std::size_t>(dims.total())) {
    throw Error("bound check needs a fully observed tensor");
  }
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");

  BoundCheckReport report;
  report.lambda = lambda;
  report.w_star_norm = frob_norm(w_star);
  report.noise_norm = frob_norm(noise);

  double spec_sq_sum = 0.0;
  for (int k = 0; k < dims.order(); ++k) {
    const double s = unfolding_spectral_norm(noise, k, seed + 100 + k);
    spec_sq_sum += s * s;
  }
  report.assumption_threshold =
      spec_sq_sum > 0.0 ? 1.0 / std::sqrt(spec_sq_sum)
                        : std::numeric_limits<double>::infinity();
  report.assumption_ok = lambda <= report.assumption_threshold * (1 + 1e-12);

  const SparseTensor y = axpy(1.0, noise, w_star);
  Index min_n = dims.size(0);
  for (int k = 1; k < dims.order(); ++k) min_n = std::min(min_n, dims.size(k));
  const double bound = 2.0 / lambda * std::sqrt(static_cast<double>(min_n));

  const auto run = [&](const std::string& name,
                       const std::vector<double>& lambdas) {
    TrainOptions opt;
    opt.formulation = Formulation::ls;
    opt.ranks = ranks;
    opt.tr = tr_config;
    opt.tr.seed = seed;
    TrainResult fit = train_with_lambdas(y, opt, lambdas);
    fit.model.lambda = lambda;
    const SparseTensor w_hat = predict(fit.model, w_star.support_ptr());
    BoundInterpretation bi;
    bi.name = name;
    bi.discrepancy = frob_norm(axpy(-1.0, w_star, w_hat));
    bi.bound = bound;
    bi.holds = bi.discrepancy <= bound;
    bi.train_cost = fit.final_cost;
    report.interpretations.push_back(std::move(bi));
  };

  run("raw", std::vector<double>(static_cast<std::size_t>(dims.order()),
                                 lambda));
  run("mode_scaled", mode_scaled_lambdas(dims, lambda));
  return report;
}

SynthData synth_generate(const Dims& dims, const std::vector<Index>& ranks,
                         double density, double noise_sigma,
                         std::uint64_t seed) {
  if (!(density > 0.0) || density > 1.0) {
    throw ConfigError("density must be in (0, 1]");
  }
  if (static_cast<int>(ranks.size()) != dims.order()) {
    throw ConfigError("rank count does not match the tensor order");
  }
  const Index total_entries = dims.total();
  const auto total =
      static_cast<std::size_t>(std::llround(density * static_cast<double>(
                                                total_entries)));
  if (total < 2) {
    throw ConfigError("density too low to populate both splits");
  }

  std::mt19937_64 rng(seed);
  std::vector<Index> flats(static_cast<std::size_t>(total_entries));
  std::iota(flats.begin(), flats.end(), Index{0});
  std::shuffle(flats.begin(), flats.end(), rng);

  const std::size_t train_n = std::max<std::size_t>(
      1, std::min(total - 1, (total * 4) / 5));
  const auto flat_to_tuple = [&](Index flat) {
    std::vector<Index> t(static_cast<std::size_t>(dims.order()));
    for (int j = 0; j < dims.order(); ++j) {
      t[static_cast<std::size_t>(j)] = flat % dims.size(j);
      flat /= dims.size(j);
    }
    return t;
  };
  std::vector<std::vector<Index>> train_idx, test_idx;
  for (std::size_t i = 0; i < total; ++i) {
    (i < train_n ? train_idx : test_idx)
        .push_back(flat_to_tuple(flats[i]));
  }
  auto train_sup = Support::make(dims, train_idx);
  auto test_sup = Support::make(dims, test_idx);

  // Planted model: random factors, standard normal tensor on the train
  // support, mode-scaled weights.
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::MatrixXd> factors;
  for (int k = 0; k < dims.order(); ++k) {
    Spectrahedron s(dims.size(k), ranks[static_cast<std::size_t>(k)]);
    factors.push_back(s.random_point(rng));
  }
  std::vector<double> z_vals(train_sup->nnz());
  for (double& v : z_vals) v = normal(rng);
  double n_sum = 0.0;
  for (int k = 0; k < dims.order(); ++k) {
    n_sum += static_cast<double>(dims.size(k));
  }
  const double lambda0 = 1.0 / n_sum;
  CompletionModel planted{dims,
                          ranks,
                          lambda0,
                          mode_scaled_lambdas(dims, lambda0),
                          std::move(factors),
                          SparseTensor(train_sup, std::move(z_vals)),
                          Formulation::ls};

  SparseTensor train_truth = predict(planted, train_sup);
  std::vector<double> train_vals(train_truth.values().begin(),
                                 train_truth.values().end());
  if (noise_sigma > 0.0) {
    for (double& v : train_vals) v += noise_sigma * normal(rng);
  }
  SparseTensor train(train_sup, std::move(train_vals));
  SparseTensor test = predict(planted, test_sup);
  return SynthData{std::move(train), std::move(test), std::move(planted)};
}

}  // namespace ttc
