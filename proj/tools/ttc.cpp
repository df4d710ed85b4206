// Command-line front end: train / predict / cv / selftest / bench over the
// coordinate text formats documented in the README.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ttc/checks.hpp"
#include "ttc/io.hpp"
#include "ttc/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

std::vector<ttc::Index> parse_rank_list(const std::string& s) {
  std::vector<ttc::Index> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(tok, &pos);
      if (pos != tok.size() || v < 1) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ttc::ConfigError("bad rank entry '" + tok + "'");
    }
  }
  if (out.empty()) throw ttc::ConfigError("empty rank list");
  return out;
}

// lo:hi:log-step, e.g. 1e-3:1e3:10.
std::vector<double> parse_grid(const std::string& s) {
  double lo = 0, hi = 0, step = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 ||
      !(lo > 0) || !(hi >= lo) || !(step > 1)) {
    throw ttc::ConfigError(
        "bad grid '" + s + "', expected lo:hi:log-step with lo>0, hi>=lo, "
        "log-step>1");
  }
  std::vector<double> grid;
  for (double v = lo; v <= hi * (1 + 1e-12); v *= step) grid.push_back(v);
  return grid;
}

struct CommonOpts {
  std::string formulation = "dual";
  std::string rank_list;
  double tol = 1e-6;
  int max_iters = 500;
  double inner_tol = 1e-10;
  int inner_max_iters = 100;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_rank = true) {
  cmd->add_option("--formulation", o.formulation,
                  "Formulation: dual or ls")
      ->check(CLI::IsMember({"dual", "ls"}));
  if (with_rank) {
    cmd->add_option("--rank", o.rank_list, "Ranks r1,...,rK")->required();
  }
  cmd->add_option("--tol", o.tol, "Gradient norm tolerance");
  cmd->add_option("--max-iters", o.max_iters, "Outer iteration cap");
  cmd->add_option("--inner-tol", o.inner_tol,
                  "Relative residual tolerance of the inner linear solver");
  cmd->add_option("--inner-max-iters", o.inner_max_iters,
                  "Iteration cap of the inner linear solver");
  cmd->add_option("--seed", o.seed, "Random seed");
}

ttc::TrainOptions make_train_options(const CommonOpts& o) {
  ttc::TrainOptions opt;
  opt.formulation = ttc::formulation_from_string(o.formulation);
  opt.ranks = parse_rank_list(o.rank_list);
  opt.tr.grad_tol = o.tol;
  opt.tr.max_outer_iters = o.max_iters;
  opt.tr.seed = o.seed;
  opt.inner.inner_tol = o.inner_tol;
  opt.inner.inner_max_iters = o.inner_max_iters;
  return opt;
}

void report_metric(const std::string& task, const ttc::SparseTensor& pred,
                   const ttc::SparseTensor& truth) {
  if (task == "rmse") {
    std::cout << "test rmse " << ttc::format_double(ttc::rmse(pred, truth))
              << "\n";
  } else {
    std::vector<double> scores(pred.values().begin(), pred.values().end());
    std::vector<double> labels(truth.values().begin(), truth.values().end());
    std::cout << "test auc " << ttc::format_double(ttc::auc(scores, labels))
              << "\n";
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Low-rank tensor completion by trust-region optimization "
               "over spectrahedron products"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit a completion model");
  CommonOpts train_opts;
  std::string train_path, test_path, out_path, task = "rmse";
  double lambda = 0.0;
  std::string grid_spec;
  int folds = 5;
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--train", train_path, "Training tensor file")
      ->required();
  train_cmd->add_option("--test", test_path, "Held-out tensor file");
  train_cmd->add_option("--out", out_path, "Model output path")->required();
  train_cmd->add_option("--lambda", lambda, "Regularization weight");
  train_cmd->add_option("--cv-grid", grid_spec,
                        "Lambda grid lo:hi:log-step for cross-validation");
  train_cmd->add_option("--folds", folds, "Cross-validation folds");
  train_cmd->add_option("--task", task, "Evaluation metric: rmse or auc")
      ->check(CLI::IsMember({"rmse", "auc"}));

  // predict
  auto* predict_cmd =
      app.add_subcommand("predict", "Evaluate a model at query indices");
  std::string model_path, query_path, pred_out;
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--test", query_path, "Query tensor file")
      ->required();
  predict_cmd->add_option("--out", pred_out, "Predictions output path")
      ->required();

  // cv
  auto* cv_cmd = app.add_subcommand("cv", "Cross-validate lambda");
  CommonOpts cv_opts;
  std::string cv_train_path, cv_out, cv_grid_spec;
  int cv_folds = 5;
  add_common(cv_cmd, cv_opts);
  cv_cmd->add_option("--train", cv_train_path, "Training tensor file")
      ->required();
  cv_cmd->add_option("--out", cv_out, "CSV table output path")->required();
  cv_cmd->add_option("--cv-grid", cv_grid_spec, "Lambda grid lo:hi:log-step");
  cv_cmd->add_option("--folds", cv_folds, "Folds");

  // selftest
  auto* selftest_cmd =
      app.add_subcommand("selftest", "Run the built-in invariant suite");
  std::uint64_t selftest_seed = 42;
  selftest_cmd->add_option("--seed", selftest_seed, "Random seed");

  // bench
  auto* bench_cmd = app.add_subcommand(
      "bench", "Measure per-iteration time against the support size");
  CommonOpts bench_opts;
  bench_opts.rank_list = "3,3,3";
  std::string bench_sizes = "1000,4000,16000,64000";
  std::string bench_out;
  bench_cmd->add_option("--formulation", bench_opts.formulation,
                        "Formulation: dual or ls")
      ->check(CLI::IsMember({"dual", "ls"}));
  bench_cmd->add_option("--rank", bench_opts.rank_list, "Ranks r1,r2,r3");
  bench_cmd->add_option("--sizes", bench_sizes, "Support sizes, comma list");
  bench_cmd->add_option("--seed", bench_opts.seed, "Random seed");
  bench_cmd->add_option("--out", bench_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  if (train_cmd->parsed()) {
    const bool have_lambda = train_cmd->count("--lambda") > 0;
    const bool have_grid = train_cmd->count("--cv-grid") > 0;
    if (have_lambda == have_grid) {
      throw ttc::ConfigError(
          "train needs exactly one of --lambda and --cv-grid");
    }
    const ttc::SparseTensor y = ttc::load_tensor(train_path);
    ttc::TrainOptions opt = make_train_options(train_opts);
    if (have_grid) {
      const auto grid = parse_grid(grid_spec);
      const ttc::CvResult cv =
          ttc::cross_validate(y, opt, grid, folds, train_opts.seed);
      std::cout << "cv selected lambda " << ttc::format_double(cv.best_lambda)
                << "\n";
      opt.lambda = cv.best_lambda;
    } else {
      opt.lambda = lambda;
    }
    const ttc::TrainResult res = ttc::train(y, opt);
    ttc::save_model(out_path, res.model);
    {
      std::ofstream os(out_path + ".trace.csv");
      res.trace.write_csv(os);
    }
    std::cout << "final cost " << ttc::format_double(res.final_cost)
              << ", gradient norm " << ttc::format_double(res.final_grad_norm)
              << ", " << res.trace.iters.size() << " iterations"
              << (res.converged ? " (converged)" : "") << "\n";
    if (!test_path.empty()) {
      const ttc::SparseTensor truth = ttc::load_tensor(test_path);
      const ttc::SparseTensor pred =
          ttc::predict(res.model, truth.support_ptr());
      report_metric(task, pred, truth);
    }
    return kExitOk;
  }

  if (predict_cmd->parsed()) {
    const ttc::CompletionModel model = ttc::load_model(model_path);
    const ttc::SparseTensor queries =
        ttc::load_tensor(query_path, /*require_values=*/false);
    const ttc::SparseTensor pred = ttc::predict(model, queries.support_ptr());
    ttc::save_tensor(pred_out, pred);
    return kExitOk;
  }

  if (cv_cmd->parsed()) {
    const ttc::SparseTensor y = ttc::load_tensor(cv_train_path);
    ttc::TrainOptions opt = make_train_options(cv_opts);
    const auto grid = cv_grid_spec.empty() ? ttc::default_lambda_grid()
                                           : parse_grid(cv_grid_spec);
    const ttc::CvResult cv =
        ttc::cross_validate(y, opt, grid, cv_folds, cv_opts.seed);
    std::ofstream os(cv_out);
    cv.write_csv(os);
    std::cout << "best lambda " << ttc::format_double(cv.best_lambda) << "\n";
    return kExitOk;
  }

  if (selftest_cmd->parsed()) {
    const auto results = ttc::checks::run_selftest(selftest_seed);
    int failures = 0;
    for (const auto& r : results) {
      std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": "
                << r.detail << "\n";
      if (!r.pass) ++failures;
    }
    std::cout << (failures == 0 ? "selftest passed"
                                : "selftest FAILED") << " ("
              << results.size() - failures << "/" << results.size() << ")\n";
    return failures == 0 ? kExitOk : kExitNumerical;
  }

  if (bench_cmd->parsed()) {
    std::vector<ttc::Index> sizes;
    {
      std::stringstream ss(bench_sizes);
      std::string tok;
      while (std::getline(ss, tok, ',')) sizes.push_back(std::stoll(tok));
    }
    const ttc::checks::BenchResult res = ttc::checks::run_bench(
        ttc::formulation_from_string(bench_opts.formulation),
        parse_rank_list(bench_opts.rank_list), sizes, bench_opts.seed);
    for (const auto& s : res.samples) {
      std::cout << "omega " << s.omega << ": "
                << ttc::format_double(s.seconds) << " s/iter\n";
    }
    std::cout << "fitted exponent " << ttc::format_double(res.exponent)
              << "\n";
    if (!bench_out.empty()) {
      std::ofstream os(bench_out);
      res.write_csv(os);
    }
    return kExitOk;
  }

  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ttc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ttc::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ttc::ShapeError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ttc::SupportError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ttc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
