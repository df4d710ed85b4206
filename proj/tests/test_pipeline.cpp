#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ttc/checks.hpp"
#include "ttc/io.hpp"
#include "ttc/pipeline.hpp"

using namespace ttc;
using checks::DenseTensor;
using testutil::random_sparse;

TEST_CASE("rmse") {
  const Dims dims({2, 2});
  const SparseTensor a(dims, {{0, 0}, {1, 1}}, {1.0, 2.0});
  const SparseTensor b(dims, {{0, 0}, {1, 1}}, {1.5, 1.0});
  SUBCASE("zero for identical inputs") { CHECK(rmse(a, a) == 0.0); }
  SUBCASE("symmetric") { CHECK(rmse(a, b) == rmse(b, a)); }
  SUBCASE("hand value") {
    CHECK(rmse(a, b) ==
          doctest::Approx(std::sqrt((0.25 + 1.0) / 2.0)).epsilon(1e-15));
  }
  SUBCASE("support mismatch raises") {
    const SparseTensor c(dims, {{0, 1}}, {1.0});
    CHECK_THROWS_AS(rmse(a, c), SupportError);
  }
}

TEST_CASE("auc") {
  SUBCASE("perfect ordering gives one") {
    CHECK(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9},
              std::vector<double>{0, 0, 1, 1}) == 1.0);
  }
  SUBCASE("all-equal scores give one half under average ranks") {
    CHECK(auc(std::vector<double>{0.4, 0.4, 0.4, 0.4},
              std::vector<double>{0, 1, 0, 1}) == 0.5);
  }
  SUBCASE("six point mixed example matches the pairwise oracle") {
    const std::vector<double> scores = {0.3, 0.3, 0.9, 0.1, 0.55, 0.52};
    const std::vector<double> labels = {0, 1, 1, 0, 1, 0};
    double conc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      for (std::size_t j = 0; j < scores.size(); ++j) {
        if (labels[i] == 1 && labels[j] == 0) {
          ++pairs;
          conc += scores[i] > scores[j] ? 1.0
                  : scores[i] == scores[j] ? 0.5
                                           : 0.0;
        }
      }
    }
    CHECK(auc(scores, labels) ==
          doctest::Approx(conc / static_cast<double>(pairs))
              .epsilon(1e-15));
  }
  SUBCASE("invariant under strictly increasing transforms") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0, 1);
    std::vector<double> scores(40);
    std::vector<double> labels(40);
    for (std::size_t i = 0; i < 40; ++i) {
      scores[i] = normal(rng);
      labels[i] = i % 3 == 0 ? 1.0 : 0.0;
    }
    std::vector<double> warped = scores;
    for (double& s : warped) s = std::exp(3.0 * s) + 7.0;
    CHECK(auc(scores, labels) == auc(warped, labels));
  }
  SUBCASE("degenerate inputs raise") {
    CHECK_THROWS_AS(auc(std::vector<double>{}, std::vector<double>{}),
                    MetricError);
    CHECK_THROWS_AS(auc(std::vector<double>{0.4, 0.2},
                        std::vector<double>{1, 1}),
                    MetricError);
    CHECK_THROWS_AS(auc(std::vector<double>{0.4, 0.2},
                        std::vector<double>{1, 0.5}),
                    MetricError);
  }
}

TEST_CASE("relative sparsity pinned cases") {
  std::mt19937_64 rng(5);
  const Dims dims({3, 3, 3});
  const SparseTensor z = random_sparse(dims, 10, rng);
  std::vector<Eigen::MatrixXd> factors;
  for (int k = 0; k < 3; ++k) {
    factors.push_back(Spectrahedron(3, 2).random_point(rng));
  }

  SUBCASE("identical components share equally") {
    // Same factor and weight for every mode of a cubical tensor.
    std::vector<Eigen::MatrixXd> same(3, factors[0]);
    CompletionModel model{dims, {2, 2, 2}, 1.0, {2.0, 2.0, 2.0},
                          same, z,         Formulation::dual};
    // Shares are ||W_k|| over identical lambda; the W_k differ across
    // modes, so use a symmetric z too: a single central entry.
    const SparseTensor zc(dims, {{1, 1, 1}}, {3.0});
    model.z = zc;
    const auto shares = relative_sparsity(model);
    CHECK(shares.size() == 3);
    // Same factor, same weight, single central entry: equal shares.
    CHECK(shares[0] == doctest::Approx(shares[1]).epsilon(1e-12));
    CHECK(shares[1] == doctest::Approx(shares[2]).epsilon(1e-12));
    CHECK(shares[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
  SUBCASE("one dominant weight takes the whole mixture") {
    CompletionModel model{dims,    {2, 2, 2},        1.0,
                          {1e-280, 1e-280, 1.0}, factors,
                          z,       Formulation::dual};
    const auto shares = relative_sparsity(model);
    CHECK(shares[2] == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("matches the densified oracle") {
    CompletionModel model{dims,   {2, 2, 2}, 1.0, {0.5, 1.5, 1.0},
                          factors, z,        Formulation::dual};
    const DenseTensor zd = DenseTensor::from_sparse(z);
    std::vector<double> norms;
    for (int k = 0; k < 3; ++k) {
      const Eigen::MatrixXd w =
          factors[static_cast<std::size_t>(k)] *
          factors[static_cast<std::size_t>(k)].transpose() * zd.unfold(k);
      norms.push_back(model.lambdas[static_cast<std::size_t>(k)] * w.norm());
    }
    const double total = norms[0] + norms[1] + norms[2];
    const auto shares = relative_sparsity(model);
    for (int k = 0; k < 3; ++k) {
      CHECK(shares[static_cast<std::size_t>(k)] ==
            doctest::Approx(norms[static_cast<std::size_t>(k)] / total)
                .epsilon(1e-10));
    }
  }
  SUBCASE("all-zero model raises") {
    CompletionModel model{dims,   {2, 2, 2}, 1.0, {0.5, 1.5, 1.0},
                          factors, SparseTensor::zeros(z.support_ptr()),
                          Formulation::dual};
    CHECK_THROWS_AS(relative_sparsity(model), MetricError);
  }
}

TEST_CASE("predict") {
  std::mt19937_64 rng(7);
  const Dims dims({3, 3, 2});
  SynthData data = synth_generate(dims, {2, 2, 1}, 0.9, 0.0, 17);

  SUBCASE("training-fit values match the residual path") {
    LsCost cost(data.train, data.planted.lambdas, {2, 2, 1});
    ProductPoint x{data.planted.factors, data.planted.z};
    const SparseTensor pred = predict(data.planted, data.train.support_ptr());
    const SparseTensor& r = cost.residual(x);
    for (std::size_t e = 0; e < pred.nnz(); ++e) {
      CHECK(pred.value(e) ==
            doctest::Approx(r.value(e) + data.train.value(e)).epsilon(1e-12));
    }
  }
  SUBCASE("out of range query raises") {
    CHECK_THROWS_AS(Support::make(dims, {{0, 0, 5}}), ShapeError);
  }
  SUBCASE("scalar mode hand algebra") {
    const Dims d2({1, 2});
    const SparseTensor z(d2, {{0, 0}, {0, 1}}, {2.0, -1.0});
    Eigen::MatrixXd u0(1, 1), u1(2, 1);
    u0 << 1.0;
    u1 << std::sqrt(0.5), std::sqrt(0.5);
    CompletionModel model{d2, {1, 1}, 1.0, {2.0, 3.0}, {u0, u1}, z,
                          Formulation::ls};
    // W = 2 * (z x_0 1*1^T) + 3 * (z x_1 u1 u1^T); by hand at (0,0):
    // 2*z(0,0) + 3*(0.5*(z00+z01)) = 4 + 1.5 = 5.5.
    const SparseTensor pred =
        predict(model, Support::make(d2, {{0, 0}}));
    CHECK(pred.value(0) == doctest::Approx(5.5).epsilon(1e-14));
  }
}

TEST_CASE("synth_generate") {
  const Dims dims({4, 3, 3});
  SUBCASE("full density covers all entries disjointly") {
    SynthData data = synth_generate(dims, {2, 2, 2}, 1.0, 0.0, 3);
    CHECK(data.train.nnz() + data.test.nnz() ==
          static_cast<std::size_t>(dims.total()));
    // Disjoint: merged support must not contain duplicates.
    std::vector<std::vector<Index>> all;
    for (std::size_t e = 0; e < data.train.nnz(); ++e) {
      all.emplace_back(data.train.index(e).begin(),
                       data.train.index(e).end());
    }
    for (std::size_t e = 0; e < data.test.nnz(); ++e) {
      all.emplace_back(data.test.index(e).begin(), data.test.index(e).end());
    }
    CHECK_NOTHROW(Support::make(dims, all));
  }
  SUBCASE("fixed seed replays bit-identically") {
    SynthData a = synth_generate(dims, {2, 2, 2}, 0.5, 0.1, 11);
    SynthData b = synth_generate(dims, {2, 2, 2}, 0.5, 0.1, 11);
    CHECK(a.train.support().flat() == b.train.support().flat());
    CHECK(std::equal(a.train.values().begin(), a.train.values().end(),
                     b.train.values().begin()));
    CHECK(a.test.support().flat() == b.test.support().flat());
  }
  SUBCASE("zero noise: test values equal the ground truth accessor") {
    SynthData data = synth_generate(dims, {2, 2, 2}, 0.6, 0.0, 5);
    const SparseTensor truth = predict(data.planted, data.test.support_ptr());
    for (std::size_t e = 0; e < truth.nnz(); ++e) {
      CHECK(data.test.value(e) == truth.value(e));
    }
    // Train values too, since sigma = 0.
    const SparseTensor train_truth =
        predict(data.planted, data.train.support_ptr());
    for (std::size_t e = 0; e < train_truth.nnz(); ++e) {
      CHECK(data.train.value(e) == train_truth.value(e));
    }
  }
  SUBCASE("density too low raises") {
    CHECK_THROWS_AS(synth_generate(dims, {2, 2, 2}, 1e-9, 0.0, 5),
                    ConfigError);
  }
}

TEST_CASE("cross_validate") {
  std::mt19937_64 rng(9);
  const Dims dims({6, 5, 4});
  SynthData data = synth_generate(dims, {2, 2, 2}, 0.55, 0.0, 23);
  TrainOptions base;
  base.formulation = Formulation::ls;
  base.ranks = {2, 2, 2};
  base.tr.max_outer_iters = 30;
  base.tr.grad_tol = 1e-7;
  base.tr.seed = 1;

  SUBCASE("singleton grid returns that lambda") {
    const CvResult cv = cross_validate(data.train, base, {0.25}, 3, 5);
    CHECK(cv.best_lambda == 0.25);
    CHECK(cv.rows.size() == 1);
    CHECK(cv.rows[0].fold_rmse.size() == 3);
  }
  SUBCASE("default grid spans seven decades") {
    const auto grid = default_lambda_grid();
    CHECK(grid.size() == 7);
    CHECK(grid.front() == 1e-3);
    CHECK(grid.back() == 1e3);
  }
  SUBCASE("chosen lambda minimizes the emitted table") {
    const CvResult cv =
        cross_validate(data.train, base, {1e-3, 1e-1, 1e1}, 3, 5);
    double best = std::numeric_limits<double>::infinity();
    double arg = 0.0;
    for (const auto& row : cv.rows) {
      if (row.mean < best) {
        best = row.mean;
        arg = row.lambda;
      }
    }
    CHECK(cv.best_lambda == arg);
  }
  SUBCASE("deterministic given the seed") {
    const CvResult a = cross_validate(data.train, base, {1e-2, 1.0}, 3, 5);
    const CvResult b = cross_validate(data.train, base, {1e-2, 1.0}, 3, 5);
    CHECK(a.best_lambda == b.best_lambda);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].fold_rmse == b.rows[i].fold_rmse);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(cross_validate(data.train, base, {}, 3, 5), ConfigError);
    const SparseTensor tiny(dims, {{0, 0, 0}, {1, 1, 1}}, {1.0, 2.0});
    CHECK_THROWS_AS(cross_validate(tiny, base, {1.0}, 5, 5), Error);
  }
}

TEST_CASE("unfolding spectral norm by power iteration") {
  std::mt19937_64 rng(13);
  const Dims dims({5, 4, 3});
  const SparseTensor e = random_sparse(dims, 30, rng);
  const DenseTensor ed = DenseTensor::from_sparse(e);
  for (int k = 0; k < 3; ++k) {
    const double direct = ed.unfold(k).jacobiSvd().singularValues()(0);
    CHECK(unfolding_spectral_norm(e, k) ==
          doctest::Approx(direct).epsilon(1e-8));
  }
  CHECK(unfolding_spectral_norm(SparseTensor::zeros(e.support_ptr()), 0) ==
        0.0);
}

TEST_CASE("reconstruction bound check") {
  const Dims dims({4, 4, 4});
  SynthData clean = synth_generate(dims, {2, 2, 2}, 1.0, 0.0, 31);
  // Assemble the full W* from both splits' ground truth.
  const auto full = Support::full(dims);
  const SparseTensor w_star = predict(clean.planted, full);

  TRConfig tr;
  tr.max_outer_iters = 150;
  tr.grad_tol = 1e-9;

  SUBCASE("zero noise: assumption vacuous, tiny discrepancy") {
    const SparseTensor zero_noise = SparseTensor::zeros(full);
    const BoundCheckReport rep =
        reconstruction_bound_check(w_star, zero_noise, 0.5, {2, 2, 2}, tr);
    CHECK(rep.assumption_ok);
    CHECK(std::isinf(rep.assumption_threshold));
    for (const auto& interp : rep.interpretations) {
      CHECK(interp.holds);
      CHECK(interp.discrepancy <= 1e-4 * rep.w_star_norm);
    }
  }
  SUBCASE("zero everything") {
    const SparseTensor zeros = SparseTensor::zeros(full);
    const BoundCheckReport rep =
        reconstruction_bound_check(zeros, zeros, 0.5, {2, 2, 2}, tr);
    for (const auto& interp : rep.interpretations) {
      CHECK(interp.discrepancy <= 1e-10);
      CHECK(interp.holds);
    }
  }
  SUBCASE("assumption flag responds to lambda") {
    std::mt19937_64 rng(37);
    std::normal_distribution<double> normal(0.0, 0.05);
    std::vector<double> noise_vals(static_cast<std::size_t>(dims.total()));
    for (double& v : noise_vals) v = normal(rng);
    const SparseTensor noise(full, std::move(noise_vals));
    const double thr = 1.0 / std::sqrt([&] {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double sv = unfolding_spectral_norm(noise, k);
        s += sv * sv;
      }
      return s;
    }());
    const BoundCheckReport ok =
        reconstruction_bound_check(w_star, noise, 0.9 * thr, {2, 2, 2}, tr);
    CHECK(ok.assumption_ok);
    const BoundCheckReport bad =
        reconstruction_bound_check(w_star, noise, 2.0 * thr, {2, 2, 2}, tr);
    CHECK_FALSE(bad.assumption_ok);
  }
  SUBCASE("partially observed input raises") {
    const BoundCheckReport* ignored = nullptr;
    (void)ignored;
    CHECK_THROWS_AS(reconstruction_bound_check(clean.train, clean.train, 0.5,
                                               {2, 2, 2}, tr),
                    Error);
  }
}

TEST_CASE("train smoke: both formulations reduce the objective") {
  const Dims dims({6, 6, 6});
  SynthData data = synth_generate(dims, {2, 2, 2}, 0.5, 0.0, 41);
  const double zero_rmse =
      rmse(SparseTensor::zeros(data.test.support_ptr()), data.test);

  for (Formulation f : {Formulation::ls, Formulation::dual}) {
    TrainOptions opt;
    opt.formulation = f;
    opt.ranks = {2, 2, 2};
    opt.lambda = f == Formulation::dual ? 10.0 : 1e-2;
    opt.tr.max_outer_iters = 120;
    opt.tr.grad_tol = 1e-8;
    opt.tr.seed = 3;
    const TrainResult res = train(data.train, opt);
    const double test_rmse =
        rmse(predict(res.model, data.test.support_ptr()), data.test);
    CHECK(test_rmse < zero_rmse);
    CHECK(res.model.lambda == opt.lambda);
    // Unit-norm factors survived the whole run.
    for (const auto& u : res.model.factors) {
      CHECK(std::abs(u.norm() - 1.0) < 1e-12);
    }
  }
}
