#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "ttc/checks.hpp"
#include "ttc/sparse_tensor.hpp"

using namespace ttc;
using checks::DenseTensor;
using testutil::random_sparse;

namespace {

std::vector<Index> v(std::initializer_list<Index> l) { return {l}; }

}  // namespace

TEST_CASE("unfold_index pinned examples") {
  const Dims d222({2, 2, 2});
  // First mode: all-zero secondary indices land in column 0.
  CHECK(unfold_index(v({1, 0, 0}), 0, d222) == std::pair<Index, Index>{1, 0});
  // Enumerated colexicographically: (0,1,1) -> column 1 + 1*2 = 3.
  CHECK(unfold_index(v({0, 1, 1}), 0, d222) == std::pair<Index, Index>{0, 3});
  const Dims d234({2, 3, 4});
  // col = i_0 + i_2 * n_0 = 1 + 3*2.
  CHECK(unfold_index(v({1, 2, 3}), 1, d234) == std::pair<Index, Index>{2, 7});

  CHECK_THROWS_AS(unfold_index(v({2, 0, 0}), 0, d222), ShapeError);
  CHECK_THROWS_AS(unfold_index(v({0, 0, 0}), 3, d222), ShapeError);
}

TEST_CASE("unfold_index enumeration is a bijection") {
  const Dims dims({3, 2, 4});
  for (int mode = 0; mode < 3; ++mode) {
    std::set<std::pair<Index, Index>> seen;
    std::vector<Index> t(3, 0);
    for (Index e = 0; e < dims.total(); ++e) {
      const auto rc = unfold_index(t, mode, dims);
      CHECK(rc.first == t[static_cast<std::size_t>(mode)]);
      CHECK(rc.second >= 0);
      CHECK(rc.second < dims.total() / dims.size(mode));
      CHECK(seen.insert(rc).second);
      for (int j = 2; j >= 0; --j) {
        if (++t[static_cast<std::size_t>(j)] < dims.size(j)) break;
        t[static_cast<std::size_t>(j)] = 0;
      }
    }
    CHECK(seen.size() == static_cast<std::size_t>(dims.total()));
  }
}

TEST_CASE("fold-unfold round trip on small dense tensors") {
  std::mt19937_64 rng(7);
  for (const auto& sizes :
       {std::vector<Index>{2, 2}, {3, 4}, {2, 3, 4}, {4, 4, 4}, {2, 2, 2, 3}}) {
    const Dims dims(sizes);
    const SparseTensor t =
        random_sparse(dims, static_cast<std::size_t>(dims.total()), rng);
    const DenseTensor dense = DenseTensor::from_sparse(t);
    for (int mode = 0; mode < dims.order(); ++mode) {
      const DenseTensor back =
          DenseTensor::fold(dense.unfold(mode), mode, dims);
      CHECK(back.data == dense.data);
    }
  }
}

TEST_CASE("construction validates and sorts") {
  const Dims dims({2, 2, 2});
  SUBCASE("duplicates rejected") {
    CHECK_THROWS_AS(
        SparseTensor(dims, {{0, 0, 0}, {0, 0, 0}}, {1.0, 2.0}),
        SupportError);
  }
  SUBCASE("out of range rejected") {
    CHECK_THROWS_AS(SparseTensor(dims, {{0, 0, 2}}, {1.0}), ShapeError);
  }
  SUBCASE("non-finite rejected") {
    CHECK_THROWS_AS(SparseTensor(dims, {{0, 0, 0}}, {1.0 / 0.0}),
                    NumericalError);
  }
  SUBCASE("indices sorted on construction") {
    const SparseTensor t(dims, {{1, 1, 1}, {0, 0, 0}}, {2.0, 1.0});
    CHECK(t.value(0) == 1.0);
    CHECK(t.value(1) == 2.0);
    CHECK(t.index(0)[0] == 0);
  }
}

TEST_CASE("gram_norm pinned examples") {
  const Dims dims({2, 2, 2});
  SUBCASE("zero tensor") {
    const SparseTensor z(dims, {{0, 1, 1}}, {0.0});
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2, 1);
    u(0, 0) = 1.0;
    CHECK(gram_norm(z, 0, u) == 0.0);
  }
  SUBCASE("single entry against a unit column") {
    const SparseTensor z(dims, {{0, 0, 0}}, {2.0});
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2, 1);
    u(0, 0) = 1.0;
    CHECK(gram_norm(z, 0, u) == doctest::Approx(4.0).epsilon(1e-15));
  }
  SUBCASE("errors") {
    const SparseTensor z(dims, {{0, 0, 0}}, {2.0});
    CHECK_THROWS_AS(gram_norm(z, 5, Eigen::MatrixXd::Zero(2, 1)), ShapeError);
    CHECK_THROWS_AS(gram_norm(z, 0, Eigen::MatrixXd::Zero(3, 1)), ShapeError);
  }
}

TEST_CASE("zzt_u pinned examples") {
  const Dims dims({3, 2, 2});
  SUBCASE("zero tensor gives the zero matrix") {
    const SparseTensor z(dims, {{0, 0, 0}, {2, 1, 1}}, {0.0, 0.0});
    Eigen::MatrixXd u(3, 2);
    u << 1, 0, 0, 1, 0, 0;
    CHECK(zzt_u(z, 0, u).norm() == 0.0);
  }
  SUBCASE("single fiber rank-one identity") {
    // One mode-0 fiber holding the vector z_f; Z_k Z_k^T U = z_f (z_f^T U).
    const SparseTensor z(dims, {{0, 1, 0}, {1, 1, 0}, {2, 1, 0}},
                         {1.0, -2.0, 0.5});
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd u = testutil::random_factor(3, 2, rng);
    Eigen::Vector3d zf(1.0, -2.0, 0.5);
    const Eigen::MatrixXd expect = zf * (zf.transpose() * u);
    CHECK((zzt_u(z, 0, u) - expect).norm() < 1e-14);
  }
}

TEST_CASE("kernels match the dense unfolding oracle exhaustively") {
  // All dims up to (5,4,3), a spread of supports, every mode.
  std::mt19937_64 rng(11);
  for (Index n1 : {2, 3, 5}) {
    for (Index n2 : {2, 4}) {
      for (Index n3 : {1, 3}) {
        std::vector<Index> sizes = {n1, n2};
        if (n3 > 1) sizes.push_back(n3);
        const Dims dims(sizes);
        const auto total = static_cast<std::size_t>(dims.total());
        for (std::size_t nnz :
             {std::size_t{1}, total / 2 > 0 ? total / 2 : 1, total}) {
          const SparseTensor z = random_sparse(dims, nnz, rng);
          const DenseTensor dense = DenseTensor::from_sparse(z);
          for (int mode = 0; mode < dims.order(); ++mode) {
            const Index r = std::min<Index>(2, dims.size(mode));
            const Eigen::MatrixXd u =
                testutil::random_factor(dims.size(mode), r, rng);
            const Eigen::MatrixXd zk = dense.unfold(mode);

            const double direct = (u.transpose() * zk).squaredNorm();
            CHECK(gram_norm(z, mode, u) ==
                  doctest::Approx(direct).epsilon(1e-12));

            const Eigen::MatrixXd zz = zk * (zk.transpose() * u);
            CHECK((zzt_u(z, mode, u) - zz).norm() <=
                  1e-12 * std::max(1.0, zz.norm()));

            const Eigen::MatrixXd w =
                testutil::random_factor(dims.size(mode), r, rng);
            const SparseTensor prod =
                mode_product_on_support(z, mode, u, w, z.support_ptr());
            const DenseTensor folded = DenseTensor::fold(
                u * (w.transpose() * zk), mode, dims);
            const auto expect = folded.values_on(z.support());
            for (std::size_t e = 0; e < expect.size(); ++e) {
              CHECK(prod.value(e) ==
                    doctest::Approx(expect[e]).epsilon(1e-12));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("mode_product_on_support pinned examples") {
  SUBCASE("scalar mode") {
    // n_0 = 1 with L = Rt = [c]: the output is c^2 Z on the support.
    const Dims dims({1, 3, 2});
    std::mt19937_64 rng(5);
    const SparseTensor z = random_sparse(dims, 4, rng);
    Eigen::MatrixXd c(1, 1);
    c << 0.75;
    const SparseTensor out =
        mode_product_on_support(z, 0, c, c, z.support_ptr());
    for (std::size_t e = 0; e < z.nnz(); ++e) {
      CHECK(out.value(e) ==
            doctest::Approx(0.5625 * z.value(e)).epsilon(1e-15));
    }
  }
  SUBCASE("disjoint output support reads zero fibers") {
    const Dims dims({2, 2, 2});
    const SparseTensor z(dims, {{0, 0, 0}, {1, 0, 0}}, {1.0, 2.0});
    const auto out_sup = Support::make(dims, {{0, 1, 1}, {1, 1, 1}});
    std::mt19937_64 rng(9);
    const Eigen::MatrixXd u = testutil::random_factor(2, 2, rng);
    const SparseTensor out = mode_product_on_support(z, 0, u, u, out_sup);
    CHECK(frob_norm(out) == 0.0);
  }
  SUBCASE("dense 2x2x2 case matches the fold oracle") {
    const Dims dims({2, 2, 2});
    std::mt19937_64 rng(13);
    const SparseTensor z = random_sparse(dims, 8, rng);
    const Eigen::MatrixXd u = testutil::random_factor(2, 2, rng);
    const DenseTensor dense = DenseTensor::from_sparse(z);
    const DenseTensor expect = DenseTensor::fold(
        u * u.transpose() * dense.unfold(1), 1, dims);
    const SparseTensor out =
        mode_product_on_support(z, 1, u, u, z.support_ptr());
    const auto ev = expect.values_on(z.support());
    for (std::size_t e = 0; e < z.nnz(); ++e) {
      CHECK(out.value(e) == doctest::Approx(ev[e]).epsilon(1e-12));
    }
  }
  SUBCASE("shape errors") {
    const Dims dims({2, 2, 2});
    const SparseTensor z(dims, {{0, 0, 0}}, {1.0});
    const Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 2);
    const Eigen::MatrixXd ok = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(mode_product_on_support(z, 0, bad, ok, z.support_ptr()),
                    ShapeError);
    CHECK_THROWS_AS(
        mode_product_on_support(z, 0, ok, Eigen::MatrixXd::Zero(2, 1),
                                z.support_ptr()),
        ShapeError);
  }
}

TEST_CASE("mode_product_on_support is linear in z and the factors") {
  const Dims dims({3, 4, 2});
  std::mt19937_64 rng(21);
  const SparseTensor z1 = random_sparse(dims, 10, rng);
  std::vector<double> other(z1.values().begin(), z1.values().end());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : other) v = normal(rng);
  const SparseTensor z2 = z1.with_values(other);
  const Eigen::MatrixXd u = testutil::random_factor(4, 2, rng);
  const Eigen::MatrixXd w = testutil::random_factor(4, 2, rng);

  const SparseTensor lhs = mode_product_on_support(
      axpy(2.5, z1, z2), 1, u, w, z1.support_ptr());
  const SparseTensor rhs =
      axpy(2.5, mode_product_on_support(z1, 1, u, w, z1.support_ptr()),
           mode_product_on_support(z2, 1, u, w, z1.support_ptr()));
  CHECK(frob_norm(axpy(-1.0, lhs, rhs)) < 1e-12);

  // Linear in the left factor.
  const SparseTensor a = mode_product_on_support(z1, 1, u + w, w,
                                                 z1.support_ptr());
  const SparseTensor b =
      axpy(1.0, mode_product_on_support(z1, 1, u, w, z1.support_ptr()),
           mode_product_on_support(z1, 1, w, w, z1.support_ptr()));
  CHECK(frob_norm(axpy(-1.0, a, b)) < 1e-12);
}

TEST_CASE("sparse arithmetic") {
  const Dims dims({3, 3, 3});
  std::mt19937_64 rng(17);
  const SparseTensor x = random_sparse(dims, 5, rng);
  std::vector<double> yv(x.values().begin(), x.values().end());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : yv) v = normal(rng);
  const SparseTensor y = x.with_values(yv);

  SUBCASE("inner(x,x) = frob^2") {
    CHECK(inner(x, x) ==
          doctest::Approx(frob_norm(x) * frob_norm(x)).epsilon(1e-15));
  }
  SUBCASE("axpy(0,x,y) = y") {
    const SparseTensor r = axpy(0.0, x, y);
    for (std::size_t e = 0; e < r.nnz(); ++e) CHECK(r.value(e) == y.value(e));
  }
  SUBCASE("scalar loop oracle") {
    const SparseTensor r = axpy(1.75, x, y);
    double ip = 0.0;
    for (std::size_t e = 0; e < x.nnz(); ++e) {
      CHECK(r.value(e) ==
            doctest::Approx(1.75 * x.value(e) + y.value(e)).epsilon(1e-15));
      ip += x.value(e) * y.value(e);
    }
    CHECK(inner(x, y) == doctest::Approx(ip).epsilon(1e-15));
  }
  SUBCASE("support mismatch raises") {
    const SparseTensor z = random_sparse(dims, 4, rng);
    CHECK_THROWS_AS(axpy(1.0, x, z), SupportError);
    CHECK_THROWS_AS(inner(x, z), SupportError);
  }
}

TEST_CASE("support closure: outputs sorted, in range, duplicate-free") {
  const Dims dims({4, 3, 2});
  std::mt19937_64 rng(31);
  const SparseTensor z = random_sparse(dims, 12, rng);
  const Eigen::MatrixXd u = testutil::random_factor(3, 2, rng);
  const SparseTensor out =
      mode_product_on_support(z, 1, u, u, z.support_ptr());
  const Support& s = out.support();
  for (std::size_t e = 1; e < s.nnz(); ++e) {
    const auto a = s.index(e - 1);
    const auto b = s.index(e);
    CHECK(std::lexicographical_compare(a.begin(), a.end(), b.begin(),
                                       b.end()));
  }
}
