#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ttc/tr_solver.hpp"

using namespace ttc;
using testutil::random_sparse;

namespace {

// 1/2 ||U - A||^2 over one spectrahedron; the minimizer is A / ||A||.
struct SphereProjectionCost final : CostModel {
  Eigen::MatrixXd a;
  double value(const ProductPoint& x) override {
    return 0.5 * (x.factors[0] - a).squaredNorm();
  }
  ProductVec egrad(const ProductPoint& x) override {
    ProductVec g;
    g.factors.push_back(x.factors[0] - a);
    return g;
  }
  ProductVec ehess_vec(const ProductPoint&, const ProductVec& xi) override {
    ProductVec h;
    h.factors.push_back(xi.factors[0]);
    return h;
  }
};

// Strictly convex quadratic on the flat component only; the single 1x1
// spectrahedron factor is zero-dimensional.
struct FlatQuadraticCost final : CostModel {
  Eigen::MatrixXd q;  // SPD
  Eigen::VectorXd b;
  Eigen::VectorXd vec(const ProductPoint& x) const {
    Eigen::VectorXd v(q.rows());
    for (Eigen::Index e = 0; e < v.size(); ++e) {
      v(e) = x.z->value(static_cast<std::size_t>(e));
    }
    return v;
  }
  double value(const ProductPoint& x) override {
    const Eigen::VectorXd v = vec(x);
    return 0.5 * v.dot(q * v) - b.dot(v);
  }
  ProductVec egrad(const ProductPoint& x) override {
    const Eigen::VectorXd g = q * vec(x) - b;
    ProductVec out;
    out.factors.push_back(Eigen::MatrixXd::Zero(1, 1));
    std::vector<double> vals(static_cast<std::size_t>(g.size()));
    for (Eigen::Index e = 0; e < g.size(); ++e) {
      vals[static_cast<std::size_t>(e)] = g(e);
    }
    out.z = SparseTensor(x.z->support_ptr(), std::move(vals));
    return out;
  }
  ProductVec ehess_vec(const ProductPoint& x, const ProductVec& xi) override {
    Eigen::VectorXd v(q.rows());
    for (Eigen::Index e = 0; e < v.size(); ++e) {
      v(e) = xi.z->value(static_cast<std::size_t>(e));
    }
    const Eigen::VectorXd h = q * v;
    ProductVec out;
    out.factors.push_back(Eigen::MatrixXd::Zero(1, 1));
    std::vector<double> vals(static_cast<std::size_t>(h.size()));
    for (Eigen::Index e = 0; e < h.size(); ++e) {
      vals[static_cast<std::size_t>(e)] = h(e);
    }
    out.z = SparseTensor(x.z->support_ptr(), std::move(vals));
    return out;
  }
};

}  // namespace

TEST_CASE("converged start returns immediately") {
  Spectrahedron s(4, 2);
  ProductManifold m({s});
  std::mt19937_64 rng(3);
  SphereProjectionCost cost;
  ProductPoint x0;
  x0.factors.push_back(s.random_point(rng));
  cost.a = 2.0 * x0.factors[0];  // x0 is already the minimizer
  TRConfig cfg;
  cfg.grad_tol = 1e-8;
  const TRResult res = tr_solve(cost, m, x0, cfg);
  CHECK(res.converged);
  CHECK(res.accepted_steps == 0);
  CHECK(res.trace.iters.empty());
  CHECK((res.x.factors[0] - x0.factors[0]).norm() == 0.0);
}

TEST_CASE("sphere projection toy problem") {
  // r = 1: the quotient is trivial, so the closed-form sphere projection
  // A / ||A|| is the exact minimizer.
  Spectrahedron s(8, 1);
  ProductManifold m({s});
  std::mt19937_64 rng(11);
  SphereProjectionCost cost;
  const Eigen::MatrixXd target = s.random_point(rng);
  cost.a = 2.0 * target;
  ProductPoint x0;
  x0.factors.push_back(s.random_point(rng));
  TRConfig cfg;
  cfg.grad_tol = 1e-8;
  cfg.max_outer_iters = 30;
  const TRResult res = tr_solve(cost, m, x0, cfg);
  CHECK(res.converged);
  CHECK(res.final_grad_norm < 1e-8);
  // Minimizer of 1/2||U - 2 U0||^2 on the unit sphere is U0.
  CHECK((res.x.factors[0] - target).norm() < 1e-6);
  CHECK(res.final_cost == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("tcg solves a flat quadratic like a direct solver") {
  const Dims dims({4, 3});
  std::mt19937_64 rng(13);
  const SparseTensor y = random_sparse(dims, 12, rng);
  ProductManifold m({Spectrahedron(1, 1)}, y.support_ptr());

  FlatQuadraticCost cost;
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(12, 12);
  cost.q = a.transpose() * a + 12.0 * Eigen::MatrixXd::Identity(12, 12);
  cost.b = Eigen::VectorXd::Random(12);

  ProductPoint x0;
  x0.factors.push_back(Eigen::MatrixXd::Ones(1, 1));
  x0.z = SparseTensor::zeros(y.support_ptr());

  TRConfig cfg;
  cfg.grad_tol = 1e-12;
  cfg.max_outer_iters = 50;
  cfg.max_radius = 1e9;       // boundary never interferes
  cfg.initial_radius = 1e8;
  cfg.tcg_max_iters = 12;     // dimension of the flat part
  cfg.tcg_kappa = 1e-14;      // effectively exact inner solves
  cfg.tcg_theta = 2.0;
  const TRResult res = tr_solve(cost, m, x0, cfg);

  const Eigen::VectorXd direct = cost.q.ldlt().solve(cost.b);
  Eigen::VectorXd got(12);
  for (Eigen::Index e = 0; e < 12; ++e) {
    got(e) = res.x.z->value(static_cast<std::size_t>(e));
  }
  CHECK((got - direct).norm() < 1e-10);
  // Quadratic with exact Hessian: one Newton step.
  CHECK(res.accepted_steps <= 2);
}

TEST_CASE("trace invariants") {
  Spectrahedron s(10, 1);
  ProductManifold m({s});
  std::mt19937_64 rng(17);
  SphereProjectionCost cost;
  cost.a = 1.5 * s.random_point(rng);
  ProductPoint x0;
  x0.factors.push_back(s.random_point(rng));
  TRConfig cfg;
  cfg.grad_tol = 1e-10;
  cfg.max_outer_iters = 60;
  const TRResult res = tr_solve(cost, m, x0, cfg);
  CHECK(res.converged);

  double last_accepted = std::numeric_limits<double>::infinity();
  for (const auto& it : res.trace.iters) {
    CHECK(it.model_decrease >= -1e-12);
    if (it.accepted) {
      CHECK(it.cost <= last_accepted + 1e-15);
      last_accepted = it.cost;
    }
  }
}

TEST_CASE("determinism: identical runs, identical traces") {
  Spectrahedron s(6, 1);
  ProductManifold m({s});
  std::mt19937_64 rng(19);
  SphereProjectionCost cost_a, cost_b;
  cost_a.a = cost_b.a = 1.5 * s.random_point(rng);
  ProductPoint x0;
  x0.factors.push_back(s.random_point(rng));
  TRConfig cfg;
  cfg.max_outer_iters = 25;
  const TRResult ra = tr_solve(cost_a, m, x0, cfg);
  const TRResult rb = tr_solve(cost_b, m, x0, cfg);
  REQUIRE(ra.trace.iters.size() == rb.trace.iters.size());
  for (std::size_t i = 0; i < ra.trace.iters.size(); ++i) {
    CHECK(ra.trace.iters[i].cost == rb.trace.iters[i].cost);
    CHECK(ra.trace.iters[i].grad_norm == rb.trace.iters[i].grad_norm);
    CHECK(ra.trace.iters[i].radius == rb.trace.iters[i].radius);
    CHECK(ra.trace.iters[i].rho == rb.trace.iters[i].rho);
  }
  CHECK((ra.x.factors[0] - rb.x.factors[0]).norm() == 0.0);
}

TEST_CASE("non-finite initial cost fails fast") {
  struct BadCost final : CostModel {
    double value(const ProductPoint&) override {
      return std::numeric_limits<double>::quiet_NaN();
    }
    ProductVec egrad(const ProductPoint& x) override {
      ProductVec g;
      g.factors.push_back(Eigen::MatrixXd::Zero(x.factors[0].rows(),
                                                x.factors[0].cols()));
      return g;
    }
    ProductVec ehess_vec(const ProductPoint&, const ProductVec& xi) override {
      return xi;
    }
  };
  Spectrahedron s(3, 1);
  ProductManifold m({s});
  std::mt19937_64 rng(23);
  BadCost cost;
  ProductPoint x0;
  x0.factors.push_back(s.random_point(rng));
  CHECK_THROWS_AS(tr_solve(cost, m, x0, TRConfig{}), NumericalError);
}

TEST_CASE("config validation") {
  TRConfig cfg;
  cfg.rho_accept = 0.0;
  CHECK_THROWS_AS(cfg.resolved(10), ConfigError);
  cfg = TRConfig{};
  cfg.rho_shrink_threshold = 0.9;
  CHECK_THROWS_AS(cfg.resolved(10), ConfigError);
  cfg = TRConfig{};
  const TRConfig r = cfg.resolved(16);
  CHECK(r.max_radius == doctest::Approx(4.0));
  CHECK(r.initial_radius == doctest::Approx(0.5));
  CHECK(r.tcg_max_iters == 16);
}
