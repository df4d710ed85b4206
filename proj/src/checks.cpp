#include "ttc/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "ttc/dual_problem.hpp"
#include "ttc/io.hpp"
#include "ttc/ls_problem.hpp"

namespace ttc::checks {

namespace {

// Keeps timed work observable so the optimizer cannot drop it.
volatile double bench_sink = 0.0;

std::size_t flat_of(std::span<const Index> index, const Dims& dims) {
  std::size_t flat = 0;
  std::size_t stride = 1;
  for (int j = 0; j < dims.order(); ++j) {
    flat += static_cast<std::size_t>(index[j]) * stride;
    stride *= static_cast<std::size_t>(dims.size(j));
  }
  return flat;
}

}  // namespace

DenseTensor DenseTensor::from_sparse(const SparseTensor& t) {
  DenseTensor out(t.dims());
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    out.data[flat_of(t.index(e), t.dims())] = t.value(e);
  }
  return out;
}

double& DenseTensor::at(std::span<const Index> index) {
  return data[flat_of(index, dims)];
}

double DenseTensor::at(std::span<const Index> index) const {
  return data[flat_of(index, dims)];
}

Eigen::MatrixXd DenseTensor::unfold(int mode) const {
  Index cols = 1;
  for (int j = 0; j < dims.order(); ++j) {
    if (j != mode) cols *= dims.size(j);
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dims.size(mode), cols);
  std::vector<Index> t(static_cast<std::size_t>(dims.order()), 0);
  for (Index e = 0; e < dims.total(); ++e) {
    const auto rc = unfold_index(t, mode, dims);
    m(rc.first, rc.second) = data[flat_of(t, dims)];
    for (int j = dims.order() - 1; j >= 0; --j) {
      if (++t[static_cast<std::size_t>(j)] < dims.size(j)) break;
      t[static_cast<std::size_t>(j)] = 0;
    }
  }
  return m;
}

DenseTensor DenseTensor::fold(const Eigen::MatrixXd& m, int mode,
                              const Dims& d) {
  DenseTensor out(d);
  std::vector<Index> t(static_cast<std::size_t>(d.order()), 0);
  for (Index e = 0; e < d.total(); ++e) {
    const auto rc = unfold_index(t, mode, d);
    out.data[flat_of(t, d)] = m(rc.first, rc.second);
    for (int j = d.order() - 1; j >= 0; --j) {
      if (++t[static_cast<std::size_t>(j)] < d.size(j)) break;
      t[static_cast<std::size_t>(j)] = 0;
    }
  }
  return out;
}

std::vector<double> DenseTensor::values_on(const Support& support) const {
  std::vector<double> vals(support.nnz());
  for (std::size_t e = 0; e < support.nnz(); ++e) {
    vals[e] = data[flat_of(support.index(e), dims)];
  }
  return vals;
}

Eigen::MatrixXd dense_mode_op(const Support& support, int mode,
                              const Eigen::MatrixXd& s) {
  const std::size_t n = support.nnz();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  std::vector<std::pair<Index, Index>> rc(n);
  for (std::size_t e = 0; e < n; ++e) {
    rc[e] = unfold_index(support.index(e), mode, support.dims());
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (rc[a].second == rc[b].second) {
        m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            s(rc[a].first, rc[b].first);
      }
    }
  }
  return m;
}

ProductPoint shifted(const ProductPoint& x, const ProductVec& xi, double t) {
  ProductPoint out;
  out.factors.reserve(x.factors.size());
  for (std::size_t k = 0; k < x.factors.size(); ++k) {
    out.factors.push_back(x.factors[k] + t * xi.factors[k]);
  }
  if (x.z) {
    std::vector<double> vals(x.z->values().begin(), x.z->values().end());
    if (xi.z) {
      const auto dv = xi.z->values();
      for (std::size_t e = 0; e < vals.size(); ++e) vals[e] += t * dv[e];
    }
    out.z = SparseTensor(x.z->support_ptr(), std::move(vals));
  }
  return out;
}

double ambient_inner(const ProductVec& a, const ProductVec& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.factors.size(); ++k) {
    acc += (a.factors[k].array() * b.factors[k].array()).sum();
  }
  if (a.z && b.z) acc += inner(*a.z, *b.z);
  return acc;
}

namespace {

const std::vector<double>& fd_steps() {
  static const std::vector<double> steps = {1e-3, 3e-4, 1e-4, 3e-5,
                                            1e-5, 3e-6, 1e-6};
  return steps;
}

}  // namespace

double fd_gradient_error(CostModel& cost, const ProductPoint& x,
                         const ProductVec& xi) {
  const ProductVec g = cost.egrad(x);
  const double exact = ambient_inner(g, xi);
  double best = std::numeric_limits<double>::infinity();
  for (double t : fd_steps()) {
    const double fp = cost.value(shifted(x, xi, t));
    const double fm = cost.value(shifted(x, xi, -t));
    const double fd = (fp - fm) / (2.0 * t);
    const double scale = std::max({std::abs(exact), std::abs(fd), 1e-300});
    best = std::min(best, std::abs(fd - exact) / scale);
  }
  return best;
}

double fd_hessian_error(CostModel& cost, const ProductPoint& x,
                        const ProductVec& xi) {
  const ProductVec h = cost.ehess_vec(x, xi);
  double h_norm = std::sqrt(ambient_inner(h, h));
  double best = std::numeric_limits<double>::infinity();
  for (double t : fd_steps()) {
    ProductVec gp = cost.egrad(shifted(x, xi, t));
    const ProductVec gm = cost.egrad(shifted(x, xi, -t));
    gp.axpy(-1.0, gm);
    gp.scale(1.0 / (2.0 * t));
    gp.axpy(-1.0, h);
    const double err = std::sqrt(ambient_inner(gp, gp));
    best = std::min(best, err / std::max(h_norm, 1e-300));
  }
  return best;
}

double hessian_symmetry_error(CostModel& cost, const ProductManifold& manifold,
                              const ProductPoint& x, const ProductVec& xi,
                              const ProductVec& eta) {
  const ProductVec eg = cost.egrad(x);
  const ProductVec h_xi =
      manifold.ehess_to_rhess(x, eg, cost.ehess_vec(x, xi), xi);
  const ProductVec h_eta =
      manifold.ehess_to_rhess(x, eg, cost.ehess_vec(x, eta), eta);
  const double a = manifold.metric(h_xi, eta);
  const double b = manifold.metric(xi, h_eta);
  const double scale =
      std::max({std::abs(a), std::abs(b),
                std::sqrt(manifold.metric(h_xi, h_xi)) *
                    std::sqrt(manifold.metric(eta, eta)),
                1e-300});
  return std::abs(a - b) / scale;
}

GeometryReport geometry_invariants(Index n, Index r, std::uint64_t seed) {
  Spectrahedron s(n, r);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::MatrixXd u = s.random_point(rng);
  Eigen::MatrixXd z(n, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = normal(rng);
  }

  GeometryReport rep;
  const Eigen::MatrixXd pz = s.project_tangent(u, z);
  rep.psi_idempotence = (s.project_tangent(u, pz) - pz).norm();
  rep.tangency =
      std::abs((pz.array() * u.array()).sum()) / std::max(z.norm(), 1e-300);

  const Eigen::MatrixXd h = s.project_horizontal(u, pz);
  rep.pi_idempotence = (s.project_horizontal(u, h) - h).norm();
  rep.horizontal_symmetry =
      (h.transpose() * u - u.transpose() * h).norm() /
      std::max(h.norm(), 1e-300);

  // Residual of the Lyapunov solve reconstructed from the projection.
  const Eigen::MatrixXd gram = u.transpose() * u;
  const Eigen::MatrixXd rhs = u.transpose() * pz - pz.transpose() * u;
  // pz - h = u * lambda, recover lambda by least squares.
  const Eigen::MatrixXd lambda =
      gram.ldlt().solve(u.transpose() * (pz - h));
  rep.lyapunov_residual = (gram * lambda + lambda * gram - rhs).norm();

  const Eigen::MatrixXd xi = s.random_tangent(u, rng);
  rep.retract_norm_error = std::abs(s.retract(u, xi).norm() - 1.0);

  // ||R(t xi) - (u + t xi)|| should shrink as t^2.
  std::vector<double> log_t, log_d;
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double d = (s.retract(u, t * xi) - (u + t * xi)).norm();
    if (d > 0) {
      log_t.push_back(std::log(t));
      log_d.push_back(std::log(d));
    }
  }
  if (log_t.size() >= 2) {
    double mt = 0, md = 0;
    for (std::size_t i = 0; i < log_t.size(); ++i) {
      mt += log_t[i];
      md += log_d[i];
    }
    mt /= static_cast<double>(log_t.size());
    md /= static_cast<double>(log_t.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < log_t.size(); ++i) {
      num += (log_t[i] - mt) * (log_d[i] - md);
      den += (log_t[i] - mt) * (log_t[i] - mt);
    }
    rep.retract_slope = num / den;
  } else {
    rep.retract_slope = 2.0;  // xi == 0 (zero-dimensional factor)
  }
  return rep;
}

void BenchResult::write_csv(std::ostream& os) const {
  os << "omega,seconds\n";
  for (const auto& s : samples) {
    os << s.omega << "," << format_double(s.seconds) << "\n";
  }
  os << "# fitted exponent " << format_double(exponent) << "\n";
}

BenchResult run_bench(Formulation formulation, const std::vector<Index>& ranks,
                      const std::vector<Index>& omegas, std::uint64_t seed) {
  if (omegas.size() < 2) throw ConfigError("bench needs at least two sizes");
  Index max_omega = *std::max_element(omegas.begin(), omegas.end());
  const auto side = static_cast<Index>(
      std::ceil(std::cbrt(static_cast<double>(max_omega))));
  const Dims dims({side, side, side});
  if (ranks.size() != 3) throw ConfigError("bench uses a 3-mode tensor");

  BenchResult out;
  for (Index omega : omegas) {
    // Random support of the requested size with random values.
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(omega));
    std::vector<Index> flats(static_cast<std::size_t>(dims.total()));
    std::iota(flats.begin(), flats.end(), Index{0});
    std::shuffle(flats.begin(), flats.end(), rng);
    flats.resize(static_cast<std::size_t>(omega));
    std::vector<std::vector<Index>> idx;
    idx.reserve(flats.size());
    for (Index flat : flats) {
      std::vector<Index> t(3);
      for (int j = 0; j < 3; ++j) {
        t[static_cast<std::size_t>(j)] = flat % dims.size(j);
        flat /= dims.size(j);
      }
      idx.push_back(std::move(t));
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> vals(static_cast<std::size_t>(omega));
    for (auto& v : vals) v = normal(rng);
    SparseTensor y(dims, idx, vals);

    std::vector<double> lambdas;
    for (int k = 0; k < 3; ++k) {
      lambdas.push_back(1e-2 * static_cast<double>(dims.size(k)));
    }

    const int hess_applies = 5;
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 3; ++rep) {
      // Fresh cost per repetition so caches never skip the inner solve.
      std::mt19937_64 prng(seed);
      double elapsed = 0.0;
      if (formulation == Formulation::dual) {
        DualOptions opts;
        opts.inner_tol = 1e-30;  // run the fixed inner budget every time
        opts.inner_max_iters = 20;
        DualCost cost(y, lambdas, ranks, opts);
        ProductManifold manifold = cost.manifold();
        ProductPoint x = manifold.random_point(prng);
        std::vector<ProductVec> dirs;
        for (int i = 0; i < hess_applies; ++i) {
          dirs.push_back(manifold.random_tangent(x, prng));
        }
        const auto t0 = std::chrono::steady_clock::now();
        double acc = cost.value(x);
        const ProductVec eg = cost.egrad(x);
        const ProductVec g = manifold.egrad_to_rgrad(x, eg);
        acc += manifold.metric(g, g);
        for (const auto& d : dirs) {
          const ProductVec h =
              manifold.ehess_to_rhess(x, eg, cost.ehess_vec(x, d), d);
          acc += manifold.metric(h, h);
        }
        const ProductPoint moved = manifold.retract(x, g);
        acc += moved.factors[0](0, 0);
        elapsed = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        bench_sink = acc;
      } else {
        LsCost cost(y, lambdas, ranks);
        ProductManifold manifold = cost.manifold();
        ProductPoint x = manifold.random_point(prng);
        std::vector<ProductVec> dirs;
        for (int i = 0; i < hess_applies; ++i) {
          dirs.push_back(manifold.random_tangent(x, prng));
        }
        const auto t0 = std::chrono::steady_clock::now();
        double acc = cost.value(x);
        const ProductVec eg = cost.egrad(x);
        const ProductVec g = manifold.egrad_to_rgrad(x, eg);
        acc += manifold.metric(g, g);
        for (const auto& d : dirs) {
          const ProductVec h =
              manifold.ehess_to_rhess(x, eg, cost.ehess_vec(x, d), d);
          acc += manifold.metric(h, h);
        }
        const ProductPoint moved = manifold.retract(x, g);
        acc += moved.factors[0](0, 0);
        elapsed = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        bench_sink = acc;
      }
      best = std::min(best, elapsed);
    }
    out.samples.push_back({omega, best});
  }

  double mx = 0, my = 0;
  for (const auto& s : out.samples) {
    mx += std::log(static_cast<double>(s.omega));
    my += std::log(s.seconds);
  }
  mx /= static_cast<double>(out.samples.size());
  my /= static_cast<double>(out.samples.size());
  double num = 0, den = 0;
  for (const auto& s : out.samples) {
    const double dx = std::log(static_cast<double>(s.omega)) - mx;
    num += dx * (std::log(s.seconds) - my);
    den += dx * dx;
  }
  out.exponent = num / den;
  return out;
}

namespace {

std::string describe(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

SparseTensor random_sparse(const Dims& dims, std::size_t nnz,
                           std::mt19937_64& rng) {
  std::vector<Index> flats(static_cast<std::size_t>(dims.total()));
  std::iota(flats.begin(), flats.end(), Index{0});
  std::shuffle(flats.begin(), flats.end(), rng);
  flats.resize(std::min(nnz, flats.size()));
  std::vector<std::vector<Index>> idx;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> vals;
  for (Index flat : flats) {
    std::vector<Index> t(static_cast<std::size_t>(dims.order()));
    for (int j = 0; j < dims.order(); ++j) {
      t[static_cast<std::size_t>(j)] = flat % dims.size(j);
      flat /= dims.size(j);
    }
    idx.push_back(std::move(t));
    vals.push_back(normal(rng));
  }
  return SparseTensor(dims, idx, vals);
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  std::vector<CheckResult> results;
  const auto check = [&](const std::string& name, bool pass,
                         const std::string& detail) {
    results.push_back({name, pass, detail});
  };

  std::mt19937_64 rng(seed);

  // Fold/unfold round trip through the dense reference.
  {
    const Dims dims({3, 4, 2});
    SparseTensor t = random_sparse(dims, 24, rng);
    DenseTensor dense = DenseTensor::from_sparse(t);
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k) {
      DenseTensor back = DenseTensor::fold(dense.unfold(k), k, dims);
      for (std::size_t i = 0; i < dense.data.size(); ++i) {
        if (dense.data[i] != back.data[i]) {
          ok = false;
          break;
        }
      }
    }
    check("fold_unfold_round_trip", ok, "dims (3,4,2), all modes");
  }

  // Sparse kernels against the dense unfolding route.
  {
    const Dims dims({3, 3, 2});
    SparseTensor z = random_sparse(dims, 9, rng);
    DenseTensor dense = DenseTensor::from_sparse(z);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      Spectrahedron s(dims.size(k), 2);
      const Eigen::MatrixXd u = s.random_point(rng);
      const Eigen::MatrixXd zk = dense.unfold(k);
      worst = std::max(worst, std::abs(gram_norm(z, k, u) -
                                       (u.transpose() * zk).squaredNorm()));
      worst = std::max(
          worst, (zzt_u(z, k, u) - zk * (zk.transpose() * u)).norm());
      const SparseTensor prod =
          mode_product_on_support(z, k, u, u, z.support_ptr());
      DenseTensor folded =
          DenseTensor::fold(u * u.transpose() * zk, k, dims);
      const auto expect = folded.values_on(z.support());
      for (std::size_t e = 0; e < expect.size(); ++e) {
        worst = std::max(worst, std::abs(prod.value(e) - expect[e]));
      }
    }
    check("kernels_match_dense_oracle", worst < 1e-12, describe(worst));
  }

  // Geometry invariants on a few seeded instances.
  {
    double worst = 0.0;
    double slope_lo = 2.0, slope_hi = 2.0;
    for (int i = 0; i < 10; ++i) {
      const Index n = 3 + (i % 5) * 2;
      const Index r = 1 + (i % 3);
      const GeometryReport rep =
          geometry_invariants(n, std::min(n, r), seed + 100 + i);
      worst = std::max({worst, rep.psi_idempotence, rep.pi_idempotence,
                        rep.tangency, rep.horizontal_symmetry,
                        rep.lyapunov_residual, rep.retract_norm_error});
      slope_lo = std::min(slope_lo, rep.retract_slope);
      slope_hi = std::max(slope_hi, rep.retract_slope);
    }
    check("spectrahedron_geometry", worst < 1e-10 && slope_lo > 1.85,
          "worst " + describe(worst) + ", slope in [" + describe(slope_lo) +
              "," + describe(slope_hi) + "]");
  }

  // Inner linear solve against a dense direct solve.
  {
    const Dims dims({3, 3, 3});
    SparseTensor y = random_sparse(dims, 9, rng);
    std::vector<double> lambdas = {0.9, 1.7, 0.4};
    std::vector<Eigen::MatrixXd> factors;
    for (int k = 0; k < 3; ++k) {
      factors.push_back(Spectrahedron(3, 2).random_point(rng));
    }
    InnerSystemOp op{factors, lambdas, y.support_ptr()};
    CgStats stats;
    const SparseTensor zh =
        conjugate_gradient(op, y, nullptr, 1e-13, 200, &stats);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(9, 9);
    for (int k = 0; k < 3; ++k) {
      a += lambdas[static_cast<std::size_t>(k)] *
           dense_mode_op(y.support(), k,
                         factors[static_cast<std::size_t>(k)] *
                             factors[static_cast<std::size_t>(k)].transpose());
    }
    Eigen::VectorXd rhs(9);
    for (int e = 0; e < 9; ++e) rhs(e) = y.value(static_cast<std::size_t>(e));
    const Eigen::VectorXd direct = a.ldlt().solve(rhs);
    double err = 0.0;
    for (int e = 0; e < 9; ++e) {
      err = std::max(err,
                     std::abs(direct(e) - zh.value(static_cast<std::size_t>(e))));
    }
    check("inner_solve_matches_dense", err < 1e-8,
          describe(err) + " after " + std::to_string(stats.iterations) +
              " iterations");
  }

  // Derivative spot checks for both formulations.
  {
    const Dims dims({3, 3, 2});
    SparseTensor y = random_sparse(dims, 10, rng);
    std::vector<double> lambdas = {0.6, 0.6, 0.4};
    std::vector<Index> ranks = {2, 2, 1};

    DualOptions opts;
    opts.inner_tol = 1e-13;
    opts.inner_max_iters = 400;
    DualCost dual(y, lambdas, ranks, opts);
    ProductManifold dm = dual.manifold();
    ProductPoint dx = dm.random_point(rng);
    ProductVec dxi = dm.random_tangent(dx, rng);
    const double dual_g = fd_gradient_error(dual, dx, dxi);
    const double dual_h = fd_hessian_error(dual, dx, dxi);
    check("dual_gradient_fd", dual_g < 1e-6, describe(dual_g));
    check("dual_hessian_fd", dual_h < 1e-5, describe(dual_h));

    LsCost ls(y, lambdas, ranks);
    ProductManifold lm = ls.manifold();
    ProductPoint lx = lm.random_point(rng);
    ProductVec lxi = lm.random_tangent(lx, rng);
    const double ls_g = fd_gradient_error(ls, lx, lxi);
    const double ls_h = fd_hessian_error(ls, lx, lxi);
    check("ls_gradient_fd", ls_g < 1e-6, describe(ls_g));
    check("ls_hessian_fd", ls_h < 1e-5, describe(ls_h));
  }

  // Trust region on the toy sphere-projection cost.
  {
    struct ProjCost final : CostModel {
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
    ProductManifold manifold({Spectrahedron(6, 1)});
    ProjCost cost;
    std::mt19937_64 prng(seed + 5);
    const Eigen::MatrixXd target = manifold.part(0).random_point(prng);
    cost.a = 2.0 * target;
    ProductPoint x0 = manifold.random_point(prng);
    TRConfig cfg;
    cfg.grad_tol = 1e-9;
    cfg.max_outer_iters = 60;
    const TRResult res = tr_solve(cost, manifold, x0, cfg);
    const double dist =
        std::min((res.x.factors[0] - target).norm(),
                 (res.x.factors[0] + target).norm());
    check("tr_sphere_projection", res.converged && dist < 1e-6,
          "distance " + describe(dist) + ", " +
              std::to_string(res.trace.iters.size()) + " iterations");
  }

  // Deterministic replay: same seed, byte-identical model.
  {
    const Dims dims({6, 5, 4});
    SynthData data = synth_generate(dims, {2, 2, 2}, 0.5, 0.0, seed + 9);
    TrainOptions opt;
    opt.formulation = Formulation::ls;
    opt.ranks = {2, 2, 2};
    opt.lambda = 1e-2;
    opt.tr.max_outer_iters = 25;
    opt.tr.seed = seed + 10;
    const TrainResult a = train(data.train, opt);
    const TrainResult b = train(data.train, opt);
    std::ostringstream sa, sb;
    write_model(sa, a.model);
    write_model(sb, b.model);
    check("train_deterministic", sa.str() == sb.str(),
          sa.str() == sb.str() ? "model files identical"
                               : "model files differ");
  }

  // AUC rank statistic against the pairwise definition.
  {
    const std::vector<double> scores = {0.1, 0.4, 0.35, 0.8, 0.35, 0.7};
    const std::vector<double> labels = {0, 0, 1, 1, 0, 1};
    double concordant = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      for (std::size_t j = 0; j < scores.size(); ++j) {
        if (labels[i] == 1.0 && labels[j] == 0.0) {
          ++pairs;
          if (scores[i] > scores[j]) {
            concordant += 1.0;
          } else if (scores[i] == scores[j]) {
            concordant += 0.5;
          }
        }
      }
    }
    const double expected = concordant / static_cast<double>(pairs);
    const double got = auc(scores, labels);
    check("auc_pairwise_oracle", std::abs(got - expected) < 1e-15,
          describe(got));
  }

  return results;
}

}  // namespace ttc::checks
