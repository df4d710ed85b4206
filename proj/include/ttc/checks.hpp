#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ttc/model.hpp"
#include "ttc/pipeline.hpp"
#include "ttc/product_manifold.hpp"
#include "ttc/tr_solver.hpp"

// Reference implementations and verification routines. Everything here
// recomputes results through dense linear algebra built only on
// unfold_index, independent of the fiber kernels it cross-checks. Used by
// the test suites and the selftest/bench subcommands; not part of the
// solver path.
namespace ttc::checks {

// Dense K-mode tensor, mode-0-fastest flat layout.
struct DenseTensor {
  Dims dims;
  std::vector<double> data;

  explicit DenseTensor(const Dims& d)
      : dims(d), data(static_cast<std::size_t>(d.total()), 0.0) {}

  static DenseTensor from_sparse(const SparseTensor& t);
  double& at(std::span<const Index> index);
  double at(std::span<const Index> index) const;
  Eigen::MatrixXd unfold(int mode) const;
  static DenseTensor fold(const Eigen::MatrixXd& m, int mode, const Dims& d);
  std::vector<double> values_on(const Support& support) const;
};

// |support| x |support| matrix of z |-> (z x_mode S)_support for a dense
// symmetric-or-not mode matrix S.
Eigen::MatrixXd dense_mode_op(const Support& support, int mode,
                              const Eigen::MatrixXd& s);

// ---- Finite differences ----------------------------------------------------

// x + t * xi in the ambient space (no manifold projection).
ProductPoint shifted(const ProductPoint& x, const ProductVec& xi, double t);

double ambient_inner(const ProductVec& a, const ProductVec& b);

// Best relative agreement over a step grid between central differences of
// the cost and <egrad, xi>.
double fd_gradient_error(CostModel& cost, const ProductPoint& x,
                         const ProductVec& xi);

// Same for central differences of egrad against ehess_vec.
double fd_hessian_error(CostModel& cost, const ProductPoint& x,
                        const ProductVec& xi);

// |<H xi, eta> - <xi, H eta>| / scale for the Riemannian Hessian.
double hessian_symmetry_error(CostModel& cost, const ProductManifold& manifold,
                              const ProductPoint& x, const ProductVec& xi,
                              const ProductVec& eta);

// ---- Geometry --------------------------------------------------------------

struct GeometryReport {
  double psi_idempotence = 0.0;     // ||Psi(Psi(z)) - Psi(z)||
  double pi_idempotence = 0.0;      // ||Pi(Pi(xi)) - Pi(xi)||
  double tangency = 0.0;            // |trace(Psi(z)^T u)| / ||z||
  double horizontal_symmetry = 0.0; // ||V^T U - U^T V|| / ||V||
  double lyapunov_residual = 0.0;
  double retract_norm_error = 0.0;  // | ||R(xi)|| - 1 |
  double retract_slope = 0.0;       // log-log slope of ||R(t xi)-(u+t xi)||
};

GeometryReport geometry_invariants(Index n, Index r, std::uint64_t seed);

// ---- Selftest / bench ------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<CheckResult> run_selftest(std::uint64_t seed = 42);

struct BenchSample {
  Index omega = 0;
  double seconds = 0.0;
};

struct BenchResult {
  std::vector<BenchSample> samples;
  double exponent = 0.0;  // fitted log-log slope of seconds vs omega
  void write_csv(std::ostream& os) const;
};

// Times one trust-region iteration's worth of work (cost + gradient +
// a fixed number of Hessian applies plus the manifold conversions) at
// each support size, with fixed inner budgets so the work per iteration
// is deterministic.
BenchResult run_bench(Formulation formulation, const std::vector<Index>& ranks,
                      const std::vector<Index>& omegas, std::uint64_t seed);

}  // namespace ttc::checks
