#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ttc/product_manifold.hpp"

namespace ttc {

// Cost with Euclidean derivatives over a product manifold point. The
// trust-region loop converts them to Riemannian quantities through the
// manifold. Implementations may cache per-point state; a single instance
// is not reentrant, distinct instances are independent.
class CostModel {
 public:
  virtual ~CostModel() = default;
  virtual double value(const ProductPoint& x) = 0;
  virtual ProductVec egrad(const ProductPoint& x) = 0;
  virtual ProductVec ehess_vec(const ProductPoint& x, const ProductVec& xi) = 0;
};

struct TRConfig {
  int max_outer_iters = 500;
  double grad_tol = 1e-6;
  double initial_radius = 0.0;  // <= 0: max_radius / 8
  double max_radius = 0.0;      // <= 0: sqrt(manifold dimension)
  int tcg_max_iters = 0;        // <= 0: min(manifold dimension, 100)
  double tcg_kappa = 0.1;
  double tcg_theta = 1.0;
  double rho_accept = 0.1;
  double rho_shrink_threshold = 0.25;
  double rho_expand_threshold = 0.75;
  std::uint64_t seed = 0;

  // Fills the defaults that depend on the manifold and validates.
  TRConfig resolved(Index manifold_dim) const;
};

enum class TcgStop {
  negative_curvature,
  exceeded_radius,
  reached_tolerance,
  max_iterations,
};

const char* to_string(TcgStop reason);

struct TRIterRecord {
  int iter = 0;
  double cost = 0.0;       // cost of the candidate produced this iteration
  double grad_norm = 0.0;  // Riemannian gradient norm at the start
  double radius = 0.0;     // radius used for the subproblem
  double rho = 0.0;
  TcgStop tcg_reason = TcgStop::max_iterations;
  int tcg_iters = 0;
  bool accepted = false;
  double model_decrease = 0.0;  // -m(eta), nonnegative by construction
  double seconds = 0.0;
};

struct TRTrace {
  std::vector<TRIterRecord> iters;
  void write_csv(std::ostream& os) const;
};

struct TRResult {
  ProductPoint x;
  TRTrace trace;
  bool converged = false;
  double final_cost = 0.0;
  double final_grad_norm = 0.0;
  int accepted_steps = 0;
};

// Riemannian trust region with a Steihaug-Toint truncated-CG subproblem
// solver. Terminates when the Riemannian gradient norm drops below
// cfg.grad_tol or after cfg.max_outer_iters iterations. Deterministic for
// fixed (cost, x0, cfg).
TRResult tr_solve(CostModel& cost, const ProductManifold& manifold,
                  const ProductPoint& x0, const TRConfig& cfg);

}  // namespace ttc
