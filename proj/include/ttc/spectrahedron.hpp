#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "ttc/errors.hpp"
#include "ttc/sparse_tensor.hpp"

namespace ttc {

// Geometry of { U in R^{n x r} : ||U||_F = 1 } seen as a Riemannian
// quotient by the right action of the orthogonal group O(r). Tangent
// vectors are represented by their horizontal lifts: matrices V with
// trace(V^T U) = 0 and V^T U = U^T V.
class Spectrahedron {
 public:
  Spectrahedron(Index n, Index r);

  Index n() const { return n_; }
  Index r() const { return r_; }
  // Dimension of the quotient: n r - 1 - r (r - 1) / 2.
  Index dim() const;

  bool is_point(const Eigen::MatrixXd& u, double tol = 1e-12) const;

  // Projection onto the tangent space of the unit Frobenius sphere:
  // Z - trace(Z^T U) U. Idempotent.
  Eigen::MatrixXd project_tangent(const Eigen::MatrixXd& u,
                                  const Eigen::MatrixXd& z) const;

  // Projection of a tangent vector onto the horizontal space: xi - U L,
  // where L solves the Lyapunov equation (U^T U) L + L (U^T U) =
  // U^T xi - xi^T U. Solved through the eigendecomposition of U^T U;
  // eigenvalue pairs below 1e-14 of the largest are treated as the
  // pseudo-inverse regime.
  Eigen::MatrixXd project_horizontal(const Eigen::MatrixXd& u,
                                     const Eigen::MatrixXd& xi) const;

  // (U + xi) / ||U + xi||_F. Throws DegenerateStepError when U + xi
  // vanishes.
  Eigen::MatrixXd retract(const Eigen::MatrixXd& u,
                          const Eigen::MatrixXd& xi) const;

  Eigen::MatrixXd egrad_to_rgrad(const Eigen::MatrixXd& u,
                                 const Eigen::MatrixXd& egrad) const;

  // Riemannian Hessian along a horizontal xi from the Euclidean gradient
  // and the directional derivative of the Euclidean gradient along xi.
  Eigen::MatrixXd ehess_to_rhess(const Eigen::MatrixXd& u,
                                 const Eigen::MatrixXd& egrad,
                                 const Eigen::MatrixXd& ehess_xi,
                                 const Eigen::MatrixXd& xi) const;

  double metric(const Eigen::MatrixXd& xi, const Eigen::MatrixXd& eta) const;

  Eigen::MatrixXd random_point(std::mt19937_64& rng) const;
  Eigen::MatrixXd random_tangent(const Eigen::MatrixXd& u,
                                 std::mt19937_64& rng) const;

 private:
  void check_shape(const Eigen::MatrixXd& m, const char* what) const;
  Index n_;
  Index r_;
};

}  // namespace ttc
