#include "ttc/spectrahedron.hpp"

#include <cmath>
#include <string>

namespace ttc {

Spectrahedron::Spectrahedron(Index n, Index r) : n_(n), r_(r) {
  if (n < 1 || r < 1) throw ShapeError("spectrahedron needs n, r >= 1");
  if (r > n) {
    throw ShapeError("rank " + std::to_string(r) + " exceeds mode size " +
                     std::to_string(n));
  }
}

Index Spectrahedron::dim() const { return n_ * r_ - 1 - r_ * (r_ - 1) / 2; }

void Spectrahedron::check_shape(const Eigen::MatrixXd& m,
                                const char* what) const {
  if (m.rows() != n_ || m.cols() != r_) {
    throw ShapeError(std::string(what) + " is " + std::to_string(m.rows()) +
                     "x" + std::to_string(m.cols()) + ", expected " +
                     std::to_string(n_) + "x" + std::to_string(r_));
  }
}

bool Spectrahedron::is_point(const Eigen::MatrixXd& u, double tol) const {
  if (u.rows() != n_ || u.cols() != r_) return false;
  return std::abs(u.norm() - 1.0) <= tol;
}

Eigen::MatrixXd Spectrahedron::project_tangent(const Eigen::MatrixXd& u,
                                               const Eigen::MatrixXd& z) const {
  check_shape(u, "point");
  check_shape(z, "ambient vector");
  const double t = (z.array() * u.array()).sum();
  return z - t * u;
}

Eigen::MatrixXd Spectrahedron::project_horizontal(
    const Eigen::MatrixXd& u, const Eigen::MatrixXd& xi) const {
  check_shape(u, "point");
  check_shape(xi, "tangent vector");
  const Eigen::MatrixXd gram = u.transpose() * u;
  const Eigen::MatrixXd rhs = u.transpose() * xi - xi.transpose() * u;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of the Gram matrix failed");
  }
  const Eigen::VectorXd d = es.eigenvalues();
  const Eigen::MatrixXd q = es.eigenvectors();
  const double clamp = 1e-14 * std::max(d.maxCoeff(), 0.0);
  Eigen::MatrixXd m = q.transpose() * rhs * q;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double denom = d(i) + d(j);
      m(i, j) = denom > clamp ? m(i, j) / denom : 0.0;
    }
  }
  const Eigen::MatrixXd lambda = q * m * q.transpose();
  return xi - u * lambda;
}

Eigen::MatrixXd Spectrahedron::retract(const Eigen::MatrixXd& u,
                                       const Eigen::MatrixXd& xi) const {
  check_shape(u, "point");
  check_shape(xi, "tangent vector");
  const Eigen::MatrixXd moved = u + xi;
  const double norm = moved.norm();
  if (norm < 1e-300) {
    throw DegenerateStepError("retraction step annihilates the point");
  }
  return moved / norm;
}

Eigen::MatrixXd Spectrahedron::egrad_to_rgrad(
    const Eigen::MatrixXd& u, const Eigen::MatrixXd& egrad) const {
  return project_horizontal(u, project_tangent(u, egrad));
}

Eigen::MatrixXd Spectrahedron::ehess_to_rhess(const Eigen::MatrixXd& u,
                                              const Eigen::MatrixXd& egrad,
                                              const Eigen::MatrixXd& ehess_xi,
                                              const Eigen::MatrixXd& xi) const {
  check_shape(egrad, "euclidean gradient");
  check_shape(ehess_xi, "euclidean hessian product");
  check_shape(xi, "tangent vector");
  const double gu = (egrad.array() * u.array()).sum();
  const double gxi = (egrad.array() * xi.array()).sum();
  const double hu = (ehess_xi.array() * u.array()).sum();
  const Eigen::MatrixXd t = ehess_xi - gu * xi - (gxi + hu) * u;
  return project_horizontal(u, project_tangent(u, t));
}

double Spectrahedron::metric(const Eigen::MatrixXd& xi,
                             const Eigen::MatrixXd& eta) const {
  check_shape(xi, "tangent vector");
  check_shape(eta, "tangent vector");
  return (xi.array() * eta.array()).sum();
}

Eigen::MatrixXd Spectrahedron::random_point(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd u(n_, r_);
  for (Eigen::Index j = 0; j < r_; ++j) {
    for (Eigen::Index i = 0; i < n_; ++i) u(i, j) = normal(rng);
  }
  return u / u.norm();
}

Eigen::MatrixXd Spectrahedron::random_tangent(const Eigen::MatrixXd& u,
                                              std::mt19937_64& rng) const {
  check_shape(u, "point");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd v(n_, r_);
  for (Eigen::Index j = 0; j < r_; ++j) {
    for (Eigen::Index i = 0; i < n_; ++i) v(i, j) = normal(rng);
  }
  v = project_horizontal(u, project_tangent(u, v));
  const double norm = v.norm();
  if (norm < 1e-300) return Eigen::MatrixXd::Zero(n_, r_);
  return v / norm;
}

}  // namespace ttc
