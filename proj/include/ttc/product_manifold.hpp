#pragma once

#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ttc/spectrahedron.hpp"

namespace ttc {

// Point on S^{n_1}_{r_1} x ... x S^{n_K}_{r_K}, optionally extended by a
// flat component: a sparse tensor with fixed support.
struct ProductPoint {
  std::vector<Eigen::MatrixXd> factors;
  std::optional<SparseTensor> z;
};

// Tangent vector (or ambient vector) with the same layout as a point.
struct ProductVec {
  std::vector<Eigen::MatrixXd> factors;
  std::optional<SparseTensor> z;

  // this += a * x. Layouts must match.
  void axpy(double a, const ProductVec& x);
  void scale(double a);
};

class ProductManifold {
 public:
  explicit ProductManifold(std::vector<Spectrahedron> parts,
                           std::shared_ptr<const Support> z_support = nullptr);

  int factor_count() const { return static_cast<int>(parts_.size()); }
  const Spectrahedron& part(int k) const { return parts_[k]; }
  bool has_z() const { return z_support_ != nullptr; }
  const std::shared_ptr<const Support>& z_support() const { return z_support_; }

  // Sum of factor dimensions, plus |support| for the flat component.
  Index dim() const;

  bool is_point(const ProductPoint& x, double tol = 1e-12) const;

  double metric(const ProductVec& xi, const ProductVec& eta) const;

  // Tangent followed by horizontal projection per factor; identity on the
  // flat component.
  ProductVec project(const ProductPoint& x, const ProductVec& ambient) const;
  ProductPoint retract(const ProductPoint& x, const ProductVec& xi) const;
  ProductVec egrad_to_rgrad(const ProductPoint& x, const ProductVec& eg) const;
  ProductVec ehess_to_rhess(const ProductPoint& x, const ProductVec& eg,
                            const ProductVec& ehess_xi,
                            const ProductVec& xi) const;

  ProductPoint random_point(std::mt19937_64& rng) const;
  ProductVec random_tangent(const ProductPoint& x, std::mt19937_64& rng) const;

  ProductVec zero_vec() const;

 private:
  void check_point(const ProductPoint& x) const;
  void check_vec(const ProductVec& v, const char* what) const;

  std::vector<Spectrahedron> parts_;
  std::shared_ptr<const Support> z_support_;
};

}  // namespace ttc
