#include "ttc/product_manifold.hpp"

#include <string>

namespace ttc {

void ProductVec::axpy(double a, const ProductVec& x) {
  if (x.factors.size() != factors.size() || x.z.has_value() != z.has_value()) {
    throw ShapeError("product vector layout mismatch");
  }
  for (std::size_t k = 0; k < factors.size(); ++k) {
    factors[k].noalias() += a * x.factors[k];
  }
  if (z) {
    check_aligned(*z, *x.z);
    auto& vals = z->mutable_values();
    const auto xv = x.z->values();
    for (std::size_t e = 0; e < vals.size(); ++e) vals[e] += a * xv[e];
  }
}

void ProductVec::scale(double a) {
  for (auto& f : factors) f *= a;
  if (z) {
    for (auto& v : z->mutable_values()) v *= a;
  }
}

ProductManifold::ProductManifold(std::vector<Spectrahedron> parts,
                                 std::shared_ptr<const Support> z_support)
    : parts_(std::move(parts)), z_support_(std::move(z_support)) {
  if (parts_.empty()) throw ShapeError("empty product manifold");
}

Index ProductManifold::dim() const {
  Index d = 0;
  for (const auto& p : parts_) d += p.dim();
  if (z_support_) d += static_cast<Index>(z_support_->nnz());
  return d;
}

void ProductManifold::check_point(const ProductPoint& x) const {
  if (static_cast<int>(x.factors.size()) != factor_count()) {
    throw ShapeError("point has " + std::to_string(x.factors.size()) +
                     " factors, manifold expects " +
                     std::to_string(factor_count()));
  }
  if (has_z() != x.z.has_value()) {
    throw ShapeError("point flat component does not match the manifold");
  }
  if (x.z && !x.z->support().same_as(*z_support_)) {
    throw SupportError("flat component lives on a different support");
  }
}

void ProductManifold::check_vec(const ProductVec& v, const char* what) const {
  if (static_cast<int>(v.factors.size()) != factor_count() ||
      v.z.has_value() != has_z()) {
    throw ShapeError(std::string(what) + ": component count mismatch");
  }
}

bool ProductManifold::is_point(const ProductPoint& x, double tol) const {
  if (static_cast<int>(x.factors.size()) != factor_count()) return false;
  if (x.z.has_value() != has_z()) return false;
  for (int k = 0; k < factor_count(); ++k) {
    if (!parts_[k].is_point(x.factors[k], tol)) return false;
  }
  return true;
}

double ProductManifold::metric(const ProductVec& xi,
                               const ProductVec& eta) const {
  check_vec(xi, "metric");
  check_vec(eta, "metric");
  double acc = 0.0;
  for (int k = 0; k < factor_count(); ++k) {
    acc += parts_[k].metric(xi.factors[k], eta.factors[k]);
  }
  if (has_z()) acc += inner(*xi.z, *eta.z);
  return acc;
}

ProductVec ProductManifold::project(const ProductPoint& x,
                                    const ProductVec& ambient) const {
  check_point(x);
  check_vec(ambient, "project");
  ProductVec out;
  out.factors.reserve(parts_.size());
  for (int k = 0; k < factor_count(); ++k) {
    out.factors.push_back(parts_[k].project_horizontal(
        x.factors[k],
        parts_[k].project_tangent(x.factors[k], ambient.factors[k])));
  }
  out.z = ambient.z;
  return out;
}

ProductPoint ProductManifold::retract(const ProductPoint& x,
                                      const ProductVec& xi) const {
  check_point(x);
  check_vec(xi, "retract");
  ProductPoint out;
  out.factors.reserve(parts_.size());
  for (int k = 0; k < factor_count(); ++k) {
    out.factors.push_back(parts_[k].retract(x.factors[k], xi.factors[k]));
  }
  if (has_z()) out.z = axpy(1.0, *xi.z, *x.z);
  return out;
}

ProductVec ProductManifold::egrad_to_rgrad(const ProductPoint& x,
                                           const ProductVec& eg) const {
  return project(x, eg);
}

ProductVec ProductManifold::ehess_to_rhess(const ProductPoint& x,
                                           const ProductVec& eg,
                                           const ProductVec& ehess_xi,
                                           const ProductVec& xi) const {
  check_point(x);
  check_vec(eg, "ehess_to_rhess");
  check_vec(ehess_xi, "ehess_to_rhess");
  check_vec(xi, "ehess_to_rhess");
  ProductVec out;
  out.factors.reserve(parts_.size());
  for (int k = 0; k < factor_count(); ++k) {
    out.factors.push_back(parts_[k].ehess_to_rhess(
        x.factors[k], eg.factors[k], ehess_xi.factors[k], xi.factors[k]));
  }
  out.z = ehess_xi.z;
  return out;
}

ProductPoint ProductManifold::random_point(std::mt19937_64& rng) const {
  ProductPoint x;
  x.factors.reserve(parts_.size());
  for (const auto& p : parts_) x.factors.push_back(p.random_point(rng));
  if (has_z()) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> vals(z_support_->nnz());
    for (auto& v : vals) v = normal(rng);
    x.z = SparseTensor(z_support_, std::move(vals));
  }
  return x;
}

ProductVec ProductManifold::random_tangent(const ProductPoint& x,
                                           std::mt19937_64& rng) const {
  check_point(x);
  ProductVec v;
  v.factors.reserve(parts_.size());
  for (int k = 0; k < factor_count(); ++k) {
    v.factors.push_back(parts_[k].random_tangent(x.factors[k], rng));
  }
  if (has_z()) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> vals(z_support_->nnz());
    double sq = 0.0;
    for (auto& val : vals) {
      val = normal(rng);
      sq += val * val;
    }
    const double norm = std::sqrt(sq);
    if (norm > 0) {
      for (auto& val : vals) val /= norm;
    }
    v.z = SparseTensor(z_support_, std::move(vals));
  }
  return v;
}

ProductVec ProductManifold::zero_vec() const {
  ProductVec v;
  v.factors.reserve(parts_.size());
  for (const auto& p : parts_) {
    v.factors.push_back(Eigen::MatrixXd::Zero(p.n(), p.r()));
  }
  if (has_z()) v.z = SparseTensor::zeros(z_support_);
  return v;
}

}  // namespace ttc
