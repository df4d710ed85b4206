#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ttc/errors.hpp"

namespace ttc {

using Index = std::int64_t;

// Shape of a K-mode tensor, K >= 2, all sizes >= 1.
class Dims {
 public:
  explicit Dims(std::vector<Index> sizes);

  int order() const { return static_cast<int>(sizes_.size()); }
  Index size(int mode) const;
  Index total() const { return total_; }
  const std::vector<Index>& sizes() const { return sizes_; }

  friend bool operator==(const Dims& a, const Dims& b) {
    return a.sizes_ == b.sizes_;
  }

 private:
  std::vector<Index> sizes_;
  Index total_ = 0;
};

// Position of a tensor entry in the mode-k unfolding. Columns are ordered
// colexicographically over the modes j != k, increasing j.
std::pair<Index, Index> unfold_index(std::span<const Index> index, int mode,
                                     const Dims& dims);

// Grouping of the entries of a fixed support by their mode-k fiber.
// `order` lists entry ids fiber by fiber, ascending row within a fiber;
// `keys` holds the (sorted, distinct) unfolding column of each fiber.
struct FiberIndex {
  std::vector<Index> keys;
  std::vector<std::size_t> offsets;  // keys.size() + 1 entries into `order`
  std::vector<std::size_t> order;
  std::vector<Index> rows;  // row index of order[p], aligned with `order`

  std::size_t fiber_count() const { return keys.size(); }
  // Fiber id for an unfolding column, or npos when the column is empty.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find(Index key) const;
};

// Immutable index set of a sparse tensor: strictly sorted lexicographic
// K-tuples, all within dims. Fiber groupings are built on first use and
// cached; instances are shared between tensors via shared_ptr.
class Support {
 public:
  // `flat` holds nnz*K coordinates, entry-major. Must be strictly sorted
  // lexicographically (no duplicates) and within dims.
  Support(Dims dims, std::vector<Index> flat);

  Support(const Support&) = delete;
  Support& operator=(const Support&) = delete;

  const Dims& dims() const { return dims_; }
  std::size_t nnz() const { return nnz_; }
  std::span<const Index> index(std::size_t entry) const {
    return {flat_.data() + entry * dims_.order(),
            static_cast<std::size_t>(dims_.order())};
  }
  const std::vector<Index>& flat() const { return flat_; }

  const FiberIndex& fibers(int mode) const;

  bool same_as(const Support& other) const;

  // Sorts, validates and deduplicates-checks a list of K-tuples.
  static std::shared_ptr<const Support> make(
      const Dims& dims, const std::vector<std::vector<Index>>& indices);
  static std::shared_ptr<const Support> make_sorted(Dims dims,
                                                    std::vector<Index> flat);
  // All dims.total() entries, lexicographic.
  static std::shared_ptr<const Support> full(const Dims& dims);

 private:
  Dims dims_;
  std::size_t nnz_;
  std::vector<Index> flat_;
  mutable std::mutex fiber_mutex_;
  mutable std::vector<std::unique_ptr<FiberIndex>> fiber_cache_;
};

// K-mode coordinate tensor with fixed support. Value semantics: copies
// share the (immutable) support and own their values.
class SparseTensor {
 public:
  SparseTensor(std::shared_ptr<const Support> support,
               std::vector<double> values);
  SparseTensor(const Dims& dims, const std::vector<std::vector<Index>>& indices,
               std::vector<double> values);

  static SparseTensor zeros(std::shared_ptr<const Support> support);

  const Dims& dims() const { return support_->dims(); }
  std::size_t nnz() const { return support_->nnz(); }
  const Support& support() const { return *support_; }
  const std::shared_ptr<const Support>& support_ptr() const {
    return support_;
  }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  double value(std::size_t entry) const { return values_[entry]; }
  std::span<const Index> index(std::size_t entry) const {
    return support_->index(entry);
  }

  SparseTensor with_values(std::vector<double> values) const;

 private:
  std::shared_ptr<const Support> support_;
  std::vector<double> values_;
};

// ---- Kernels --------------------------------------------------------------
//
// All kernels run fiber-by-fiber over the coordinate list and never
// materialize an unfolding; costs are O(|support| * r) unless noted.

// || u^T Z_k ||_F^2 for an n_k x r factor u.
double gram_norm(const SparseTensor& z, int mode, const Eigen::MatrixXd& u);

// A_k (B_k^T u) for tensors a, b on the same support; n_k x r result.
Eigen::MatrixXd outer_apply(const SparseTensor& a, const SparseTensor& b,
                            int mode, const Eigen::MatrixXd& u);

// Z_k (Z_k^T u); the Gram form of a single tensor.
inline Eigen::MatrixXd zzt_u(const SparseTensor& z, int mode,
                             const Eigen::MatrixXd& u) {
  return outer_apply(z, z, mode, u);
}

// Values of (Z x_mode lhs * rhs_t^T) at `out`. lhs and rhs_t are both
// n_mode x r; the n x n mode matrix is never formed. Cost
// O((|z| + |out| log F) * r) with F the fiber count of z.
SparseTensor mode_product_on_support(const SparseTensor& z, int mode,
                                     const Eigen::MatrixXd& lhs,
                                     const Eigen::MatrixXd& rhs_t,
                                     std::shared_ptr<const Support> out);

// a*x + y on a common support.
SparseTensor axpy(double a, const SparseTensor& x, const SparseTensor& y);
double inner(const SparseTensor& x, const SparseTensor& y);
double frob_norm(const SparseTensor& x);

void check_aligned(const SparseTensor& x, const SparseTensor& y);

}  // namespace ttc
