#include "ttc/sparse_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ttc {

namespace {

std::string tuple_to_string(std::span<const Index> t) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) os << ",";
    os << t[i];
  }
  os << ")";
  return os.str();
}

// Colexicographic column key of an entry in the mode-k unfolding.
Index column_key(const Index* t, int mode, const Dims& dims) {
  Index key = 0;
  Index stride = 1;
  for (int j = 0; j < dims.order(); ++j) {
    if (j == mode) continue;
    key += t[j] * stride;
    stride *= dims.size(j);
  }
  return key;
}

void check_mode(int mode, const Dims& dims) {
  if (mode < 0 || mode >= dims.order()) {
    throw ShapeError("mode " + std::to_string(mode) + " out of range for a " +
                     std::to_string(dims.order()) + "-mode tensor");
  }
}

void check_factor_rows(const Eigen::MatrixXd& u, int mode, const Dims& dims,
                       const char* what) {
  if (u.rows() != dims.size(mode)) {
    throw ShapeError(std::string(what) + " has " + std::to_string(u.rows()) +
                     " rows, expected " + std::to_string(dims.size(mode)) +
                     " for mode " + std::to_string(mode));
  }
}

}  // namespace

Dims::Dims(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) {
    throw ShapeError("a tensor needs at least 2 modes, got " +
                     std::to_string(sizes_.size()));
  }
  total_ = 1;
  for (Index n : sizes_) {
    if (n < 1) throw ShapeError("mode size must be positive");
    if (total_ > std::numeric_limits<Index>::max() / n) {
      throw ShapeError("tensor size overflows the index type");
    }
    total_ *= n;
  }
}

Index Dims::size(int mode) const {
  if (mode < 0 || mode >= order()) {
    throw ShapeError("mode " + std::to_string(mode) + " out of range");
  }
  return sizes_[static_cast<std::size_t>(mode)];
}

std::pair<Index, Index> unfold_index(std::span<const Index> index, int mode,
                                     const Dims& dims) {
  check_mode(mode, dims);
  if (static_cast<int>(index.size()) != dims.order()) {
    throw ShapeError("index has " + std::to_string(index.size()) +
                     " coordinates, expected " + std::to_string(dims.order()));
  }
  for (int j = 0; j < dims.order(); ++j) {
    if (index[j] < 0 || index[j] >= dims.size(j)) {
      throw ShapeError("coordinate " + std::to_string(index[j]) +
                       " out of range for mode " + std::to_string(j));
    }
  }
  return {index[mode], column_key(index.data(), mode, dims)};
}

std::size_t FiberIndex::find(Index key) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return npos;
  return static_cast<std::size_t>(it - keys.begin());
}

Support::Support(Dims dims, std::vector<Index> flat)
    : dims_(std::move(dims)), flat_(std::move(flat)) {
  const int k = dims_.order();
  if (flat_.size() % static_cast<std::size_t>(k) != 0) {
    throw ShapeError("flat index array length not a multiple of the order");
  }
  nnz_ = flat_.size() / static_cast<std::size_t>(k);
  const Index* prev = nullptr;
  for (std::size_t e = 0; e < nnz_; ++e) {
    const Index* t = flat_.data() + e * static_cast<std::size_t>(k);
    for (int j = 0; j < k; ++j) {
      if (t[j] < 0 || t[j] >= dims_.size(j)) {
        throw ShapeError("index " + tuple_to_string({t, (std::size_t)k}) +
                         " out of range");
      }
    }
    if (prev != nullptr) {
      int cmp = 0;
      for (int j = 0; j < k && cmp == 0; ++j) {
        cmp = (prev[j] < t[j]) ? -1 : (prev[j] > t[j] ? 1 : 0);
      }
      if (cmp == 0) {
        throw SupportError("duplicate index " +
                           tuple_to_string({t, (std::size_t)k}));
      }
      if (cmp > 0) {
        throw SupportError("indices not sorted lexicographically");
      }
    }
    prev = t;
  }
  fiber_cache_.resize(static_cast<std::size_t>(k));
}

const FiberIndex& Support::fibers(int mode) const {
  check_mode(mode, dims_);
  std::lock_guard<std::mutex> lock(fiber_mutex_);
  auto& slot = fiber_cache_[static_cast<std::size_t>(mode)];
  if (!slot) {
    auto fi = std::make_unique<FiberIndex>();
    const int k = dims_.order();
    std::vector<std::pair<Index, std::size_t>> keyed(nnz_);
    for (std::size_t e = 0; e < nnz_; ++e) {
      keyed[e] = {column_key(flat_.data() + e * k, mode, dims_), e};
    }
    // Entries are lex sorted, so within a fiber the original order is
    // ascending row; a stable sort by key keeps that order.
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) {
                       return a.first < b.first;
                     });
    fi->order.resize(nnz_);
    fi->rows.resize(nnz_);
    for (std::size_t p = 0; p < nnz_; ++p) {
      const std::size_t e = keyed[p].second;
      fi->order[p] = e;
      fi->rows[p] = flat_[e * k + static_cast<std::size_t>(mode)];
      if (p == 0 || keyed[p].first != keyed[p - 1].first) {
        fi->keys.push_back(keyed[p].first);
        fi->offsets.push_back(p);
      }
    }
    fi->offsets.push_back(nnz_);
    slot = std::move(fi);
  }
  return *slot;
}

bool Support::same_as(const Support& other) const {
  if (this == &other) return true;
  return dims_ == other.dims_ && flat_ == other.flat_;
}

std::shared_ptr<const Support> Support::make(
    const Dims& dims, const std::vector<std::vector<Index>>& indices) {
  const int k = dims.order();
  std::vector<std::size_t> perm(indices.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (const auto& t : indices) {
    if (static_cast<int>(t.size()) != k) {
      throw ShapeError("index tuple with wrong number of coordinates");
    }
  }
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return indices[a] < indices[b];
  });
  std::vector<Index> flat;
  flat.reserve(indices.size() * static_cast<std::size_t>(k));
  for (std::size_t p : perm) {
    flat.insert(flat.end(), indices[p].begin(), indices[p].end());
  }
  return std::make_shared<const Support>(dims, std::move(flat));
}

std::shared_ptr<const Support> Support::make_sorted(Dims dims,
                                                    std::vector<Index> flat) {
  return std::make_shared<const Support>(std::move(dims), std::move(flat));
}

std::shared_ptr<const Support> Support::full(const Dims& dims) {
  const int k = dims.order();
  std::vector<Index> flat;
  flat.reserve(static_cast<std::size_t>(dims.total()) * k);
  std::vector<Index> t(static_cast<std::size_t>(k), 0);
  for (Index e = 0; e < dims.total(); ++e) {
    flat.insert(flat.end(), t.begin(), t.end());
    for (int j = k - 1; j >= 0; --j) {
      if (++t[static_cast<std::size_t>(j)] < dims.size(j)) break;
      t[static_cast<std::size_t>(j)] = 0;
    }
  }
  return std::make_shared<const Support>(dims, std::move(flat));
}

SparseTensor::SparseTensor(std::shared_ptr<const Support> support,
                           std::vector<double> values)
    : support_(std::move(support)), values_(std::move(values)) {
  if (!support_) throw ShapeError("null support");
  if (values_.size() != support_->nnz()) {
    throw ShapeError("value count " + std::to_string(values_.size()) +
                     " does not match support size " +
                     std::to_string(support_->nnz()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericalError("non-finite tensor value");
  }
}

SparseTensor::SparseTensor(const Dims& dims,
                           const std::vector<std::vector<Index>>& indices,
                           std::vector<double> values) {
  if (indices.size() != values.size()) {
    throw ShapeError("index/value count mismatch");
  }
  // Sort values along with the indices.
  const int k = dims.order();
  std::vector<std::size_t> perm(indices.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (const auto& t : indices) {
    if (static_cast<int>(t.size()) != k) {
      throw ShapeError("index tuple with wrong number of coordinates");
    }
  }
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return indices[a] < indices[b];
  });
  std::vector<Index> flat;
  flat.reserve(indices.size() * static_cast<std::size_t>(k));
  std::vector<double> vals;
  vals.reserve(values.size());
  for (std::size_t p : perm) {
    flat.insert(flat.end(), indices[p].begin(), indices[p].end());
    vals.push_back(values[p]);
  }
  support_ = std::make_shared<const Support>(dims, std::move(flat));
  values_ = std::move(vals);
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericalError("non-finite tensor value");
  }
}

SparseTensor SparseTensor::zeros(std::shared_ptr<const Support> support) {
  std::vector<double> vals(support->nnz(), 0.0);
  return SparseTensor(std::move(support), std::move(vals));
}

SparseTensor SparseTensor::with_values(std::vector<double> values) const {
  return SparseTensor(support_, std::move(values));
}

void check_aligned(const SparseTensor& x, const SparseTensor& y) {
  if (x.support_ptr() == y.support_ptr()) return;
  if (!x.support().same_as(y.support())) {
    throw SupportError("operands live on different supports");
  }
}

double gram_norm(const SparseTensor& z, int mode, const Eigen::MatrixXd& u) {
  check_mode(mode, z.dims());
  check_factor_rows(u, mode, z.dims(), "factor");
  const FiberIndex& fi = z.support().fibers(mode);
  const auto vals = z.values();
  const Eigen::Index r = u.cols();
  Eigen::RowVectorXd w(r);
  double acc = 0.0;
  for (std::size_t f = 0; f + 1 < fi.offsets.size(); ++f) {
    w.setZero();
    for (std::size_t p = fi.offsets[f]; p < fi.offsets[f + 1]; ++p) {
      w.noalias() += vals[fi.order[p]] * u.row(fi.rows[p]);
    }
    acc += w.squaredNorm();
  }
  return acc;
}

Eigen::MatrixXd outer_apply(const SparseTensor& a, const SparseTensor& b,
                            int mode, const Eigen::MatrixXd& u) {
  check_aligned(a, b);
  check_mode(mode, a.dims());
  check_factor_rows(u, mode, a.dims(), "factor");
  const FiberIndex& fi = a.support().fibers(mode);
  const auto av = a.values();
  const auto bv = b.values();
  const Eigen::Index r = u.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(u.rows(), r);
  Eigen::RowVectorXd w(r);
  for (std::size_t f = 0; f + 1 < fi.offsets.size(); ++f) {
    w.setZero();
    for (std::size_t p = fi.offsets[f]; p < fi.offsets[f + 1]; ++p) {
      w.noalias() += bv[fi.order[p]] * u.row(fi.rows[p]);
    }
    for (std::size_t p = fi.offsets[f]; p < fi.offsets[f + 1]; ++p) {
      out.row(fi.rows[p]).noalias() += av[fi.order[p]] * w;
    }
  }
  return out;
}

SparseTensor mode_product_on_support(const SparseTensor& z, int mode,
                                     const Eigen::MatrixXd& lhs,
                                     const Eigen::MatrixXd& rhs_t,
                                     std::shared_ptr<const Support> out) {
  const Dims& dims = z.dims();
  check_mode(mode, dims);
  check_factor_rows(lhs, mode, dims, "left factor");
  check_factor_rows(rhs_t, mode, dims, "right factor");
  if (lhs.cols() != rhs_t.cols()) {
    throw ShapeError("left/right factor column mismatch");
  }
  if (!out) throw ShapeError("null output support");
  if (!(out->dims() == dims)) {
    throw ShapeError("output support has different dims");
  }
  const FiberIndex& fi = z.support().fibers(mode);
  const auto vals = z.values();
  const Eigen::Index r = lhs.cols();

  // Per-fiber compression w_f = rhs_t^T z_f.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(fi.fiber_count()), r);
  for (std::size_t f = 0; f + 1 < fi.offsets.size(); ++f) {
    for (std::size_t p = fi.offsets[f]; p < fi.offsets[f + 1]; ++p) {
      w.row(static_cast<Eigen::Index>(f)).noalias() +=
          vals[fi.order[p]] * rhs_t.row(fi.rows[p]);
    }
  }

  std::vector<double> out_vals(out->nnz(), 0.0);
  if (out.get() == z.support_ptr().get() || out->same_as(z.support())) {
    for (std::size_t f = 0; f + 1 < fi.offsets.size(); ++f) {
      for (std::size_t p = fi.offsets[f]; p < fi.offsets[f + 1]; ++p) {
        out_vals[fi.order[p]] =
            lhs.row(fi.rows[p]).dot(w.row(static_cast<Eigen::Index>(f)));
      }
    }
  } else {
    const int k = dims.order();
    for (std::size_t e = 0; e < out->nnz(); ++e) {
      const Index* t = out->flat().data() + e * static_cast<std::size_t>(k);
      const std::size_t f = fi.find(column_key(t, mode, dims));
      if (f == FiberIndex::npos) continue;
      out_vals[e] =
          lhs.row(t[mode]).dot(w.row(static_cast<Eigen::Index>(f)));
    }
  }
  return SparseTensor(std::move(out), std::move(out_vals));
}

SparseTensor axpy(double a, const SparseTensor& x, const SparseTensor& y) {
  check_aligned(x, y);
  std::vector<double> vals(y.values().begin(), y.values().end());
  const auto xv = x.values();
  for (std::size_t e = 0; e < vals.size(); ++e) vals[e] += a * xv[e];
  return SparseTensor(y.support_ptr(), std::move(vals));
}

double inner(const SparseTensor& x, const SparseTensor& y) {
  check_aligned(x, y);
  const auto xv = x.values();
  const auto yv = y.values();
  double acc = 0.0;
  for (std::size_t e = 0; e < xv.size(); ++e) acc += xv[e] * yv[e];
  return acc;
}

double frob_norm(const SparseTensor& x) {
  double acc = 0.0;
  for (double v : x.values()) acc += v * v;
  return std::sqrt(acc);
}

}  // namespace ttc
