#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lwsgcn/errors.hpp"

namespace lwsgcn {

using index_t = std::int64_t;

/// Column-major dense matrix of doubles. Columns are the unit of work in
/// every kernel (a column holds one node's feature/activation vector).
class Dense {
 public:
  Dense() = default;
  Dense(index_t rows, index_t cols)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows * cols), 0.0) {}

  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }

  double& operator()(index_t i, index_t j) {
    return data_[static_cast<std::size_t>(j * rows_ + i)];
  }
  double operator()(index_t i, index_t j) const {
    return data_[static_cast<std::size_t>(j * rows_ + i)];
  }

  double* col(index_t j) { return data_.data() + j * rows_; }
  const double* col(index_t j) const { return data_.data() + j * rows_; }

  std::span<double> col_span(index_t j) {
    return {col(j), static_cast<std::size_t>(rows_)};
  }
  std::span<const double> col_span(index_t j) const {
    return {col(j), static_cast<std::size_t>(rows_)};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double v) { data_.assign(data_.size(), v); }

  bool same_shape(const Dense& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  friend bool operator==(const Dense& a, const Dense& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace lwsgcn
