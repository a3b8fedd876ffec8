#include "lwsgcn/sparse.hpp"

#include <algorithm>

#include "lwsgcn/kernels.hpp"

namespace lwsgcn {

SparseMatrix SparseMatrix::from_triplets(index_t rows, index_t cols,
                                         std::vector<Triplet> entries) {
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw IndexOutOfRange("triplet index outside matrix dimensions");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });

  SparseMatrix m(rows, cols);
  m.row_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());
  std::size_t i = 0;
  for (index_t j = 0; j < cols; ++j) {
    while (i < entries.size() && entries[i].col == j) {
      index_t row = entries[i].row;
      double sum = 0.0;
      while (i < entries.size() && entries[i].col == j && entries[i].row == row) {
        sum += entries[i].value;
        ++i;
      }
      if (sum != 0.0) {
        m.row_idx_.push_back(row);
        m.values_.push_back(sum);
      }
    }
    m.col_ptr_[static_cast<std::size_t>(j) + 1] = static_cast<index_t>(m.values_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::identity(index_t n) {
  SparseMatrix m(n, n);
  m.row_idx_.resize(static_cast<std::size_t>(n));
  m.values_.assign(static_cast<std::size_t>(n), 1.0);
  for (index_t i = 0; i < n; ++i) {
    m.row_idx_[static_cast<std::size_t>(i)] = i;
    m.col_ptr_[static_cast<std::size_t>(i) + 1] = i + 1;
  }
  return m;
}

std::vector<index_t> SparseMatrix::entry_cols() const {
  std::vector<index_t> cols(values_.size());
  for (index_t j = 0; j < cols_; ++j) {
    for (index_t e = col_begin(j); e < col_end(j); ++e) {
      cols[static_cast<std::size_t>(e)] = j;
    }
  }
  return cols;
}

double SparseMatrix::at(index_t i, index_t j) const {
  auto rows = col_rows(j);
  auto it = std::lower_bound(rows.begin(), rows.end(), i);
  if (it == rows.end() || *it != i) return 0.0;
  return values_[static_cast<std::size_t>(col_begin(j) + (it - rows.begin()))];
}

std::vector<Triplet> SparseMatrix::to_triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (index_t j = 0; j < cols_; ++j) {
    for (index_t e = col_begin(j); e < col_end(j); ++e) {
      out.push_back({row_idx_[static_cast<std::size_t>(e)], j,
                     values_[static_cast<std::size_t>(e)]});
    }
  }
  return out;
}

SparseMatrix SparseMatrix::scaled(double c) const {
  SparseMatrix m = *this;
  if (c == 0.0) {
    return SparseMatrix(rows_, cols_);
  }
  for (double& v : m.values_) v *= c;
  return m;
}

Dense SparseMatrix::to_dense() const {
  Dense d(rows_, cols_);
  for (index_t j = 0; j < cols_; ++j) {
    for (index_t e = col_begin(j); e < col_end(j); ++e) {
      d(row_idx_[static_cast<std::size_t>(e)], j) = values_[static_cast<std::size_t>(e)];
    }
  }
  return d;
}

void SparseMatrix::Builder::start_column(index_t j) {
  if (j <= current_col_ || j >= cols_) {
    throw Error("builder columns must be started in increasing order");
  }
  for (index_t k = current_col_ + 1; k <= j; ++k) {
    col_ptr_[static_cast<std::size_t>(k)] = static_cast<index_t>(values_.size());
  }
  current_col_ = j;
}

void SparseMatrix::Builder::push(index_t row, double value) {
  if (value == 0.0) return;
  if (row < 0 || row >= rows_) throw IndexOutOfRange("builder row out of range");
  if (static_cast<index_t>(row_idx_.size()) > col_ptr_[static_cast<std::size_t>(current_col_)] &&
      row_idx_.back() >= row) {
    throw Error("builder rows within a column must strictly increase");
  }
  row_idx_.push_back(row);
  values_.push_back(value);
}

SparseMatrix SparseMatrix::Builder::finish() {
  for (index_t k = current_col_ + 1; k <= cols_; ++k) {
    col_ptr_[static_cast<std::size_t>(k)] = static_cast<index_t>(values_.size());
  }
  current_col_ = cols_;
  SparseMatrix m(rows_, cols_);
  m.col_ptr_ = std::move(col_ptr_);
  m.row_idx_ = std::move(row_idx_);
  m.values_ = std::move(values_);
  return m;
}

double matrix_l1_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (index_t j = 0; j < m.cols(); ++j) {
    double sum = 0.0;
    for (double v : m.col_vals(j)) sum += std::abs(v);
    if (sum > best) best = sum;
  }
  return best;
}

Dense right_multiply(const Dense& x, const SparseMatrix& a) {
  if (x.cols() != a.rows()) {
    throw DimensionMismatch("right_multiply: inner dimensions do not match");
  }
  Dense out(x.rows(), a.cols());
  kernels::right_multiply_omp(x, a, out);
  return out;
}

}  // namespace lwsgcn
