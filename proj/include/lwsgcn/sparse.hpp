#pragma once

#include <span>
#include <vector>

#include "lwsgcn/dense.hpp"
#include "lwsgcn/errors.hpp"

namespace lwsgcn {

struct Triplet {
  index_t row;
  index_t col;
  double value;
};

/// Compressed sparse column matrix.
///
/// Invariants: within each column row indices are strictly increasing and
/// all stored values are nonzero (explicit zeros are dropped when the
/// matrix is assembled). Entry "ordinals" are positions in the flat
/// storage arrays; samplers key their per-entry random draws on them.
class SparseMatrix {
 public:
  SparseMatrix() : col_ptr_(1, 0) {}
  SparseMatrix(index_t rows, index_t cols)
      : rows_(rows), cols_(cols), col_ptr_(static_cast<std::size_t>(cols) + 1, 0) {}

  /// Assemble from triplets. Duplicate coordinates are summed, zeros are
  /// dropped, columns end up sorted.
  static SparseMatrix from_triplets(index_t rows, index_t cols,
                                    std::vector<Triplet> entries);

  static SparseMatrix identity(index_t n);

  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }
  index_t nnz() const { return static_cast<index_t>(values_.size()); }

  index_t col_begin(index_t j) const { return col_ptr_[static_cast<std::size_t>(j)]; }
  index_t col_end(index_t j) const { return col_ptr_[static_cast<std::size_t>(j) + 1]; }

  std::span<const index_t> col_rows(index_t j) const {
    return {row_idx_.data() + col_begin(j),
            static_cast<std::size_t>(col_end(j) - col_begin(j))};
  }
  std::span<const double> col_vals(index_t j) const {
    return {values_.data() + col_begin(j),
            static_cast<std::size_t>(col_end(j) - col_begin(j))};
  }

  const std::vector<index_t>& col_ptr() const { return col_ptr_; }
  const std::vector<index_t>& row_idx() const { return row_idx_; }
  const std::vector<double>& values() const { return values_; }

  index_t row_of(index_t ordinal) const { return row_idx_[static_cast<std::size_t>(ordinal)]; }
  double value_of(index_t ordinal) const { return values_[static_cast<std::size_t>(ordinal)]; }

  /// Column index of each stored entry, by ordinal.
  std::vector<index_t> entry_cols() const;

  /// Value at (i, j); zero when the entry is not stored.
  double at(index_t i, index_t j) const;

  std::vector<Triplet> to_triplets() const;

  SparseMatrix scaled(double c) const;

  Dense to_dense() const;

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
           a.col_ptr_ == b.col_ptr_ && a.row_idx_ == b.row_idx_ &&
           a.values_ == b.values_;
  }

  /// Incremental column-ordered assembly (rows within a column must be
  /// pushed in increasing order; zero values are skipped).
  class Builder {
   public:
    Builder(index_t rows, index_t cols)
        : rows_(rows), cols_(cols), col_ptr_(static_cast<std::size_t>(cols) + 1, 0) {}

    void start_column(index_t j);
    void push(index_t row, double value);
    SparseMatrix finish();

   private:
    index_t rows_;
    index_t cols_;
    std::vector<index_t> col_ptr_;
    std::vector<index_t> row_idx_;
    std::vector<double> values_;
    index_t current_col_ = -1;
  };

 private:
  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<index_t> col_ptr_;
  std::vector<index_t> row_idx_;
  std::vector<double> values_;
};

/// Maximum absolute column sum; 0 for an empty matrix.
double matrix_l1_norm(const SparseMatrix& m);

/// out = x * a with deterministic accumulation (column entries in stored
/// order), regardless of thread count.
Dense right_multiply(const Dense& x, const SparseMatrix& a);

}  // namespace lwsgcn
