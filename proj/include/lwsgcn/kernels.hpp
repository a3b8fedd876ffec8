#pragma once

#include <span>

#include "lwsgcn/dense.hpp"
#include "lwsgcn/sparse.hpp"

namespace lwsgcn::kernels {

// Parallel kernels split work across *output* columns (or rows); each
// output element is accumulated sequentially in a fixed order, so the omp
// variants are bit-identical to their serial references for any thread
// count.

/// out = x * a, dense (d x N) times sparse (N x M).
void right_multiply_serial(const Dense& x, const SparseMatrix& a, Dense& out);
void right_multiply_omp(const Dense& x, const SparseMatrix& a, Dense& out);

/// out = a * b, both dense.
void matmul_serial(const Dense& a, const Dense& b, Dense& out);
void matmul_omp(const Dense& a, const Dense& b, Dense& out);

/// y = a * x for a single vector (axpy over the columns of a).
void matvec(const Dense& a, std::span<const double> x, std::span<double> y);

/// y = a^T * x (dot products against the columns of a).
void matvec_transposed(const Dense& a, std::span<const double> x,
                       std::span<double> y);

/// y = sum_e vals[e] * x[:, rows[e]], accumulated in entry order.
void gather_columns(const Dense& x, std::span<const index_t> rows,
                    std::span<const double> vals, std::span<double> y);

inline double relu(double v) { return v > 0.0 ? v : 0.0; }

/// Subgradient mask at the ReLU kink: active at exactly zero.
inline bool relu_mask(double v) { return v >= 0.0; }

void relu_inplace(Dense& m);

/// Deterministic pairwise (cascade) summation.
double pairwise_sum(std::span<const double> v);

double frobenius_norm(const Dense& m);

}  // namespace lwsgcn::kernels
