#include "lwsgcn/kernels.hpp"

#include <cmath>

namespace lwsgcn::kernels {

namespace {

inline void right_multiply_column(const Dense& x, const SparseMatrix& a,
                                  index_t j, Dense& out) {
  double* yo = out.col(j);
  const auto rows = a.col_rows(j);
  const auto vals = a.col_vals(j);
  const index_t d = x.rows();
  for (std::size_t e = 0; e < rows.size(); ++e) {
    const double v = vals[e];
    const double* xc = x.col(rows[e]);
    for (index_t r = 0; r < d; ++r) yo[r] += v * xc[r];
  }
}

inline void matmul_column(const Dense& a, const Dense& b, index_t j, Dense& out) {
  double* co = out.col(j);
  const double* bc = b.col(j);
  const index_t m = a.rows();
  const index_t k = a.cols();
  for (index_t p = 0; p < k; ++p) {
    const double v = bc[p];
    if (v == 0.0) continue;
    const double* ac = a.col(p);
    for (index_t r = 0; r < m; ++r) co[r] += v * ac[r];
  }
}

}  // namespace

void right_multiply_serial(const Dense& x, const SparseMatrix& a, Dense& out) {
  out.fill(0.0);
  for (index_t j = 0; j < a.cols(); ++j) right_multiply_column(x, a, j, out);
}

void right_multiply_omp(const Dense& x, const SparseMatrix& a, Dense& out) {
  out.fill(0.0);
  const index_t n = a.cols();
#pragma omp parallel for schedule(static)
  for (index_t j = 0; j < n; ++j) right_multiply_column(x, a, j, out);
}

void matmul_serial(const Dense& a, const Dense& b, Dense& out) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions");
  out.fill(0.0);
  for (index_t j = 0; j < b.cols(); ++j) matmul_column(a, b, j, out);
}

void matmul_omp(const Dense& a, const Dense& b, Dense& out) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions");
  out.fill(0.0);
  const index_t n = b.cols();
#pragma omp parallel for schedule(static)
  for (index_t j = 0; j < n; ++j) matmul_column(a, b, j, out);
}

void matvec(const Dense& a, std::span<const double> x, std::span<double> y) {
  const index_t m = a.rows();
  for (index_t r = 0; r < m; ++r) y[static_cast<std::size_t>(r)] = 0.0;
  for (index_t p = 0; p < a.cols(); ++p) {
    const double v = x[static_cast<std::size_t>(p)];
    if (v == 0.0) continue;
    const double* ac = a.col(p);
    for (index_t r = 0; r < m; ++r) y[static_cast<std::size_t>(r)] += v * ac[r];
  }
}

void matvec_transposed(const Dense& a, std::span<const double> x,
                       std::span<double> y) {
  const index_t m = a.rows();
  for (index_t p = 0; p < a.cols(); ++p) {
    const double* ac = a.col(p);
    double sum = 0.0;
    for (index_t r = 0; r < m; ++r) sum += ac[r] * x[static_cast<std::size_t>(r)];
    y[static_cast<std::size_t>(p)] = sum;
  }
}

void gather_columns(const Dense& x, std::span<const index_t> rows,
                    std::span<const double> vals, std::span<double> y) {
  const index_t d = x.rows();
  for (index_t r = 0; r < d; ++r) y[static_cast<std::size_t>(r)] = 0.0;
  for (std::size_t e = 0; e < rows.size(); ++e) {
    const double v = vals[e];
    const double* xc = x.col(rows[e]);
    for (index_t r = 0; r < d; ++r) y[static_cast<std::size_t>(r)] += v * xc[r];
  }
}

void relu_inplace(Dense& m) {
  for (double& v : m.data()) v = relu(v);
}

double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

double frobenius_norm(const Dense& m) {
  double sum = 0.0;
  for (double v : m.data()) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace lwsgcn::kernels
