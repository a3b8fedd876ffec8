#pragma once

// Test-only oracles. Each one is a straight-line, brute-force route to the
// quantity it checks, independent of the library code paths under test.

#include <algorithm>
#include <cmath>
#include <vector>

#include "lwsgcn/dense.hpp"
#include "lwsgcn/rng.hpp"
#include "lwsgcn/sparse.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>;  // row-major

inline Mat zeros(std::size_t rows, std::size_t cols) {
  return Mat(rows, std::vector<double>(cols, 0.0));
}

inline Mat to_mat(const lwsgcn::Dense& d) {
  Mat m = zeros(static_cast<std::size_t>(d.rows()), static_cast<std::size_t>(d.cols()));
  for (lwsgcn::index_t i = 0; i < d.rows(); ++i) {
    for (lwsgcn::index_t j = 0; j < d.cols(); ++j) {
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d(i, j);
    }
  }
  return m;
}

inline Mat to_mat(const lwsgcn::SparseMatrix& s) {
  Mat m = zeros(static_cast<std::size_t>(s.rows()), static_cast<std::size_t>(s.cols()));
  for (const auto& t : s.to_triplets()) {
    m[static_cast<std::size_t>(t.row)][static_cast<std::size_t>(t.col)] = t.value;
  }
  return m;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat c = zeros(a.size(), b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      for (std::size_t j = 0; j < b[0].size(); ++j) {
        c[i][j] += a[i][k] * b[k][j];
      }
    }
  }
  return c;
}

inline double l1_norm(const Mat& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m[0].size(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) sum += std::abs(m[i][j]);
    best = std::max(best, sum);
  }
  return best;
}

inline std::vector<double> column(const Mat& m, std::size_t j) {
  std::vector<double> c(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) c[i] = m[i][j];
  return c;
}

/// Independent straight-line evaluation of the per-node network output
///   out_n = C relu(W X a1_n) + C relu(V C relu(W X A1) a2_n)
inline std::vector<double> forward_reference(const Mat& x, const Mat& a1, const Mat& a2,
                                             const Mat& w, const Mat& v, const Mat& c,
                                             std::size_t n) {
  auto relu = [](Mat m) {
    for (auto& row : m) {
      for (double& val : row) val = std::max(val, 0.0);
    }
    return m;
  };
  const Mat z1 = relu(matmul(w, matmul(x, a1)));  // m x N
  const Mat o1 = matmul(c, z1);                   // k x N

  const std::size_t k = c.size();
  const std::size_t mm = v.size();
  std::vector<double> t2(k, 0.0);
  for (std::size_t i = 0; i < o1[0].size(); ++i) {
    for (std::size_t r = 0; r < k; ++r) t2[r] += o1[r][i] * a2[i][n];
  }
  std::vector<double> u(mm, 0.0);
  for (std::size_t r = 0; r < mm; ++r) {
    for (std::size_t j = 0; j < k; ++j) u[r] += v[r][j] * t2[j];
  }
  std::vector<double> out(k, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    out[r] = o1[r][n];
    for (std::size_t p = 0; p < mm; ++p) out[r] += c[r][p] * std::max(u[p], 0.0);
  }
  return out;
}

/// Brute-force block-top-K: collect every block's entries, sort by
/// (value desc, row asc, col asc), keep the first K.
inline Mat effective_reference(const lwsgcn::SparseMatrix& a,
                               const std::vector<int>& group_of,
                               const std::vector<std::vector<lwsgcn::index_t>>& budgets) {
  struct E {
    double v;
    lwsgcn::index_t r, c;
  };
  const int l = static_cast<int>(budgets.size());
  std::vector<std::vector<E>> blocks(static_cast<std::size_t>(l * l));
  for (const auto& t : a.to_triplets()) {
    const int gi = group_of[static_cast<std::size_t>(t.row)];
    const int gj = group_of[static_cast<std::size_t>(t.col)];
    blocks[static_cast<std::size_t>(gi * l + gj)].push_back({t.value, t.row, t.col});
  }
  Mat out = zeros(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
  for (int gi = 0; gi < l; ++gi) {
    for (int gj = 0; gj < l; ++gj) {
      auto& es = blocks[static_cast<std::size_t>(gi * l + gj)];
      std::sort(es.begin(), es.end(), [](const E& x, const E& y) {
        if (x.v != y.v) return x.v > y.v;
        if (x.r != y.r) return x.r < y.r;
        return x.c < y.c;
      });
      const std::size_t k = std::min(
          es.size(), static_cast<std::size_t>(budgets[static_cast<std::size_t>(gi)]
                                                     [static_cast<std::size_t>(gj)]));
      for (std::size_t i = 0; i < k; ++i) {
        out[static_cast<std::size_t>(es[i].r)][static_cast<std::size_t>(es[i].c)] = es[i].v;
      }
    }
  }
  return out;
}

/// Exact E[ max_col sum_row |sampled - effective| ] for an independently
/// sampled matrix: per column, enumerate every subset of entry outcomes
/// (requires <= ~20 entries per column), then combine the independent
/// per-column distributions through the product of their CDFs.
inline double exact_expected_deviation(const lwsgcn::SparseMatrix& a,
                                       const std::vector<double>& retain_prob,
                                       const std::vector<bool>& in_effective) {
  struct Outcome {
    double value;
    double prob;
  };
  std::vector<std::vector<Outcome>> col_dist;
  for (lwsgcn::index_t j = 0; j < a.cols(); ++j) {
    std::vector<Outcome> dist{{0.0, 1.0}};
    for (lwsgcn::index_t e = a.col_begin(j); e < a.col_end(j); ++e) {
      const double v = std::abs(a.value_of(e));
      const double keep = retain_prob[static_cast<std::size_t>(e)];
      // contribution when kept / dropped
      const double kept_contrib = in_effective[static_cast<std::size_t>(e)] ? 0.0 : v;
      const double drop_contrib = in_effective[static_cast<std::size_t>(e)] ? v : 0.0;
      std::vector<Outcome> next;
      next.reserve(dist.size() * 2);
      for (const Outcome& o : dist) {
        if (keep > 0.0) next.push_back({o.value + kept_contrib, o.prob * keep});
        if (keep < 1.0) next.push_back({o.value + drop_contrib, o.prob * (1.0 - keep)});
      }
      dist = std::move(next);
    }
    col_dist.push_back(std::move(dist));
  }

  // support of the max
  std::vector<double> support;
  for (const auto& dist : col_dist) {
    for (const Outcome& o : dist) support.push_back(o.value);
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  auto cdf = [](const std::vector<Outcome>& dist, double x) {
    double p = 0.0;
    for (const Outcome& o : dist) {
      if (o.value <= x) p += o.prob;
    }
    return p;
  };

  double expected = 0.0;
  double prev_cdf = 0.0;
  for (double x : support) {
    double p = 1.0;
    for (const auto& dist : col_dist) p *= cdf(dist, x);
    expected += x * (p - prev_cdf);
    prev_cdf = p;
  }
  return expected;
}

/// Central finite difference of f with respect to one coordinate.
template <typename F>
double central_diff(F&& f, double& slot, double step) {
  const double orig = slot;
  slot = orig + step;
  const double lp = f();
  slot = orig - step;
  const double lm = f();
  slot = orig;
  return (lp - lm) / (2.0 * step);
}

}  // namespace oracle
