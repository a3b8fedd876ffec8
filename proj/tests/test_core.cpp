#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lwsgcn/graph.hpp"
#include "lwsgcn/kernels.hpp"
#include "lwsgcn/rng.hpp"
#include "lwsgcn/sparse.hpp"
#include "oracles.hpp"

using namespace lwsgcn;

namespace {

Dense random_dense(index_t rows, index_t cols, RngStream& rng) {
  Dense m(rows, cols);
  for (double& v : m.data()) v = rng.next_gaussian();
  return m;
}

SparseMatrix random_sparse(index_t rows, index_t cols, double density, RngStream& rng) {
  std::vector<Triplet> t;
  for (index_t i = 0; i < rows; ++i) {
    for (index_t j = 0; j < cols; ++j) {
      if (rng.next_uniform() < density) t.push_back({i, j, rng.next_gaussian()});
    }
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

}  // namespace

TEST_CASE("rng: sequential draws equal indexed draws") {
  RngStream a(42);
  const RngStream b(42);
  for (std::uint64_t i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.u64_at(i));
  }
}

TEST_CASE("rng: substreams are reproducible and distinct") {
  const RngStream root(7);
  CHECK(root.substream(3).next_u64() == root.substream(3).next_u64());
  CHECK(root.substream(3).next_u64() != root.substream(4).next_u64());
  CHECK(root.substream(3).next_u64() != RngStream(7).next_u64());
}

TEST_CASE("rng: uniform range and gaussian moments") {
  RngStream rng(123);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double g = rng.next_gaussian();
    sum += g;
    sum2 += g * g;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("sparse: from_triplets sums duplicates, drops zeros, sorts columns") {
  const SparseMatrix m = SparseMatrix::from_triplets(
      3, 3, {{2, 0, 1.0}, {0, 0, 2.0}, {2, 0, -1.0}, {1, 1, 0.0}, {0, 2, 3.0}});
  CHECK(m.nnz() == 2);
  CHECK(m.at(0, 0) == 2.0);
  CHECK(m.at(2, 0) == 0.0);  // summed away
  CHECK(m.at(1, 1) == 0.0);  // explicit zero dropped
  CHECK(m.at(0, 2) == 3.0);
  for (index_t j = 0; j < 3; ++j) {
    auto rows = m.col_rows(j);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1] < rows[i]);
  }
}

TEST_CASE("matrix_l1_norm: identity, zero, hand case, scaling") {
  CHECK(matrix_l1_norm(SparseMatrix::identity(3)) == 1.0);
  CHECK(matrix_l1_norm(SparseMatrix(4, 4)) == 0.0);
  const SparseMatrix m = SparseMatrix::from_triplets(
      2, 2, {{0, 0, 1.0}, {0, 1, -2.0}, {1, 0, 3.0}, {1, 1, 4.0}});
  CHECK(matrix_l1_norm(m) == 6.0);  // column sums 4 and 6
  CHECK(matrix_l1_norm(m.scaled(-2.5)) == doctest::Approx(2.5 * 6.0).epsilon(1e-15));
}

TEST_CASE("right_multiply: identity, zero, dense oracle") {
  RngStream rng(5);
  const Dense x = random_dense(4, 6, rng);
  const Dense xi = right_multiply(x, SparseMatrix::identity(6));
  CHECK(xi == x);

  Dense zero(4, 6);
  CHECK(right_multiply(zero, random_sparse(6, 6, 0.5, rng)).data() ==
        Dense(4, 6).data());

  for (int trial = 0; trial < 10; ++trial) {
    const index_t n = 2 + static_cast<index_t>(rng.next_below(62));
    const Dense a = random_dense(3, n, rng);
    const SparseMatrix b = random_sparse(n, n, 0.3, rng);
    const Dense got = right_multiply(a, b);
    const auto expect = oracle::matmul(oracle::to_mat(a), oracle::to_mat(b));
    for (index_t i = 0; i < got.rows(); ++i) {
      for (index_t j = 0; j < got.cols(); ++j) {
        CHECK(got(i, j) ==
              doctest::Approx(expect[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                  .epsilon(1e-12));
      }
    }
  }

  CHECK_THROWS_AS(right_multiply(random_dense(2, 3, rng), SparseMatrix::identity(4)),
                  DimensionMismatch);
}

TEST_CASE("kernels: omp variants match serial bit for bit") {
  RngStream rng(9);
  const Dense x = random_dense(7, 40, rng);
  const SparseMatrix a = random_sparse(40, 40, 0.4, rng);
  Dense serial(7, 40), parallel(7, 40);
  kernels::right_multiply_serial(x, a, serial);
  kernels::right_multiply_omp(x, a, parallel);
  CHECK(serial == parallel);

  const Dense b = random_dense(40, 13, rng);
  Dense mm_serial(7, 13), mm_parallel(7, 13);
  const Dense w = random_dense(7, 40, rng);
  kernels::matmul_serial(w, b, mm_serial);
  kernels::matmul_omp(w, b, mm_parallel);
  CHECK(mm_serial == mm_parallel);
}

TEST_CASE("pairwise_sum: matches naive accumulation") {
  RngStream rng(11);
  std::vector<double> v(1000);
  for (double& x : v) x = rng.next_gaussian();
  const double total = kernels::pairwise_sum(v);
  double naive = 0.0;
  for (double x : v) naive += x;
  CHECK(total == doctest::Approx(naive).epsilon(1e-13));
  CHECK(kernels::pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("graph: validation") {
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), InvalidGraph);
  CHECK_THROWS_AS(Graph(3, {{1, 1}}), InvalidGraph);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), InvalidGraph);  // duplicate unordered pair
  const Graph g(4, {{2, 0}, {1, 3}});
  CHECK(g.edges()[0].u == 0);  // normalized to u < v and sorted
  CHECK(g.degrees() == std::vector<index_t>{1, 1, 1, 1});
}

TEST_CASE("normalized adjacency: hand-evaluated cases") {
  // 2 nodes, 1 edge: Dtilde = diag(2, 2), all four entries 1/2.
  const SparseMatrix a2 = build_normalized_adjacency(Graph(2, {{0, 1}}));
  CHECK(a2.nnz() == 4);
  for (const auto& t : a2.to_triplets()) CHECK(t.value == 0.5);

  // single node: self-loop only
  const SparseMatrix a1 = build_normalized_adjacency(Graph(1, {}));
  CHECK(a1.nnz() == 1);
  CHECK(a1.at(0, 0) == 1.0);

  // triangle: Dtilde = diag(3,3,3), all nine entries 1/3
  const SparseMatrix a3 =
      build_normalized_adjacency(Graph(3, {{0, 1}, {1, 2}, {0, 2}}));
  CHECK(a3.nnz() == 9);
  for (const auto& t : a3.to_triplets()) {
    CHECK(t.value == doctest::Approx(1.0 / 3).epsilon(1e-15));
  }
}

TEST_CASE("normalized adjacency: symmetry is exact, diagonal positive") {
  RngStream rng(17);
  std::vector<Edge> edges;
  const index_t n = 40;
  for (index_t u = 0; u < n; ++u) {
    for (index_t v = u + 1; v < n; ++v) {
      if (rng.next_uniform() < 0.15) edges.push_back({u, v});
    }
  }
  const Graph g(n, edges);
  const SparseMatrix a = build_normalized_adjacency(g);
  for (const auto& t : a.to_triplets()) {
    CHECK(a.at(t.col, t.row) == t.value);  // bitwise-symmetric
    CHECK(t.value > 0.0);
  }
  for (index_t j = 0; j < n; ++j) CHECK(a.at(j, j) > 0.0);
}

TEST_CASE("normalized adjacency: regular-graph column sums lie in (0,1]") {
  // regular graphs: circulant with offsets {1,2} (4-regular) and a cycle
  for (int degree_case = 0; degree_case < 2; ++degree_case) {
    std::vector<Edge> edges;
    const index_t n = 24;
    for (index_t u = 0; u < n; ++u) {
      edges.push_back({u, (u + 1) % n});
      if (degree_case == 1) edges.push_back({u, (u + 2) % n});
    }
    const Graph g(n, edges);
    const SparseMatrix a = build_normalized_adjacency(g);
    const double d = degree_case == 0 ? 2.0 : 4.0;
    for (const auto& t : a.to_triplets()) {
      CHECK(t.value == doctest::Approx(1.0 / (d + 1)).epsilon(1e-15));
    }
    for (index_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (double v : a.col_vals(j)) sum += v;
      CHECK(sum > 0.0);
      CHECK(sum <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("normalized adjacency: d-regular entries equal 1/(d+1)") {
  // cycle of 6 nodes: 2-regular
  const Graph g(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
  const SparseMatrix a = build_normalized_adjacency(g);
  for (const auto& t : a.to_triplets()) {
    CHECK(t.value == doctest::Approx(1.0 / 3).epsilon(1e-15));
  }
}

TEST_CASE("normalized adjacency: from_tilde mode and isolated nodes") {
  const Graph isolated(3, {{0, 1}});
  CHECK_THROWS_AS(build_normalized_adjacency(isolated, DegreeMode::from_tilde),
                  IsolatedNode);
  CHECK_NOTHROW(build_normalized_adjacency(isolated));  // default mode is fine

  // 2 nodes, 1 edge, from_tilde: D = diag(1,1), entries all 1.
  const SparseMatrix a =
      build_normalized_adjacency(Graph(2, {{0, 1}}), DegreeMode::from_tilde);
  for (const auto& t : a.to_triplets()) CHECK(t.value == 1.0);
}

TEST_CASE("degree groups: single group, boundaries, explicit round-trip") {
  // 6-regular graph on 12 nodes
  std::vector<Edge> edges;
  const index_t n = 12;
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      if ((j - i) % 2 == 1) edges.push_back({i, j});
    }
  }
  const Graph g(n, edges);
  const DegreeGrouping single = assign_degree_groups(g, std::vector<double>{});
  CHECK(single.num_groups == 1);
  CHECK(single.group_sizes == std::vector<index_t>{12});
  CHECK(single.representative_degree[0] == 6.0);

  const DegreeGrouping same = assign_degree_groups(g, single.group_of);
  CHECK(same.group_of == single.group_of);
  CHECK(same.representative_degree == single.representative_degree);

  // star graph: leaves degree 1, hub degree 5 -> boundary at 3 splits them
  const Graph star(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  const DegreeGrouping two = assign_degree_groups(star, std::vector<double>{3.0});
  CHECK(two.num_groups == 2);
  CHECK(two.group_sizes == std::vector<index_t>{5, 1});
  CHECK(two.representative_degree == std::vector<double>{1.0, 5.0});

  CHECK_THROWS_AS(assign_degree_groups(star, std::vector<double>{100.0}), EmptyGroup);
  CHECK_THROWS_AS(assign_degree_groups(star, std::vector<double>{3.0, 2.0}),
                  InvalidGrouping);
}
