#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lwsgcn/sparsifier.hpp"
#include "oracles.hpp"

using namespace lwsgcn;

namespace {

DegreeGrouping two_groups(index_t n1, index_t n2, double d1, double d2) {
  DegreeGrouping g;
  g.num_groups = 2;
  g.group_of.assign(static_cast<std::size_t>(n1), 0);
  g.group_of.insert(g.group_of.end(), static_cast<std::size_t>(n2), 1);
  g.group_sizes = {n1, n2};
  g.representative_degree = {d1, d2};
  return g;
}

SparseMatrix random_nonneg_sparse(index_t n, double density, RngStream& rng) {
  std::vector<Triplet> t;
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = 0; j < n; ++j) {
      if (rng.next_uniform() < density) t.push_back({i, j, 0.05 + rng.next_uniform()});
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

}  // namespace

TEST_CASE("block_counts: single group and the hand-evaluated two-group case") {
  const auto k1 = block_counts(DegreeGrouping::single_group(10, 200.0));
  CHECK(k1.size() == 1);
  CHECK(k1[0][0] == 200);

  const auto k2 = block_counts(two_groups(200, 1800, 200.0, 800.0));
  CHECK(k2[1][0] == 400);  // ceil(200 * sqrt(800/200))
  CHECK(k2[0][1] == 200);  // higher-degree column group: budget stays d1
  CHECK(k2[0][0] == 200);
  CHECK(k2[1][1] == 200);
}

TEST_CASE("build_effective_adjacency: budget above content keeps everything") {
  RngStream rng(3);
  const SparseMatrix a = random_nonneg_sparse(12, 0.3, rng);
  const DegreeGrouping g = DegreeGrouping::single_group(12, 1000.0);
  CHECK(build_effective_adjacency(a, g) == a);
}

TEST_CASE("build_effective_adjacency: two-group toy equals the brute-force oracle") {
  // 4 nodes, groups {0,0,1,1}, degrees (1, 4): K = [[1,1],[2,1]].
  const DegreeGrouping g = two_groups(2, 2, 1.0, 4.0);
  const SparseMatrix a = SparseMatrix::from_triplets(
      4, 4,
      {{0, 0, 0.9}, {1, 0, 0.5}, {1, 1, 0.7}, {0, 1, 0.7}, {2, 0, 0.4},
       {3, 0, 0.6}, {2, 1, 0.6}, {0, 2, 0.3}, {1, 3, 0.8}, {2, 2, 0.2},
       {3, 3, 0.1}, {2, 3, 0.2}});
  const SparseMatrix eff = build_effective_adjacency(a, g);
  const auto expect = oracle::effective_reference(a, g.group_of, block_counts(g));
  CHECK(oracle::to_mat(eff) == expect);

  // spot checks: B11 keeps only the 0.9; B21 keeps {0.6, 0.6}; ties in B22
  // break by row then column.
  CHECK(eff.at(0, 0) == 0.9);
  CHECK(eff.at(1, 1) == 0.0);
  CHECK(eff.at(3, 0) == 0.6);
  CHECK(eff.at(2, 1) == 0.6);
  CHECK(eff.at(2, 0) == 0.0);
  CHECK(eff.at(2, 2) == 0.2);  // ties with (2,3): row equal, col 2 < 3
  CHECK(eff.at(2, 3) == 0.0);
}

TEST_CASE("build_effective_adjacency: random instances match the oracle and idempotence") {
  RngStream rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const index_t n = 6 + static_cast<index_t>(rng.next_below(20));
    const index_t n1 = 1 + static_cast<index_t>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
    const DegreeGrouping g = two_groups(n1, n - n1, 2.0, 5.0);
    const SparseMatrix a = random_nonneg_sparse(n, 0.4, rng);
    const SparseMatrix eff = build_effective_adjacency(a, g);
    CHECK(oracle::to_mat(eff) == oracle::effective_reference(a, g.group_of, block_counts(g)));
    CHECK(build_effective_adjacency(eff, g) == eff);
  }
}

TEST_CASE("sample_blockwise: deterministic limits p=0 and p=1") {
  RngStream rng(23);
  const index_t n = 30;
  const SparseMatrix a = random_nonneg_sparse(n, 0.3, rng);
  const DegreeGrouping g = two_groups(10, 20, 3.0, 9.0);
  const SparseMatrix eff = build_effective_adjacency(a, g);

  const RngStream draw(99);
  const SparseMatrix p0 = sample_blockwise(a, g, BlockPruneConfig::uniform(g, 0.0), draw);
  CHECK(p0 == eff);

  const SparseMatrix p1 = sample_blockwise(a, g, BlockPruneConfig::uniform(g, 1.0), draw);
  CHECK(static_cast<index_t>(p1.nnz()) == a.nnz() - eff.nnz());
  for (const auto& t : p1.to_triplets()) {
    CHECK(t.value == a.at(t.row, t.col));
    CHECK(eff.at(t.row, t.col) == 0.0);
  }
}

TEST_CASE("samplers: outputs are entrywise dominated by the input") {
  RngStream rng(29);
  const SparseMatrix a = random_nonneg_sparse(25, 0.4, rng);
  const DegreeGrouping g = two_groups(12, 13, 2.0, 6.0);
  const RngStream draw(5);

  for (const SparseMatrix& s :
       {sample_blockwise(a, g, BlockPruneConfig::uniform(g, 0.3), draw),
        sample_global_fraction(a, {0.4, 0.8, 0.2}, draw),
        band_retain(a, {0.25, 0.5})}) {
    for (const auto& t : s.to_triplets()) {
      CHECK(t.value == a.at(t.row, t.col));
    }
    CHECK(s.nnz() <= a.nnz());
  }
}

TEST_CASE("sample_blockwise: determinism and stream sensitivity") {
  RngStream rng(31);
  const SparseMatrix a = random_nonneg_sparse(20, 0.4, rng);
  const DegreeGrouping g = DegreeGrouping::single_group(20, 4.0);
  const BlockPruneConfig cfg = BlockPruneConfig::uniform(g, 0.5);
  CHECK(sample_blockwise(a, g, cfg, RngStream(77)) ==
        sample_blockwise(a, g, cfg, RngStream(77)));
  CHECK_FALSE(sample_blockwise(a, g, cfg, RngStream(77)) ==
              sample_blockwise(a, g, cfg, RngStream(78)));
}

TEST_CASE("sample_blockwise: single-column closed form, 1e4 draws within 5%") {
  // Single block, 10 entries in one column, K = 4, p = 0.5: the expected
  // l1 deviation is 0.5 * (sum of all entry values).
  std::vector<Triplet> t;
  double value_sum = 0.0;
  for (index_t i = 0; i < 10; ++i) {
    const double v = 0.1 + 0.07 * static_cast<double>(i);
    t.push_back({i, 0, v});
    value_sum += v;
  }
  const SparseMatrix a = SparseMatrix::from_triplets(10, 10, std::move(t));
  const DegreeGrouping g = DegreeGrouping::single_group(10, 4.0);
  const BlockPruneConfig cfg = BlockPruneConfig::uniform(g, 0.5);
  const SparseMatrix eff = build_effective_adjacency(a, g);
  CHECK(eff.nnz() == 4);

  const double closed_form = 0.5 * value_sum;

  // the exact enumerator agrees with the closed form on one column
  const std::vector<double> retain(10, 0.5);
  std::vector<bool> in_eff(10);
  for (index_t e = 0; e < a.nnz(); ++e) {
    in_eff[static_cast<std::size_t>(e)] = eff.at(a.row_of(e), 0) != 0.0;
  }
  // retain prob: top entries kept w.p. 1-p = 0.5, rest w.p. p = 0.5
  CHECK(oracle::exact_expected_deviation(a, retain, in_eff) ==
        doctest::Approx(closed_form).epsilon(1e-12));

  const RngStream root(1234);
  double mc = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    mc += deviation_l1(sample_blockwise(a, g, cfg, root.substream(static_cast<std::uint64_t>(i))), eff);
  }
  mc /= draws;
  CHECK(mc == doctest::Approx(closed_form).epsilon(0.05));
}

TEST_CASE("sample_blockwise: multi-column exact enumeration oracle, 2e4 draws") {
  // 3 columns x 4 entries, single group with K = 5, p = 0.3.
  std::vector<Triplet> t;
  RngStream vals(555);
  for (index_t j = 0; j < 3; ++j) {
    for (index_t i = 0; i < 4; ++i) {
      t.push_back({i + j, j, 0.2 + vals.next_uniform()});
    }
  }
  const SparseMatrix a = SparseMatrix::from_triplets(8, 8, std::move(t));
  const DegreeGrouping g = DegreeGrouping::single_group(8, 5.0);
  const double p = 0.3;
  const BlockPruneConfig cfg = BlockPruneConfig::uniform(g, p);
  const SparseMatrix eff = build_effective_adjacency(a, g);

  std::vector<double> retain(static_cast<std::size_t>(a.nnz()));
  std::vector<bool> in_eff(static_cast<std::size_t>(a.nnz()));
  const auto cols = a.entry_cols();
  for (index_t e = 0; e < a.nnz(); ++e) {
    in_eff[static_cast<std::size_t>(e)] =
        eff.at(a.row_of(e), cols[static_cast<std::size_t>(e)]) != 0.0;
    retain[static_cast<std::size_t>(e)] = in_eff[static_cast<std::size_t>(e)] ? 1.0 - p : p;
  }
  const double exact = oracle::exact_expected_deviation(a, retain, in_eff);

  const RngStream root(4321);
  double mc = 0.0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    mc += deviation_l1(sample_blockwise(a, g, cfg, root.substream(static_cast<std::uint64_t>(i))), eff);
  }
  mc /= draws;
  CHECK(mc == doctest::Approx(exact).epsilon(0.05));
}

TEST_CASE("sample_blockwise: expected deviation is monotone in p (coupled draws)") {
  RngStream rng(37);
  const SparseMatrix a = random_nonneg_sparse(20, 0.4, rng);
  const DegreeGrouping g = DegreeGrouping::single_group(20, 6.0);
  const SparseMatrix eff = build_effective_adjacency(a, g);
  const RngStream root(2468);

  double mean_lo = 0.0, mean_hi = 0.0;
  for (int i = 0; i < 200; ++i) {
    const RngStream draw = root.substream(static_cast<std::uint64_t>(i));
    mean_lo += deviation_l1(sample_blockwise(a, g, BlockPruneConfig::uniform(g, 0.2), draw), eff);
    mean_hi += deviation_l1(sample_blockwise(a, g, BlockPruneConfig::uniform(g, 0.45), draw), eff);
  }
  CHECK(mean_lo / 200 <= mean_hi / 200 + 1e-12);
}

TEST_CASE("sample_global_fraction: trivial limits and hand ranking") {
  RngStream rng(41);
  const SparseMatrix a = random_nonneg_sparse(10, 0.3, rng);
  const RngStream draw(1);

  CHECK(sample_global_fraction(a, {1.0, 1.0, 1.0}, draw) == a);
  CHECK(sample_global_fraction(a, {0.5, 0.0, 0.0}, draw).nnz() == 0);

  const SparseMatrix six = SparseMatrix::from_triplets(
      3, 3, {{0, 0, 0.6}, {1, 0, 0.1}, {2, 1, 0.9}, {0, 1, 0.2}, {1, 2, 0.5}, {2, 2, 0.3}});
  const SparseMatrix kept = sample_global_fraction(six, {0.5, 1.0, 0.0}, draw);
  CHECK(kept.nnz() == 3);
  CHECK(kept.at(2, 1) == 0.9);
  CHECK(kept.at(0, 0) == 0.6);
  CHECK(kept.at(1, 2) == 0.5);
}

TEST_CASE("band_retain: identity, top half, partition") {
  RngStream rng(43);
  const SparseMatrix a = random_nonneg_sparse(12, 0.35, rng);
  CHECK(band_retain(a, {0.0, 1.0}) == a);

  const SparseMatrix four = SparseMatrix::from_triplets(
      4, 4, {{0, 0, 0.4}, {1, 1, 0.8}, {2, 2, 0.1}, {3, 3, 0.6}});
  const SparseMatrix top = band_retain(four, {0.0, 0.5});
  CHECK(top.nnz() == 2);
  CHECK(top.at(1, 1) == 0.8);
  CHECK(top.at(3, 3) == 0.6);

  const SparseMatrix lo = band_retain(a, {0.0, 0.5});
  const SparseMatrix hi = band_retain(a, {0.5, 0.5});
  CHECK(lo.nnz() + hi.nnz() == a.nnz());
  for (const auto& t : a.to_triplets()) {
    const bool in_lo = lo.at(t.row, t.col) != 0.0;
    const bool in_hi = hi.at(t.row, t.col) != 0.0;
    CHECK(in_lo != in_hi);
  }
}

TEST_CASE("deviation_l1: trivial cases and dense oracle") {
  RngStream rng(47);
  const SparseMatrix a = random_nonneg_sparse(15, 0.3, rng);
  const DegreeGrouping g = DegreeGrouping::single_group(15, 4.0);
  const SparseMatrix eff = build_effective_adjacency(a, g);

  CHECK(deviation_l1(eff, eff) == 0.0);
  CHECK(deviation_l1(SparseMatrix(15, 15), eff) == matrix_l1_norm(eff));

  for (int trial = 0; trial < 10; ++trial) {
    const SparseMatrix s = random_nonneg_sparse(15, 0.3, rng);
    const SparseMatrix t = random_nonneg_sparse(15, 0.3, rng);
    auto diff = oracle::to_mat(s);
    const auto tm = oracle::to_mat(t);
    for (std::size_t i = 0; i < diff.size(); ++i) {
      for (std::size_t j = 0; j < diff[i].size(); ++j) diff[i][j] -= tm[i][j];
    }
    CHECK(deviation_l1(s, t) == doctest::Approx(oracle::l1_norm(diff)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(deviation_l1(SparseMatrix(3, 3), SparseMatrix(4, 4)), DimensionMismatch);
}

TEST_CASE("LayerSamplerPlan: lazy columns reproduce whole-matrix draws") {
  RngStream rng(53);
  const SparseMatrix a = random_nonneg_sparse(25, 0.4, rng);
  const DegreeGrouping g = two_groups(10, 15, 3.0, 8.0);

  SamplerConfig cfg;
  cfg.mode = SamplerConfig::Mode::blockwise;
  cfg.blockwise = BlockPruneConfig::uniform(g, 0.35);
  const LayerSamplerPlan plan = LayerSamplerPlan::make(a, cfg, &g);

  const RngStream stream(909);
  const SparseMatrix full = plan.sample_matrix(stream);
  CHECK(full == sample_blockwise(a, g, cfg.blockwise, stream));

  std::vector<index_t> rows;
  std::vector<double> vals;
  for (index_t j = 0; j < a.cols(); ++j) {
    plan.sample_column(j, stream, rows, vals);
    const auto frows = full.col_rows(j);
    const auto fvals = full.col_vals(j);
    REQUIRE(rows.size() == frows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i] == frows[i]);
      CHECK(vals[i] == fvals[i]);
    }
  }

  SamplerConfig gcfg;
  gcfg.mode = SamplerConfig::Mode::global;
  gcfg.global = {0.3, 0.9, 0.05};
  const LayerSamplerPlan gplan = LayerSamplerPlan::make(a, gcfg, nullptr);
  CHECK(gplan.sample_matrix(stream) == sample_global_fraction(a, gcfg.global, stream));

  SamplerConfig bcfg;
  bcfg.mode = SamplerConfig::Mode::band;
  bcfg.band = {0.25, 0.5};
  const LayerSamplerPlan bplan = LayerSamplerPlan::make(a, bcfg, nullptr);
  CHECK(bplan.fixed_matrix() == band_retain(a, bcfg.band));
  CHECK_FALSE(bplan.stochastic());
}
