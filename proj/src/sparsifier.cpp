#include "lwsgcn/sparsifier.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace lwsgcn {

BlockPruneConfig BlockPruneConfig::uniform(const DegreeGrouping& grouping, double p) {
  BlockPruneConfig cfg;
  const int l = grouping.num_groups;
  cfg.prune_prob = Dense(l, l);
  cfg.prune_prob.fill(p);
  cfg.d1 = grouping.representative_degree.front();
  cfg.validate(l);
  return cfg;
}

void BlockPruneConfig::validate(int num_groups) const {
  if (prune_prob.rows() != num_groups || prune_prob.cols() != num_groups) {
    throw DimensionMismatch("prune_prob must be L x L");
  }
  bool above_half = false;
  for (double p : prune_prob.data()) {
    if (p < 0.0 || p > 1.0) throw ConfigError("prune probabilities must lie in [0, 1]");
    if (p > 0.5) above_half = true;
  }
  if (above_half) {
    std::cerr << "warning: block prune probability above 1/2; outside the "
                 "theory-faithful regime\n";
  }
}

void GlobalPruneConfig::validate() const {
  if (top_fraction < 0.0 || top_fraction > 1.0 || retain_top_prob < 0.0 ||
      retain_top_prob > 1.0 || retain_rest_prob < 0.0 || retain_rest_prob > 1.0) {
    throw ConfigError("global sampler parameters must lie in [0, 1]");
  }
}

void BandRetainConfig::validate() const {
  if (band_start < 0.0 || band_start > 1.0 || band_width <= 0.0 ||
      band_width > 1.0 || band_start + band_width > 1.0 + 1e-12) {
    throw ConfigError("band must satisfy 0 <= s, 0 < w, s + w <= 1");
  }
}

std::vector<std::vector<index_t>> block_counts(const DegreeGrouping& grouping) {
  const int l = grouping.num_groups;
  std::vector<std::vector<index_t>> k(static_cast<std::size_t>(l),
                                      std::vector<index_t>(static_cast<std::size_t>(l)));
  const double d1 = grouping.representative_degree.front();
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) {
      double budget = d1;
      if (i > j) {
        budget = d1 * std::sqrt(grouping.representative_degree[static_cast<std::size_t>(i)] /
                                grouping.representative_degree[static_cast<std::size_t>(j)]);
      }
      k[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          static_cast<index_t>(std::ceil(budget));
    }
  }
  return k;
}

namespace {

// rank order: value desc, then row asc, then col asc
struct EntryRank {
  const SparseMatrix* a;
  const std::vector<index_t>* cols;
  bool operator()(index_t e1, index_t e2) const {
    const double v1 = a->value_of(e1);
    const double v2 = a->value_of(e2);
    if (v1 != v2) return v1 > v2;
    const index_t r1 = a->row_of(e1);
    const index_t r2 = a->row_of(e2);
    if (r1 != r2) return r1 < r2;
    return (*cols)[static_cast<std::size_t>(e1)] < (*cols)[static_cast<std::size_t>(e2)];
  }
};

SparseMatrix filter_by_mask(const SparseMatrix& a, const std::vector<std::uint8_t>& keep) {
  SparseMatrix::Builder b(a.rows(), a.cols());
  for (index_t j = 0; j < a.cols(); ++j) {
    b.start_column(j);
    for (index_t e = a.col_begin(j); e < a.col_end(j); ++e) {
      if (keep[static_cast<std::size_t>(e)]) b.push(a.row_of(e), a.value_of(e));
    }
  }
  return b.finish();
}

SparseMatrix bernoulli_filter(const SparseMatrix& a,
                              const std::vector<double>& retain_prob,
                              const RngStream& rng) {
  SparseMatrix::Builder b(a.rows(), a.cols());
  for (index_t j = 0; j < a.cols(); ++j) {
    b.start_column(j);
    for (index_t e = a.col_begin(j); e < a.col_end(j); ++e) {
      if (rng.uniform_at(static_cast<std::uint64_t>(e)) <
          retain_prob[static_cast<std::size_t>(e)]) {
        b.push(a.row_of(e), a.value_of(e));
      }
    }
  }
  return b.finish();
}

std::vector<std::uint8_t> global_top_mask(const SparseMatrix& a, double top_fraction) {
  const std::vector<index_t> order = rank_entries(a);
  const index_t top = static_cast<index_t>(
      std::ceil(top_fraction * static_cast<double>(a.nnz())));
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(a.nnz()), 0);
  for (index_t r = 0; r < std::min(top, a.nnz()); ++r) {
    mask[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = 1;
  }
  return mask;
}

std::vector<double> blockwise_retain_probs(const SparseMatrix& a,
                                           const DegreeGrouping& grouping,
                                           const BlockPruneConfig& cfg) {
  cfg.validate(grouping.num_groups);
  const std::vector<std::uint8_t> top = blockwise_top_mask(a, grouping);
  const std::vector<index_t> cols = a.entry_cols();
  std::vector<double> retain(static_cast<std::size_t>(a.nnz()));
  for (index_t e = 0; e < a.nnz(); ++e) {
    const int gi = grouping.group_of[static_cast<std::size_t>(a.row_of(e))];
    const int gj = grouping.group_of[static_cast<std::size_t>(cols[static_cast<std::size_t>(e)])];
    const double p = cfg.prune_prob(gi, gj);
    retain[static_cast<std::size_t>(e)] = top[static_cast<std::size_t>(e)] ? 1.0 - p : p;
  }
  return retain;
}

std::vector<double> global_retain_probs(const SparseMatrix& a,
                                        const GlobalPruneConfig& cfg) {
  cfg.validate();
  const std::vector<std::uint8_t> top = global_top_mask(a, cfg.top_fraction);
  std::vector<double> retain(static_cast<std::size_t>(a.nnz()));
  for (index_t e = 0; e < a.nnz(); ++e) {
    retain[static_cast<std::size_t>(e)] =
        top[static_cast<std::size_t>(e)] ? cfg.retain_top_prob : cfg.retain_rest_prob;
  }
  return retain;
}

std::vector<std::uint8_t> band_mask(const SparseMatrix& a, const BandRetainConfig& cfg) {
  cfg.validate();
  const std::vector<index_t> order = rank_entries(a);
  const double n = static_cast<double>(a.nnz());
  const index_t lo = static_cast<index_t>(std::ceil(cfg.band_start * n));
  const index_t hi = std::min(
      a.nnz(), static_cast<index_t>(std::ceil((cfg.band_start + cfg.band_width) * n)));
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(a.nnz()), 0);
  for (index_t r = lo; r < hi; ++r) {
    mask[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = 1;
  }
  return mask;
}

}  // namespace

std::vector<index_t> rank_entries(const SparseMatrix& a) {
  std::vector<index_t> order(static_cast<std::size_t>(a.nnz()));
  for (index_t e = 0; e < a.nnz(); ++e) order[static_cast<std::size_t>(e)] = e;
  const std::vector<index_t> cols = a.entry_cols();
  std::sort(order.begin(), order.end(), EntryRank{&a, &cols});
  return order;
}

std::vector<std::uint8_t> blockwise_top_mask(const SparseMatrix& a,
                                             const DegreeGrouping& grouping) {
  if (static_cast<index_t>(grouping.group_of.size()) != a.rows() || a.rows() != a.cols()) {
    throw DimensionMismatch("grouping must cover a square matrix");
  }
  const int l = grouping.num_groups;
  const std::vector<std::vector<index_t>> budgets = block_counts(grouping);
  const std::vector<index_t> cols = a.entry_cols();

  // Bucket entry ordinals per block, then keep each block's top K.
  std::vector<std::vector<index_t>> block_entries(static_cast<std::size_t>(l * l));
  for (index_t e = 0; e < a.nnz(); ++e) {
    const int gi = grouping.group_of[static_cast<std::size_t>(a.row_of(e))];
    const int gj = grouping.group_of[static_cast<std::size_t>(cols[static_cast<std::size_t>(e)])];
    block_entries[static_cast<std::size_t>(gi * l + gj)].push_back(e);
  }

  std::vector<std::uint8_t> mask(static_cast<std::size_t>(a.nnz()), 0);
  EntryRank rank{&a, &cols};
  for (int gi = 0; gi < l; ++gi) {
    for (int gj = 0; gj < l; ++gj) {
      auto& entries = block_entries[static_cast<std::size_t>(gi * l + gj)];
      const index_t k = std::min(static_cast<index_t>(entries.size()),
                                 budgets[static_cast<std::size_t>(gi)][static_cast<std::size_t>(gj)]);
      if (k < static_cast<index_t>(entries.size())) {
        std::nth_element(entries.begin(), entries.begin() + k, entries.end(), rank);
      }
      for (index_t r = 0; r < k; ++r) {
        mask[static_cast<std::size_t>(entries[static_cast<std::size_t>(r)])] = 1;
      }
    }
  }
  return mask;
}

SparseMatrix build_effective_adjacency(const SparseMatrix& a,
                                       const DegreeGrouping& grouping) {
  return filter_by_mask(a, blockwise_top_mask(a, grouping));
}

SparseMatrix sample_blockwise(const SparseMatrix& a, const DegreeGrouping& grouping,
                              const BlockPruneConfig& cfg, const RngStream& rng) {
  return bernoulli_filter(a, blockwise_retain_probs(a, grouping, cfg), rng);
}

SparseMatrix sample_global_fraction(const SparseMatrix& a,
                                    const GlobalPruneConfig& cfg,
                                    const RngStream& rng) {
  return bernoulli_filter(a, global_retain_probs(a, cfg), rng);
}

SparseMatrix band_retain(const SparseMatrix& a, const BandRetainConfig& cfg) {
  return filter_by_mask(a, band_mask(a, cfg));
}

double deviation_l1(const SparseMatrix& sampled, const SparseMatrix& effective) {
  if (sampled.rows() != effective.rows() || sampled.cols() != effective.cols()) {
    throw DimensionMismatch("deviation_l1: dimensions differ");
  }
  double best = 0.0;
  for (index_t j = 0; j < sampled.cols(); ++j) {
    const auto r1 = sampled.col_rows(j);
    const auto v1 = sampled.col_vals(j);
    const auto r2 = effective.col_rows(j);
    const auto v2 = effective.col_vals(j);
    double sum = 0.0;
    std::size_t i1 = 0, i2 = 0;
    while (i1 < r1.size() || i2 < r2.size()) {
      if (i2 == r2.size() || (i1 < r1.size() && r1[i1] < r2[i2])) {
        sum += std::abs(v1[i1]);
        ++i1;
      } else if (i1 == r1.size() || r2[i2] < r1[i1]) {
        sum += std::abs(v2[i2]);
        ++i2;
      } else {
        sum += std::abs(v1[i1] - v2[i2]);
        ++i1;
        ++i2;
      }
    }
    if (sum > best) best = sum;
  }
  return best;
}

const char* sampler_mode_name(SamplerConfig::Mode m) {
  switch (m) {
    case SamplerConfig::Mode::none: return "none";
    case SamplerConfig::Mode::blockwise: return "blockwise";
    case SamplerConfig::Mode::global: return "global";
    case SamplerConfig::Mode::band: return "band";
  }
  return "?";
}

LayerSamplerPlan LayerSamplerPlan::make(const SparseMatrix& base,
                                        const SamplerConfig& cfg,
                                        const DegreeGrouping* grouping) {
  LayerSamplerPlan plan;
  switch (cfg.mode) {
    case SamplerConfig::Mode::none:
      plan.fixed_ = base;
      break;
    case SamplerConfig::Mode::band:
      plan.fixed_ = band_retain(base, cfg.band);
      break;
    case SamplerConfig::Mode::blockwise:
      if (grouping == nullptr) {
        throw ConfigError("blockwise sampler requires a degree grouping");
      }
      plan.stochastic_ = true;
      plan.base_ = &base;
      plan.retain_prob_ = blockwise_retain_probs(base, *grouping, cfg.blockwise);
      break;
    case SamplerConfig::Mode::global:
      plan.stochastic_ = true;
      plan.base_ = &base;
      plan.retain_prob_ = global_retain_probs(base, cfg.global);
      break;
  }
  return plan;
}

SparseMatrix LayerSamplerPlan::sample_matrix(const RngStream& stream) const {
  if (!stochastic_) return fixed_;
  return bernoulli_filter(*base_, retain_prob_, stream);
}

void LayerSamplerPlan::sample_column(index_t j, const RngStream& stream,
                                     std::vector<index_t>& rows,
                                     std::vector<double>& vals) const {
  rows.clear();
  vals.clear();
  const SparseMatrix& m = stochastic_ ? *base_ : fixed_;
  for (index_t e = m.col_begin(j); e < m.col_end(j); ++e) {
    if (stochastic_ &&
        stream.uniform_at(static_cast<std::uint64_t>(e)) >=
            retain_prob_[static_cast<std::size_t>(e)]) {
      continue;
    }
    rows.push_back(m.row_of(e));
    vals.push_back(m.value_of(e));
  }
}

}  // namespace lwsgcn
