#pragma once

#include <cstdint>
#include <vector>

#include "lwsgcn/graph.hpp"
#include "lwsgcn/rng.hpp"
#include "lwsgcn/sparse.hpp"

namespace lwsgcn {

/// Block-wise pruning rates: prune_prob(i, j) is the probability p_ij of
/// dropping a top entry of block B_ij (equivalently, retaining it with
/// probability 1 - p_ij, while non-top entries are retained with
/// probability p_ij).
struct BlockPruneConfig {
  Dense prune_prob;  // L x L
  double d1 = 0.0;   // representative degree of the lowest group

  static BlockPruneConfig uniform(const DegreeGrouping& grouping, double p);
  void validate(int num_groups) const;
};

/// Global-fraction sampler: rank all nonzeros by value, retain the top
/// `top_fraction` of them with `retain_top_prob` each and the remainder
/// with `retain_rest_prob` each.
struct GlobalPruneConfig {
  double top_fraction = 1.0;
  double retain_top_prob = 0.99;
  double retain_rest_prob = 0.01;

  void validate() const;
};

/// Deterministic band retention: keep entries whose global rank fraction
/// lies in [band_start, band_start + band_width).
struct BandRetainConfig {
  double band_start = 0.0;
  double band_width = 1.0;

  void validate() const;
};

/// Per-block retention budgets K_ij: ceil(d1 * sqrt(d_i / d_j)) when the
/// row group is higher-degree than the column group, ceil(d1) otherwise.
std::vector<std::vector<index_t>> block_counts(const DegreeGrouping& grouping);

/// Entry ranking shared by every sampler: value descending, ties broken by
/// row then column ascending. Returns ordinals in rank order.
std::vector<index_t> rank_entries(const SparseMatrix& a);

/// Flags (by ordinal) the entries belonging to the per-block top-K sets;
/// budgets are clamped to each block's nonzero count.
std::vector<std::uint8_t> blockwise_top_mask(const SparseMatrix& a,
                                             const DegreeGrouping& grouping);

/// The sparse effective adjacency: within each block, the K_ij largest
/// entries keep their values and everything else becomes zero.
SparseMatrix build_effective_adjacency(const SparseMatrix& a,
                                       const DegreeGrouping& grouping);

/// One stochastic draw of the block-wise sampler. Per-entry decisions are
/// keyed on the entry ordinal within `rng`, so sampling single columns
/// lazily (see LayerSamplerPlan) reproduces this output exactly.
SparseMatrix sample_blockwise(const SparseMatrix& a, const DegreeGrouping& grouping,
                              const BlockPruneConfig& cfg, const RngStream& rng);

/// One stochastic draw of the global-fraction sampler (Algorithm step:
/// top ceil(q * nnz) entries kept w.p. retain_top_prob, rest w.p.
/// retain_rest_prob).
SparseMatrix sample_global_fraction(const SparseMatrix& a,
                                    const GlobalPruneConfig& cfg,
                                    const RngStream& rng);

SparseMatrix band_retain(const SparseMatrix& a, const BandRetainConfig& cfg);

/// max absolute column sum of (sampled - effective).
double deviation_l1(const SparseMatrix& sampled, const SparseMatrix& effective);

/// Tagged sampler selection for one layer.
struct SamplerConfig {
  enum class Mode { none, blockwise, global, band };
  Mode mode = Mode::none;
  BlockPruneConfig blockwise;
  GlobalPruneConfig global;
  BandRetainConfig band;
};

const char* sampler_mode_name(SamplerConfig::Mode m);

/// A sampler bound to a base matrix, precomputed for repeated draws.
///
/// Stochastic plans expose both whole-matrix draws and lazy single-column
/// draws; the two agree bit for bit for the same stream because every
/// entry's coin is indexed by its ordinal. Deterministic plans (none /
/// band) hold a fixed matrix.
class LayerSamplerPlan {
 public:
  static LayerSamplerPlan make(const SparseMatrix& base, const SamplerConfig& cfg,
                               const DegreeGrouping* grouping);

  bool stochastic() const { return stochastic_; }

  const SparseMatrix& fixed_matrix() const { return fixed_; }

  /// Draw the whole matrix for one iteration stream.
  SparseMatrix sample_matrix(const RngStream& stream) const;

  /// Draw a single column into (rows, vals); cleared on entry.
  void sample_column(index_t j, const RngStream& stream,
                     std::vector<index_t>& rows, std::vector<double>& vals) const;

 private:
  bool stochastic_ = false;
  SparseMatrix fixed_;                    // deterministic plans
  const SparseMatrix* base_ = nullptr;    // stochastic plans
  std::vector<double> retain_prob_;       // per entry ordinal
};

}  // namespace lwsgcn
