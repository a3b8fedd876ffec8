#pragma once

#include <cstdint>

#include "lwsgcn/graph.hpp"
#include "lwsgcn/rng.hpp"
#include "lwsgcn/sparsifier.hpp"

namespace lwsgcn {

struct GroupSpec {
  index_t size = 0;
  double mean_degree = 0.0;
  double degree_stddev = 0.0;
};

struct SyntheticGraphSpec {
  std::vector<GroupSpec> groups;
  double clamp_lo = 0.0;
  double clamp_hi = 500.0;

  index_t num_nodes() const;
  void validate() const;
};

/// Ground-truth generator H = F + alpha * G(F) with
///   F    = C W* X A*
///   G(F) = C ( sin(V* F A*) .* tanh(V* F A*) )
/// and W*, V*, C drawn i.i.d. standard Gaussian.
struct TargetFunctionSpec {
  index_t feature_dim = 100;  // d
  index_t output_dim = 5;     // k
  index_t hidden_dim = 30;    // r
  double alpha = 0.5;

  void validate() const;
};

struct GeneratedDataset {
  Graph graph;
  SparseMatrix adjacency;  // A
  SparseMatrix effective;  // A*
  Dense features;          // d x N, unit-norm columns
  Dense labels;            // k x N
  DegreeGrouping grouping;
};

/// Expected-degree (Chung-Lu) graph: per-node target degrees drawn from
/// the group's truncated Gaussian, pair (u, v) included with probability
/// min(1, t_u t_v / sum_w t_w).
Graph generate_graph(const SyntheticGraphSpec& spec, RngStream& rng);

/// i.i.d. standard Gaussian columns normalized to unit l2 norm.
Dense generate_features(index_t n, index_t d, RngStream& rng);

/// Labels from the composite target; draws W*, V*, C from rng in that order.
Dense generate_labels(const Dense& x, const SparseMatrix& a_star,
                      const TargetFunctionSpec& spec, RngStream& rng);

/// Target evaluation with explicit generator weights.
Dense apply_target(const Dense& x, const SparseMatrix& a_star, const Dense& w_star,
                   const Dense& v_star, const Dense& c, double alpha);

/// Full pipeline: graph, grouping (groups relabeled so representative
/// degrees increase), normalized adjacency, A*, features, labels.
GeneratedDataset generate_dataset(const SyntheticGraphSpec& graph_spec,
                                  const TargetFunctionSpec& target_spec,
                                  std::uint64_t seed);

}  // namespace lwsgcn
