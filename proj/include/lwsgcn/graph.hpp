#pragma once

#include <vector>

#include "lwsgcn/sparse.hpp"

namespace lwsgcn {

struct Edge {
  index_t u;
  index_t v;
};

/// Undirected simple graph: unordered edges, no self-loops, no duplicates
/// (all validated on construction).
class Graph {
 public:
  Graph(index_t num_nodes, std::vector<Edge> edges);

  index_t num_nodes() const { return num_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::vector<index_t> degrees() const;

 private:
  index_t num_nodes_;
  std::vector<Edge> edges_;  // stored with u < v, sorted lexicographically
};

enum class DegreeMode {
  // D_ii = 1 + deg(i): the renormalized operator; well defined for
  // isolated nodes.
  from_tilde_plus_identity,
  // D_ii = deg(i), the literal text definition; fails on isolated nodes.
  from_tilde,
};

/// A = D^{-1/2} (Atilde + I) D^{-1/2}. Symmetric with a positive diagonal.
SparseMatrix build_normalized_adjacency(const Graph& graph,
                                        DegreeMode mode = DegreeMode::from_tilde_plus_identity);

/// Partition of nodes into degree groups ordered low-degree to high-degree.
struct DegreeGrouping {
  int num_groups = 0;                         // L
  std::vector<int> group_of;                  // node -> group in [0, L)
  std::vector<index_t> group_sizes;           // N_l
  std::vector<double> representative_degree;  // d_l, strictly increasing

  static DegreeGrouping single_group(index_t n, double representative);
};

/// Group nodes by degree thresholds: group l holds degrees in
/// [boundaries[l-1], boundaries[l]). Representative degree is the median
/// degree within the group.
DegreeGrouping assign_degree_groups(const Graph& graph,
                                    const std::vector<double>& boundaries);

/// Group nodes by an explicit node -> group map (groups must already be
/// ordered so that median degrees strictly increase).
DegreeGrouping assign_degree_groups(const Graph& graph,
                                    const std::vector<int>& explicit_groups);

}  // namespace lwsgcn
