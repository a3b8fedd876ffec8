#include "lwsgcn/graph.hpp"

#include <algorithm>
#include <cmath>

namespace lwsgcn {

Graph::Graph(index_t num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)) {
  if (num_nodes_ < 0) throw InvalidGraph("negative node count");
  for (Edge& e : edges_) {
    if (e.u < 0 || e.u >= num_nodes_ || e.v < 0 || e.v >= num_nodes_) {
      throw InvalidGraph("edge endpoint out of range");
    }
    if (e.u == e.v) throw InvalidGraph("self-loops are not representable");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v) {
      throw InvalidGraph("duplicate edge");
    }
  }
}

std::vector<index_t> Graph::degrees() const {
  std::vector<index_t> deg(static_cast<std::size_t>(num_nodes_), 0);
  for (const Edge& e : edges_) {
    ++deg[static_cast<std::size_t>(e.u)];
    ++deg[static_cast<std::size_t>(e.v)];
  }
  return deg;
}

SparseMatrix build_normalized_adjacency(const Graph& graph, DegreeMode mode) {
  const index_t n = graph.num_nodes();
  const std::vector<index_t> deg = graph.degrees();

  std::vector<double> dvals(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) {
    index_t d = deg[static_cast<std::size_t>(i)];
    if (mode == DegreeMode::from_tilde_plus_identity) {
      d += 1;
    } else if (d == 0) {
      throw IsolatedNode("node " + std::to_string(i) +
                         " has degree 0; D^{-1/2} is undefined");
    }
    dvals[static_cast<std::size_t>(i)] = static_cast<double>(d);
  }

  // Adjacency lists including the self-loop from Atilde + I.
  std::vector<std::vector<index_t>> nbrs(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) nbrs[static_cast<std::size_t>(i)].push_back(i);
  for (const Edge& e : graph.edges()) {
    nbrs[static_cast<std::size_t>(e.u)].push_back(e.v);
    nbrs[static_cast<std::size_t>(e.v)].push_back(e.u);
  }

  SparseMatrix::Builder b(n, n);
  for (index_t j = 0; j < n; ++j) {
    auto& col = nbrs[static_cast<std::size_t>(j)];
    std::sort(col.begin(), col.end());
    b.start_column(j);
    for (index_t i : col) {
      // The same commutative product is used on both triangles, so the
      // result is symmetric bit for bit.
      b.push(i, 1.0 / std::sqrt(dvals[static_cast<std::size_t>(i)] *
                                dvals[static_cast<std::size_t>(j)]));
    }
  }
  return b.finish();
}

DegreeGrouping DegreeGrouping::single_group(index_t n, double representative) {
  DegreeGrouping g;
  g.num_groups = 1;
  g.group_of.assign(static_cast<std::size_t>(n), 0);
  g.group_sizes = {n};
  g.representative_degree = {representative};
  return g;
}

namespace {

double median_of(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

DegreeGrouping finish_grouping(const Graph& graph, std::vector<int> group_of,
                               int num_groups) {
  const std::vector<index_t> deg = graph.degrees();
  DegreeGrouping g;
  g.num_groups = num_groups;
  g.group_of = std::move(group_of);
  g.group_sizes.assign(static_cast<std::size_t>(num_groups), 0);

  std::vector<std::vector<double>> group_degrees(static_cast<std::size_t>(num_groups));
  for (index_t i = 0; i < graph.num_nodes(); ++i) {
    const int l = g.group_of[static_cast<std::size_t>(i)];
    ++g.group_sizes[static_cast<std::size_t>(l)];
    group_degrees[static_cast<std::size_t>(l)].push_back(
        static_cast<double>(deg[static_cast<std::size_t>(i)]));
  }
  for (int l = 0; l < num_groups; ++l) {
    if (g.group_sizes[static_cast<std::size_t>(l)] == 0) {
      throw EmptyGroup("degree group " + std::to_string(l) + " captures no node");
    }
    g.representative_degree.push_back(median_of(group_degrees[static_cast<std::size_t>(l)]));
  }
  for (int l = 0; l + 1 < num_groups; ++l) {
    if (!(g.representative_degree[static_cast<std::size_t>(l)] <
          g.representative_degree[static_cast<std::size_t>(l) + 1])) {
      throw InvalidGrouping("representative degrees must strictly increase");
    }
  }
  if (g.representative_degree.front() <= 0.0) {
    throw InvalidGrouping("lowest group has non-positive median degree");
  }
  return g;
}

}  // namespace

DegreeGrouping assign_degree_groups(const Graph& graph,
                                    const std::vector<double>& boundaries) {
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (!(boundaries[i - 1] < boundaries[i])) {
      throw InvalidGrouping("boundaries must strictly increase");
    }
  }
  const int num_groups = static_cast<int>(boundaries.size()) + 1;
  const std::vector<index_t> deg = graph.degrees();
  std::vector<int> group_of(static_cast<std::size_t>(graph.num_nodes()));
  for (index_t i = 0; i < graph.num_nodes(); ++i) {
    const double d = static_cast<double>(deg[static_cast<std::size_t>(i)]);
    int l = 0;
    while (l < num_groups - 1 && d >= boundaries[static_cast<std::size_t>(l)]) ++l;
    group_of[static_cast<std::size_t>(i)] = l;
  }
  return finish_grouping(graph, std::move(group_of), num_groups);
}

DegreeGrouping assign_degree_groups(const Graph& graph,
                                    const std::vector<int>& explicit_groups) {
  if (static_cast<index_t>(explicit_groups.size()) != graph.num_nodes()) {
    throw InvalidGrouping("explicit assignment must cover every node");
  }
  int num_groups = 0;
  for (int l : explicit_groups) {
    if (l < 0) throw InvalidGrouping("negative group index");
    num_groups = std::max(num_groups, l + 1);
  }
  if (num_groups == 0) throw InvalidGrouping("no groups");
  return finish_grouping(graph, explicit_groups, num_groups);
}

}  // namespace lwsgcn
