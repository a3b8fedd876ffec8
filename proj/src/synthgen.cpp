#include "lwsgcn/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lwsgcn/kernels.hpp"

namespace lwsgcn {

index_t SyntheticGraphSpec::num_nodes() const {
  index_t n = 0;
  for (const GroupSpec& g : groups) n += g.size;
  return n;
}

void SyntheticGraphSpec::validate() const {
  if (groups.empty()) throw DegenerateSpec("no degree groups");
  for (const GroupSpec& g : groups) {
    if (g.size < 1) throw DegenerateSpec("group size must be >= 1");
    if (g.mean_degree <= 0.0) throw DegenerateSpec("mean degree must be positive");
    if (g.degree_stddev < 0.0) throw DegenerateSpec("degree stddev must be >= 0");
  }
  if (!(clamp_lo < clamp_hi)) throw DegenerateSpec("degree clamp must satisfy lo < hi");
}

void TargetFunctionSpec::validate() const {
  if (feature_dim < 1 || output_dim < 1 || hidden_dim < 1) {
    throw DegenerateSpec("target dimensions must be >= 1");
  }
  if (alpha < 0.0) throw DegenerateSpec("alpha must be >= 0");
}

Graph generate_graph(const SyntheticGraphSpec& spec, RngStream& rng) {
  spec.validate();
  const index_t n = spec.num_nodes();

  // Per-node target degrees: truncated Gaussian, rounded to integer.
  std::vector<double> target(static_cast<std::size_t>(n));
  {
    std::size_t i = 0;
    for (const GroupSpec& g : spec.groups) {
      for (index_t k = 0; k < g.size; ++k, ++i) {
        double t = g.mean_degree + g.degree_stddev * rng.next_gaussian();
        t = std::clamp(t, spec.clamp_lo, spec.clamp_hi);
        target[i] = std::round(t);
      }
    }
  }
  const double total = std::accumulate(target.begin(), target.end(), 0.0);
  if (total <= 0.0) {
    throw DegenerateSpec("all target degrees are zero after truncation");
  }

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(total / 2.0));
  for (index_t u = 0; u < n; ++u) {
    const double tu = target[static_cast<std::size_t>(u)];
    if (tu == 0.0) continue;
    for (index_t v = u + 1; v < n; ++v) {
      const double tv = target[static_cast<std::size_t>(v)];
      if (tv == 0.0) continue;
      const double p = std::min(1.0, tu * tv / total);
      if (rng.next_uniform() < p) edges.push_back({u, v});
    }
  }
  return Graph(n, std::move(edges));
}

Dense generate_features(index_t n, index_t d, RngStream& rng) {
  if (n < 1 || d < 1) throw DegenerateSpec("feature dimensions must be >= 1");
  Dense x(d, n);
  for (index_t j = 0; j < n; ++j) {
    double* c = x.col(j);
    double norm2 = 0.0;
    for (index_t i = 0; i < d; ++i) {
      c[i] = rng.next_gaussian();
      norm2 += c[i] * c[i];
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (index_t i = 0; i < d; ++i) c[i] *= inv;
  }
  return x;
}

namespace {

Dense gaussian_matrix(index_t rows, index_t cols, RngStream& rng) {
  Dense m(rows, cols);
  for (double& v : m.data()) v = rng.next_gaussian();
  return m;
}

}  // namespace

Dense generate_labels(const Dense& x, const SparseMatrix& a_star,
                      const TargetFunctionSpec& spec, RngStream& rng) {
  spec.validate();
  if (x.rows() != spec.feature_dim) throw DimensionMismatch("feature matrix is not d x N");
  const Dense w_star = gaussian_matrix(spec.hidden_dim, spec.feature_dim, rng);
  const Dense v_star = gaussian_matrix(spec.hidden_dim, spec.output_dim, rng);
  const Dense c = gaussian_matrix(spec.output_dim, spec.hidden_dim, rng);
  return apply_target(x, a_star, w_star, v_star, c, spec.alpha);
}

Dense apply_target(const Dense& x, const SparseMatrix& a_star, const Dense& w_star,
                   const Dense& v_star, const Dense& c, double alpha) {
  const index_t d = x.rows();
  const index_t n = x.cols();
  const index_t r = w_star.rows();
  const index_t k = c.rows();
  if (w_star.cols() != d || v_star.rows() != r || v_star.cols() != k || c.cols() != r) {
    throw DimensionMismatch("generator weight shapes are inconsistent");
  }
  if (a_star.rows() != n || a_star.cols() != n) {
    throw DimensionMismatch("a_star must be N x N");
  }

  // F = C (W* X A*)
  Dense wx(r, n);
  kernels::matmul_omp(w_star, x, wx);
  const Dense wxa = right_multiply(wx, a_star);
  Dense f(k, n);
  kernels::matmul_omp(c, wxa, f);

  // G(F) = C ( sin(V* F A*) .* tanh(V* F A*) )
  Dense vf(r, n);
  kernels::matmul_omp(v_star, f, vf);
  Dense vfa = right_multiply(vf, a_star);
  for (double& v : vfa.data()) v = std::sin(v) * std::tanh(v);
  Dense g(k, n);
  kernels::matmul_omp(c, vfa, g);

  Dense h = f;
  for (std::size_t i = 0; i < h.data().size(); ++i) {
    h.data()[i] += alpha * g.data()[i];
  }
  return h;
}

GeneratedDataset generate_dataset(const SyntheticGraphSpec& graph_spec,
                                  const TargetFunctionSpec& target_spec,
                                  std::uint64_t seed) {
  RngStream root(seed);
  RngStream graph_rng = root.substream(0);
  RngStream feature_rng = root.substream(1);
  RngStream label_rng = root.substream(2);

  Graph graph = generate_graph(graph_spec, graph_rng);

  // Nodes were laid out group by group; relabel groups in order of median
  // realized degree so the grouping invariant holds for any spec order.
  std::vector<int> spec_group(static_cast<std::size_t>(graph.num_nodes()));
  {
    std::size_t i = 0;
    int g = 0;
    for (const GroupSpec& gs : graph_spec.groups) {
      for (index_t k = 0; k < gs.size; ++k, ++i) spec_group[i] = g;
      ++g;
    }
  }
  const int num_groups = static_cast<int>(graph_spec.groups.size());
  std::vector<double> medians(static_cast<std::size_t>(num_groups));
  {
    const std::vector<index_t> deg = graph.degrees();
    std::vector<std::vector<double>> per_group(static_cast<std::size_t>(num_groups));
    for (index_t i = 0; i < graph.num_nodes(); ++i) {
      per_group[static_cast<std::size_t>(spec_group[static_cast<std::size_t>(i)])].push_back(
          static_cast<double>(deg[static_cast<std::size_t>(i)]));
    }
    for (int g = 0; g < num_groups; ++g) {
      auto& v = per_group[static_cast<std::size_t>(g)];
      std::sort(v.begin(), v.end());
      medians[static_cast<std::size_t>(g)] =
          v.size() % 2 == 1 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    }
  }
  std::vector<int> order(static_cast<std::size_t>(num_groups));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return medians[static_cast<std::size_t>(a)] < medians[static_cast<std::size_t>(b)];
  });
  std::vector<int> relabel(static_cast<std::size_t>(num_groups));
  for (int rank = 0; rank < num_groups; ++rank) {
    relabel[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] = rank;
  }
  for (int& g : spec_group) g = relabel[static_cast<std::size_t>(g)];

  DegreeGrouping grouping = assign_degree_groups(graph, spec_group);
  SparseMatrix a = build_normalized_adjacency(graph);
  SparseMatrix a_star = build_effective_adjacency(a, grouping);
  Dense x = generate_features(graph.num_nodes(), target_spec.feature_dim, feature_rng);
  Dense y = generate_labels(x, a_star, target_spec, label_rng);

  return GeneratedDataset{std::move(graph), std::move(a), std::move(a_star),
                          std::move(x), std::move(y), std::move(grouping)};
}

}  // namespace lwsgcn
