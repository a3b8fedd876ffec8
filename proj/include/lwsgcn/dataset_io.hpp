#pragma once

#include <optional>
#include <string>

#include "lwsgcn/graph.hpp"
#include "lwsgcn/synthgen.hpp"

namespace lwsgcn {

struct SplitSpec {
  double train_frac = 0.6;
  double val_frac = 0.2;
  double test_frac = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Split {
  std::vector<index_t> train;
  std::vector<index_t> val;
  std::vector<index_t> test;
};

/// Disjoint cover of [0, n) with largest-remainder rounding and a seeded
/// shuffle; each part is returned sorted.
Split make_split(index_t n, const SplitSpec& spec);

struct LoadedDataset {
  Graph graph;
  Dense features;  // d x N, unit-norm columns
  Dense labels;    // k x N
  std::optional<std::vector<int>> class_labels;
  std::optional<std::vector<int>> grouping;  // node -> group, when stored
};

/// Load a dataset directory (edges.txt, features.csv, labels.csv, optional
/// grouping.csv). A single-column labels file holding nonnegative integers
/// is treated as class ids and expanded to one-hot targets.
LoadedDataset load_dataset(const std::string& dir);

/// Persist a generated dataset (plus its spec and seed in meta.json).
void save_dataset(const std::string& dir, const GeneratedDataset& ds,
                  const SyntheticGraphSpec& graph_spec,
                  const TargetFunctionSpec& target_spec, std::uint64_t seed);

// --- individual file formats ---

/// Edge list: one "u v" pair per line, '#' comments.
std::vector<Edge> load_edge_list(const std::string& path, index_t num_nodes);
void save_edge_list(const std::string& path, const Graph& graph);

/// Matrix CSV: literal header "rows,cols,nnz", a line with those three
/// values, then one "row,col,value" line per entry.
void save_matrix_csv(const std::string& path, const SparseMatrix& m);
SparseMatrix load_matrix_csv(const std::string& path);

void save_split_csv(const std::string& path, const Split& split);

std::vector<int> load_grouping_csv(const std::string& path, index_t num_nodes);

}  // namespace lwsgcn
