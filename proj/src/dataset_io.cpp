#include "lwsgcn/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "lwsgcn/csv.hpp"
#include "lwsgcn/rng.hpp"

namespace lwsgcn {

namespace fs = std::filesystem;

void SplitSpec::validate() const {
  auto in_unit = [](double f) { return f > 0.0 && f < 1.0; };
  if (!in_unit(train_frac) || !in_unit(val_frac) || !in_unit(test_frac)) {
    throw ConfigError("split fractions must lie in (0, 1)");
  }
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
}

Split make_split(index_t n, const SplitSpec& spec) {
  spec.validate();
  if (n < 3) throw ConfigError("make_split requires n >= 3");

  const double fracs[3] = {spec.train_frac, spec.val_frac, spec.test_frac};
  index_t sizes[3];
  double remainders[3];
  index_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = fracs[i] * static_cast<double>(n);
    sizes[i] = static_cast<index_t>(std::floor(exact));
    remainders[i] = exact - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  // Largest remainder; ties resolved in train/val/test order.
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (remainders[i] > remainders[best]) best = i;
    }
    ++sizes[best];
    remainders[best] = -1.0;
    ++assigned;
  }

  std::vector<index_t> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), index_t{0});
  RngStream rng(spec.seed);
  for (index_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<index_t>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }

  Split split;
  split.train.assign(perm.begin(), perm.begin() + sizes[0]);
  split.val.assign(perm.begin() + sizes[0], perm.begin() + sizes[0] + sizes[1]);
  split.test.assign(perm.begin() + sizes[0] + sizes[1], perm.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MissingFile("missing file: " + path);
  return f;
}

/// Numeric CSV without header: returns row-major values and column count.
std::vector<std::vector<double>> load_numeric_csv(const std::string& path) {
  std::ifstream f = open_or_throw(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::int64_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str()) {
        throw MalformedLine("not a number: '" + c + "' in " + path, line_no);
      }
      row.push_back(v);
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw MalformedLine("ragged row in " + path, line_no);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<Edge> load_edge_list(const std::string& path, index_t num_nodes) {
  std::ifstream f = open_or_throw(path);
  std::vector<Edge> edges;
  std::string line;
  std::int64_t line_no = 0;
  std::int64_t duplicates = 0;
  std::int64_t first_duplicate_line = 0;
  std::vector<std::pair<index_t, index_t>> seen;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    long long u, v;
    if (!(ss >> u >> v)) {
      throw MalformedLine("expected two node ids in " + path, line_no);
    }
    std::string extra;
    if (ss >> extra) {
      throw MalformedLine("trailing tokens after edge in " + path, line_no);
    }
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
      throw MalformedLine("edge endpoint out of range in " + path, line_no);
    }
    if (u == v) {
      throw MalformedLine("self-loop in " + path, line_no);
    }
    seen.emplace_back(std::min<index_t>(u, v), std::max<index_t>(u, v));
    edges.push_back({static_cast<index_t>(u), static_cast<index_t>(v)});
    (void)first_duplicate_line;
  }
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 1; i < seen.size(); ++i) {
    if (seen[i] == seen[i - 1]) ++duplicates;
  }
  if (duplicates > 0) {
    throw MalformedLine("edge list contains " + std::to_string(duplicates) +
                            " duplicate edge(s) in " + path,
                        line_no);
  }
  return edges;
}

void save_edge_list(const std::string& path, const Graph& graph) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << "# edges: " << graph.edges().size() << " nodes: " << graph.num_nodes() << "\n";
  for (const Edge& e : graph.edges()) f << e.u << " " << e.v << "\n";
}

void save_matrix_csv(const std::string& path, const SparseMatrix& m) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << "rows,cols,nnz\n";
  f << m.rows() << "," << m.cols() << "," << m.nnz() << "\n";
  for (index_t j = 0; j < m.cols(); ++j) {
    const auto rows = m.col_rows(j);
    const auto vals = m.col_vals(j);
    for (std::size_t e = 0; e < rows.size(); ++e) {
      f << rows[e] << "," << j << "," << format_double(vals[e]) << "\n";
    }
  }
}

SparseMatrix load_matrix_csv(const std::string& path) {
  std::ifstream f = open_or_throw(path);
  std::string line;
  if (!std::getline(f, line) || split_csv_line(line) != std::vector<std::string>{"rows", "cols", "nnz"}) {
    throw MalformedLine("matrix CSV must start with 'rows,cols,nnz' in " + path, 1);
  }
  if (!std::getline(f, line)) throw MalformedLine("missing dimension line in " + path, 2);
  const auto dims = split_csv_line(line);
  if (dims.size() != 3) throw MalformedLine("bad dimension line in " + path, 2);
  const index_t rows = std::strtoll(dims[0].c_str(), nullptr, 10);
  const index_t cols = std::strtoll(dims[1].c_str(), nullptr, 10);
  const index_t nnz = std::strtoll(dims[2].c_str(), nullptr, 10);

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  std::int64_t line_no = 2;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw MalformedLine("expected row,col,value in " + path, line_no);
    Triplet t;
    t.row = std::strtoll(cells[0].c_str(), nullptr, 10);
    t.col = std::strtoll(cells[1].c_str(), nullptr, 10);
    t.value = std::strtod(cells[2].c_str(), nullptr);
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw MalformedLine("entry outside declared dimensions in " + path, line_no);
    }
    triplets.push_back(t);
  }
  if (static_cast<index_t>(triplets.size()) != nnz) {
    throw MalformedLine("entry count does not match declared nnz in " + path, line_no);
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

void save_split_csv(const std::string& path, const Split& split) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << "node,partition\n";
  for (index_t n : split.train) f << n << ",train\n";
  for (index_t n : split.val) f << n << ",val\n";
  for (index_t n : split.test) f << n << ",test\n";
}

std::vector<int> load_grouping_csv(const std::string& path, index_t num_nodes) {
  std::ifstream f = open_or_throw(path);
  std::vector<int> group_of(static_cast<std::size_t>(num_nodes), -1);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line == "node,group") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 2) throw MalformedLine("expected node,group in " + path, line_no);
    const index_t node = std::strtoll(cells[0].c_str(), nullptr, 10);
    const int group = static_cast<int>(std::strtol(cells[1].c_str(), nullptr, 10));
    if (node < 0 || node >= num_nodes) {
      throw MalformedLine("node id out of range in " + path, line_no);
    }
    group_of[static_cast<std::size_t>(node)] = group;
  }
  for (std::size_t i = 0; i < group_of.size(); ++i) {
    if (group_of[i] < 0) {
      throw Error("grouping file misses node " + std::to_string(i));
    }
  }
  return group_of;
}

LoadedDataset load_dataset(const std::string& dir) {
  const auto features_rows = load_numeric_csv(dir + "/features.csv");
  if (features_rows.empty()) throw Error("features.csv is empty in " + dir);
  const index_t n = static_cast<index_t>(features_rows.size());
  const index_t d = static_cast<index_t>(features_rows[0].size());

  Dense features(d, n);
  for (index_t j = 0; j < n; ++j) {
    for (index_t i = 0; i < d; ++i) {
      features(i, j) = features_rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
  }
  // Re-normalize feature columns that drifted from unit norm.
  bool warned = false;
  for (index_t j = 0; j < n; ++j) {
    double norm2 = 0.0;
    for (double v : features.col_span(j)) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) throw Error("zero feature column " + std::to_string(j) + " in " + dir);
    if (std::abs(norm - 1.0) > 1e-12) {
      if (std::abs(norm - 1.0) > 1e-6 && !warned) {
        std::cerr << "warning: feature columns in " << dir
                  << " are not unit norm (got " << norm << "); re-normalizing\n";
        warned = true;
      }
      for (double& v : features.col_span(j)) v /= norm;
    }
  }

  const auto label_rows = load_numeric_csv(dir + "/labels.csv");
  if (static_cast<index_t>(label_rows.size()) != n) {
    throw Error("labels.csv row count does not match features in " + dir);
  }

  LoadedDataset out{Graph(n, load_edge_list(dir + "/edges.txt", n)), std::move(features),
                    Dense(), std::nullopt, std::nullopt};

  // Single-column nonnegative integers are class ids; expand to one-hot.
  const index_t label_width = static_cast<index_t>(label_rows[0].size());
  bool classes = label_width == 1;
  if (classes) {
    for (const auto& row : label_rows) {
      const double v = row[0];
      if (v < 0.0 || v != std::floor(v)) {
        classes = false;
        break;
      }
    }
  }
  if (classes) {
    std::vector<int> ids(static_cast<std::size_t>(n));
    int num_classes = 0;
    for (index_t j = 0; j < n; ++j) {
      ids[static_cast<std::size_t>(j)] = static_cast<int>(label_rows[static_cast<std::size_t>(j)][0]);
      num_classes = std::max(num_classes, ids[static_cast<std::size_t>(j)] + 1);
    }
    if (num_classes < 2) {
      classes = false;  // a constant column is regression, not classes
    } else {
      out.labels = Dense(num_classes, n);
      for (index_t j = 0; j < n; ++j) {
        out.labels(ids[static_cast<std::size_t>(j)], j) = 1.0;
      }
      out.class_labels = std::move(ids);
    }
  }
  if (!classes) {
    out.labels = Dense(label_width, n);
    for (index_t j = 0; j < n; ++j) {
      for (index_t i = 0; i < label_width; ++i) {
        out.labels(i, j) = label_rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      }
    }
  }

  if (fs::exists(dir + "/grouping.csv")) {
    out.grouping = load_grouping_csv(dir + "/grouping.csv", n);
  }
  return out;
}

void save_dataset(const std::string& dir, const GeneratedDataset& ds,
                  const SyntheticGraphSpec& graph_spec,
                  const TargetFunctionSpec& target_spec, std::uint64_t seed) {
  fs::create_directories(dir);
  save_edge_list(dir + "/edges.txt", ds.graph);

  const index_t n = ds.features.cols();
  {
    std::ofstream f(dir + "/features.csv");
    if (!f) throw Error("cannot write features.csv");
    for (index_t j = 0; j < n; ++j) {
      const auto col = ds.features.col_span(j);
      for (std::size_t i = 0; i < col.size(); ++i) {
        f << (i ? "," : "") << format_double(col[i]);
      }
      f << "\n";
    }
  }
  {
    std::ofstream f(dir + "/labels.csv");
    if (!f) throw Error("cannot write labels.csv");
    for (index_t j = 0; j < n; ++j) {
      const auto col = ds.labels.col_span(j);
      for (std::size_t i = 0; i < col.size(); ++i) {
        f << (i ? "," : "") << format_double(col[i]);
      }
      f << "\n";
    }
  }
  {
    std::ofstream f(dir + "/grouping.csv");
    if (!f) throw Error("cannot write grouping.csv");
    f << "node,group\n";
    for (index_t j = 0; j < n; ++j) {
      f << j << "," << ds.grouping.group_of[static_cast<std::size_t>(j)] << "\n";
    }
  }
  {
    nlohmann::json meta;
    meta["seed"] = seed;
    meta["clamp"] = {graph_spec.clamp_lo, graph_spec.clamp_hi};
    meta["groups"] = nlohmann::json::array();
    for (const GroupSpec& g : graph_spec.groups) {
      meta["groups"].push_back({{"size", g.size},
                                {"mean_degree", g.mean_degree},
                                {"degree_stddev", g.degree_stddev}});
    }
    meta["target"] = {{"feature_dim", target_spec.feature_dim},
                      {"output_dim", target_spec.output_dim},
                      {"hidden_dim", target_spec.hidden_dim},
                      {"alpha", target_spec.alpha}};
    std::ofstream f(dir + "/meta.json");
    if (!f) throw Error("cannot write meta.json");
    f << meta.dump(2) << "\n";
  }
}

}  // namespace lwsgcn
