#pragma once

#include <optional>
#include <vector>

#include "lwsgcn/model.hpp"
#include "lwsgcn/sparsifier.hpp"

namespace lwsgcn {

enum class MatrixChoice { full, effective, sampled };

struct TrainConfig {
  std::int64_t iterations = 1;
  double eta_w = 0.1;
  double eta_v = 0.1;
  SamplerConfig layer1;
  SamplerConfig layer2;
  bool resample_every_iteration = true;
  std::uint64_t seed = 0;
  std::int64_t log_every = 0;  // 0: log only first and last iteration
  std::int64_t batch_size = 1;
  // Base matrix the samplers act on (and the layer matrix when mode=none).
  MatrixChoice base_matrix = MatrixChoice::full;
  // Adjacency used when logging risk (and by callers evaluating the model).
  MatrixChoice eval_matrix = MatrixChoice::full;
  // Optional norm monitors; crossing them is reported in the log, nothing
  // is enforced.
  std::optional<double> tau_w_cap;
  std::optional<double> tau_v_cap;

  void validate() const;
};

struct TrainLogRow {
  std::int64_t iteration = 0;
  double risk = 0.0;       // empirical risk over the labeled set
  double node_loss = 0.0;  // loss of the node sampled at this iteration
  double w_dev_fro = 0.0;
  double v_dev_fro = 0.0;
  double dev1_l1 = 0.0;  // ||A^{1t} - A*||_1, NaN when A* is absent
  double dev2_l1 = 0.0;
};

struct TrainLog {
  std::vector<TrainLogRow> rows;

  double mean_dev1() const;
  double mean_dev2() const;
};

/// One training problem: features, adjacency, labels, labeled set.
struct TrainProblem {
  const Dense* x = nullptr;
  const SparseMatrix* a = nullptr;
  const SparseMatrix* a_star = nullptr;  // optional
  const Dense* y = nullptr;
  std::vector<index_t> omega;
  const DegreeGrouping* grouping = nullptr;  // required by blockwise samplers
};

index_t sample_labeled_node(const std::vector<index_t>& omega, RngStream& rng);

/// Algorithm: T iterations of SGD over the weight deviations, with the
/// per-layer adjacency matrices redrawn from their samplers each
/// iteration (substream (seed, iteration, layer)).
TrainLog train(const TrainProblem& problem, ModelParams& params,
               const TrainConfig& cfg);

}  // namespace lwsgcn
