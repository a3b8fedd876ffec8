#pragma once

#include <string>

#include "lwsgcn/config.hpp"
#include "lwsgcn/csv.hpp"
#include "lwsgcn/dataset_io.hpp"
#include "lwsgcn/trainer.hpp"

namespace lwsgcn {

/// One layer's sampler knobs before a dataset (and its grouping) exists.
struct SamplerSpec {
  SamplerConfig::Mode mode = SamplerConfig::Mode::none;
  // global
  double q = 1.0;
  double retain_top = 0.99;
  double retain_rest = 0.01;
  // band
  double s = 0.0;
  double w = 0.5;
  // blockwise: uniform p (or a full matrix), times a sweepable scale
  double p = 0.0;
  std::vector<std::vector<double>> p_matrix;
  double p_scale = 1.0;
};

SamplerConfig build_sampler(const SamplerSpec& spec, const DegreeGrouping* grouping);

struct SweepAxis {
  std::string name;  // m, omega, d2, sigma, q1, q2, p1, p2, s1, s2
  std::vector<double> values;
};

struct ExperimentConfig {
  bool synthetic = true;
  std::string dataset_dir;
  SyntheticGraphSpec graph;
  TargetFunctionSpec target;

  index_t m = 50;
  index_t omega = 1200;
  double sigma_w = -1.0;  // negative: use InitConfig defaults
  double sigma_v = -1.0;

  std::int64_t iterations = 1000;
  double eta_w = 0.05;
  double eta_v = 0.05;
  std::int64_t log_every = 0;
  std::int64_t batch_size = 1;
  bool resample_every_iteration = true;
  MatrixChoice base_matrix = MatrixChoice::full;
  MatrixChoice eval_matrix = MatrixChoice::full;

  SamplerSpec layer1;
  SamplerSpec layer2;

  std::vector<SweepAxis> axes;  // exactly 1 or 2
  std::int64_t replications = 1;
  std::uint64_t master_seed = 1;
  std::string output = "results.csv";

  void validate() const;
};

ExperimentConfig parse_experiment(const TomlTable& toml);

SamplerSpec parse_sampler_section(const TomlTable& toml, const std::string& section);
SyntheticGraphSpec parse_graph_section(const TomlTable& toml);
TargetFunctionSpec parse_target_section(const TomlTable& toml);

struct SweepOutput {
  std::string results_csv;  // deterministic given config + seed
  std::string timing_csv;   // wall times, kept out of the results
  std::string gnuplot_script;
};

/// Run every axis-value combination x replication; one CSV row per cell.
/// Failed cells are recorded in the status column and the sweep continues.
SweepOutput run_sweep(const ExperimentConfig& cfg);

struct AsymmetryFit {
  double slope1 = 0.0;
  double slope2 = 0.0;
  double ratio = 0.0;
  bool degenerate = false;  // both slopes zero
  int points1 = 0;
  int points2 = 0;
  double dev1_min = 0.0, dev1_max = 0.0;
  double dev2_min = 0.0, dev2_max = 0.0;
};

/// OLS slope of test error against per-layer deviation, over the rows
/// where that layer was sparsified and the other one was not.
AsymmetryFit fit_asymmetry_slopes(const CsvTable& table);

struct LabeledSplit {
  std::vector<index_t> omega;
  std::vector<index_t> test;
};

/// Seeded shuffle of [0, n): the first `omega` nodes are labeled, the rest
/// are the test set (both sorted). Shared by the sweep and the train CLI.
LabeledSplit labeled_split(index_t n, index_t omega, std::uint64_t dataset_seed);

}  // namespace lwsgcn
