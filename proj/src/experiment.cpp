#include "lwsgcn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "lwsgcn/kernels.hpp"
#include "lwsgcn/metrics.hpp"
#include "lwsgcn/rng.hpp"

namespace lwsgcn {

namespace {

constexpr std::uint64_t kDatasetTag = 0xDA7A5EEDull;
constexpr std::uint64_t kOmegaTag = 0x03E6A000ull;

SamplerConfig::Mode mode_from_string(const std::string& s) {
  if (s == "none") return SamplerConfig::Mode::none;
  if (s == "blockwise") return SamplerConfig::Mode::blockwise;
  if (s == "global") return SamplerConfig::Mode::global;
  if (s == "band") return SamplerConfig::Mode::band;
  throw ConfigError("unknown sampler mode '" + s + "'");
}

MatrixChoice matrix_from_string(const std::string& s) {
  if (s == "full") return MatrixChoice::full;
  if (s == "effective") return MatrixChoice::effective;
  if (s == "sampled") return MatrixChoice::sampled;
  throw ConfigError("unknown matrix choice '" + s + "'");
}

std::string sanitize_for_csv(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

}  // namespace

SamplerConfig build_sampler(const SamplerSpec& spec, const DegreeGrouping* grouping) {
  SamplerConfig cfg;
  cfg.mode = spec.mode;
  switch (spec.mode) {
    case SamplerConfig::Mode::none:
      break;
    case SamplerConfig::Mode::global:
      cfg.global.top_fraction = spec.q;
      cfg.global.retain_top_prob = spec.retain_top;
      cfg.global.retain_rest_prob = spec.retain_rest;
      cfg.global.validate();
      break;
    case SamplerConfig::Mode::band:
      cfg.band.band_start = spec.s;
      cfg.band.band_width = spec.w;
      cfg.band.validate();
      break;
    case SamplerConfig::Mode::blockwise: {
      if (grouping == nullptr) throw ConfigError("blockwise sampler requires a grouping");
      const int l = grouping->num_groups;
      cfg.blockwise.prune_prob = Dense(l, l);
      if (!spec.p_matrix.empty()) {
        if (static_cast<int>(spec.p_matrix.size()) != l) {
          throw ConfigError("prune_prob matrix does not match the group count");
        }
        for (int i = 0; i < l; ++i) {
          if (static_cast<int>(spec.p_matrix[static_cast<std::size_t>(i)].size()) != l) {
            throw ConfigError("prune_prob matrix must be L x L");
          }
          for (int j = 0; j < l; ++j) {
            cfg.blockwise.prune_prob(i, j) = std::clamp(
                spec.p_scale * spec.p_matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                0.0, 1.0);
          }
        }
      } else {
        cfg.blockwise.prune_prob.fill(std::clamp(spec.p_scale * spec.p, 0.0, 1.0));
      }
      cfg.blockwise.d1 = grouping->representative_degree.front();
      cfg.blockwise.validate(l);
      break;
    }
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (axes.empty() || axes.size() > 2) {
    throw ConfigError("a sweep needs exactly 1 or 2 axes");
  }
  static const std::set<std::string> known{"m", "omega", "d2", "sigma", "q1",
                                           "q2", "p1", "p2", "s1", "s2"};
  for (const SweepAxis& axis : axes) {
    if (axis.values.empty()) throw ConfigError("sweep axis has no values");
    if (known.count(axis.name) == 0) {
      throw ConfigError("unknown sweep axis '" + axis.name + "'");
    }
    if (!synthetic && (axis.name == "d2" || axis.name == "sigma")) {
      throw ConfigError("axis " + axis.name + " needs a synthetic dataset");
    }
  }
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (m < 1 || omega < 1) throw ConfigError("m and omega must be >= 1");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
}

SamplerSpec parse_sampler_section(const TomlTable& toml, const std::string& section) {
  SamplerSpec spec;
  if (!toml.has(section + ".mode")) return spec;
  spec.mode = mode_from_string(toml.require_string(section + ".mode"));
  spec.q = toml.get_double(section + ".top_fraction", spec.q);
  spec.retain_top = toml.get_double(section + ".retain_top_prob", spec.retain_top);
  spec.retain_rest = toml.get_double(section + ".retain_rest_prob", spec.retain_rest);
  spec.s = toml.get_double(section + ".band_start", spec.s);
  spec.w = toml.get_double(section + ".band_width", spec.w);
  if (toml.has(section + ".prune_prob")) {
    const TomlValue& v = toml.require(section + ".prune_prob");
    if (v.is_array()) {
      for (const TomlValue& row : v.as_array()) {
        std::vector<double> r;
        for (const TomlValue& x : row.as_array()) r.push_back(x.as_double());
        spec.p_matrix.push_back(std::move(r));
      }
    } else {
      spec.p = v.as_double();
    }
  }
  return spec;
}

SyntheticGraphSpec parse_graph_section(const TomlTable& toml) {
  SyntheticGraphSpec spec;
  const auto sizes = toml.require_doubles("graph.sizes");
  const auto degrees = toml.require_doubles("graph.degrees");
  const auto sigmas = toml.require_doubles("graph.sigmas");
  if (sizes.size() != degrees.size() || sizes.size() != sigmas.size()) {
    throw ConfigError("graph.sizes, graph.degrees, graph.sigmas must have equal length");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    spec.groups.push_back({static_cast<index_t>(sizes[i]), degrees[i], sigmas[i]});
  }
  if (toml.has("graph.clamp")) {
    const auto clamp = toml.require_doubles("graph.clamp");
    if (clamp.size() != 2) throw ConfigError("graph.clamp must be [lo, hi]");
    spec.clamp_lo = clamp[0];
    spec.clamp_hi = clamp[1];
  }
  spec.validate();
  return spec;
}

TargetFunctionSpec parse_target_section(const TomlTable& toml) {
  TargetFunctionSpec spec;
  spec.feature_dim = toml.get_int("target.feature_dim", spec.feature_dim);
  spec.output_dim = toml.get_int("target.output_dim", spec.output_dim);
  spec.hidden_dim = toml.get_int("target.hidden_dim", spec.hidden_dim);
  spec.alpha = toml.get_double("target.alpha", spec.alpha);
  spec.validate();
  return spec;
}

ExperimentConfig parse_experiment(const TomlTable& toml) {
  ExperimentConfig cfg;
  const std::string source = toml.get_string("dataset.source", "synthetic");
  if (source == "synthetic") {
    cfg.synthetic = true;
    cfg.graph = parse_graph_section(toml);
    cfg.target = parse_target_section(toml);
  } else if (source == "dir") {
    cfg.synthetic = false;
    cfg.dataset_dir = toml.require_string("dataset.dir");
  } else {
    throw ConfigError("dataset.source must be 'synthetic' or 'dir'");
  }

  cfg.m = toml.get_int("train.m", cfg.m);
  cfg.omega = toml.get_int("train.omega", cfg.omega);
  cfg.sigma_w = toml.get_double("train.sigma_w", cfg.sigma_w);
  cfg.sigma_v = toml.get_double("train.sigma_v", cfg.sigma_v);
  cfg.iterations = toml.get_int("train.iterations", cfg.iterations);
  cfg.eta_w = toml.get_double("train.eta_w", cfg.eta_w);
  cfg.eta_v = toml.get_double("train.eta_v", cfg.eta_v);
  cfg.log_every = toml.get_int("train.log_every", cfg.log_every);
  cfg.batch_size = toml.get_int("train.batch_size", cfg.batch_size);
  cfg.resample_every_iteration =
      toml.get_bool("train.resample_every_iteration", cfg.resample_every_iteration);
  cfg.base_matrix = matrix_from_string(toml.get_string("train.base_matrix", "full"));
  cfg.eval_matrix = matrix_from_string(toml.get_string("train.eval_matrix", "full"));

  cfg.layer1 = parse_sampler_section(toml, "sparsify.layer1");
  cfg.layer2 = parse_sampler_section(toml, "sparsify.layer2");

  cfg.master_seed = static_cast<std::uint64_t>(toml.get_int("sweep.seed", 1));
  cfg.replications = toml.get_int("sweep.replications", 1);
  cfg.output = toml.get_string("sweep.output", cfg.output);
  {
    SweepAxis axis;
    axis.name = toml.require_string("sweep.axis");
    axis.values = toml.require_doubles("sweep.values");
    cfg.axes.push_back(std::move(axis));
  }
  if (toml.has("sweep.axis2")) {
    SweepAxis axis;
    axis.name = toml.require_string("sweep.axis2");
    axis.values = toml.require_doubles("sweep.values2");
    cfg.axes.push_back(std::move(axis));
  }
  cfg.validate();
  return cfg;
}

namespace {

/// An ExperimentConfig with one cell's axis values substituted in.
void apply_axis(ExperimentConfig& cfg, const std::string& name, double value) {
  if (name == "m") {
    cfg.m = static_cast<index_t>(value);
  } else if (name == "omega") {
    cfg.omega = static_cast<index_t>(value);
  } else if (name == "d2") {
    if (!cfg.synthetic) throw ConfigError("axis d2 needs a synthetic dataset");
    cfg.graph.groups.back().mean_degree = value;
  } else if (name == "sigma") {
    if (!cfg.synthetic) throw ConfigError("axis sigma needs a synthetic dataset");
    for (GroupSpec& g : cfg.graph.groups) g.degree_stddev = value;
  } else if (name == "q1") {
    cfg.layer1.q = value;
  } else if (name == "q2") {
    cfg.layer2.q = value;
  } else if (name == "p1") {
    cfg.layer1.p_scale = value;
  } else if (name == "p2") {
    cfg.layer2.p_scale = value;
  } else if (name == "s1") {
    cfg.layer1.s = value;
  } else if (name == "s2") {
    cfg.layer2.s = value;
  } else {
    throw ConfigError("unknown sweep axis '" + name + "'");
  }
}

struct CellData {
  SparseMatrix a;
  SparseMatrix a_star;
  Dense x;
  Dense y;
  DegreeGrouping grouping;
  std::vector<index_t> omega;
  std::vector<index_t> test;
};

CellData build_cell_data(const ExperimentConfig& cfg, std::uint64_t dataset_seed) {
  CellData data;
  if (cfg.synthetic) {
    GeneratedDataset ds = generate_dataset(cfg.graph, cfg.target, dataset_seed);
    data.a = std::move(ds.adjacency);
    data.a_star = std::move(ds.effective);
    data.x = std::move(ds.features);
    data.y = std::move(ds.labels);
    data.grouping = std::move(ds.grouping);
  } else {
    LoadedDataset ds = load_dataset(cfg.dataset_dir);
    data.a = build_normalized_adjacency(ds.graph);
    data.grouping = ds.grouping.has_value()
                        ? assign_degree_groups(ds.graph, *ds.grouping)
                        : assign_degree_groups(ds.graph, std::vector<double>{});
    data.a_star = build_effective_adjacency(data.a, data.grouping);
    data.x = std::move(ds.features);
    data.y = std::move(ds.labels);
  }

  LabeledSplit split = labeled_split(data.x.cols(), cfg.omega, dataset_seed);
  data.omega = std::move(split.omega);
  data.test = std::move(split.test);
  return data;
}

const std::vector<std::string> kSweepHeader = {
    "cell", "rep", "seed", "dataset_seed", "m", "omega", "d2", "sigma",
    "q1", "q2", "p1", "p2", "s1", "s2", "layer1_mode", "layer2_mode",
    "a_l1", "a_star_l1", "mean_dev1_l1", "mean_dev2_l1",
    "init_test_l2", "init_test_class", "final_risk",
    "test_l2_error", "test_class_error", "status"};

std::string sampler_knob(const SamplerSpec& s, SamplerConfig::Mode mode, double value) {
  return s.mode == mode ? format_double(value) : std::string();
}

std::vector<std::string> run_cell(const ExperimentConfig& cell_cfg, std::int64_t cell,
                                  std::int64_t rep, std::uint64_t cell_seed,
                                  std::uint64_t dataset_seed) {
  std::vector<std::string> row(kSweepHeader.size());
  row[0] = std::to_string(cell);
  row[1] = std::to_string(rep);
  row[2] = std::to_string(cell_seed);
  row[3] = std::to_string(dataset_seed);
  row[4] = std::to_string(cell_cfg.m);
  row[5] = std::to_string(cell_cfg.omega);
  row[6] = cell_cfg.synthetic ? format_double(cell_cfg.graph.groups.back().mean_degree)
                              : std::string();
  row[7] = cell_cfg.synthetic ? format_double(cell_cfg.graph.groups.back().degree_stddev)
                              : std::string();
  row[8] = sampler_knob(cell_cfg.layer1, SamplerConfig::Mode::global, cell_cfg.layer1.q);
  row[9] = sampler_knob(cell_cfg.layer2, SamplerConfig::Mode::global, cell_cfg.layer2.q);
  row[10] = sampler_knob(cell_cfg.layer1, SamplerConfig::Mode::blockwise,
                         cell_cfg.layer1.p_scale * cell_cfg.layer1.p);
  row[11] = sampler_knob(cell_cfg.layer2, SamplerConfig::Mode::blockwise,
                         cell_cfg.layer2.p_scale * cell_cfg.layer2.p);
  row[12] = sampler_knob(cell_cfg.layer1, SamplerConfig::Mode::band, cell_cfg.layer1.s);
  row[13] = sampler_knob(cell_cfg.layer2, SamplerConfig::Mode::band, cell_cfg.layer2.s);
  row[14] = sampler_mode_name(cell_cfg.layer1.mode);
  row[15] = sampler_mode_name(cell_cfg.layer2.mode);
  row[25] = "ok";

  const CellData data = build_cell_data(cell_cfg, dataset_seed);
  row[16] = format_double(matrix_l1_norm(data.a));
  row[17] = format_double(matrix_l1_norm(data.a_star));

  InitConfig init_cfg = InitConfig::defaults(cell_cfg.m);
  if (cell_cfg.sigma_w >= 0.0) init_cfg.sigma_w = cell_cfg.sigma_w;
  if (cell_cfg.sigma_v >= 0.0) init_cfg.sigma_v = cell_cfg.sigma_v;
  // Initialization is tied to the replication (dataset stream), not the
  // cell, so that cells along a sweep axis are compared from the same
  // starting point.
  RngStream init_rng = RngStream(dataset_seed).substream(0xC0EF);
  ModelParams params = ModelParams::init(cell_cfg.m, data.x.rows(), data.y.rows(),
                                         init_cfg, init_rng);

  const SparseMatrix* eval1 = &data.a;
  const SparseMatrix* eval2 = &data.a;
  SparseMatrix sampled_eval1, sampled_eval2;
  if (cell_cfg.eval_matrix == MatrixChoice::effective) {
    eval1 = &data.a_star;
    eval2 = &data.a_star;
  } else if (cell_cfg.eval_matrix == MatrixChoice::sampled) {
    const SparseMatrix& base =
        cell_cfg.base_matrix == MatrixChoice::effective ? data.a_star : data.a;
    const LayerSamplerPlan p1 =
        LayerSamplerPlan::make(base, build_sampler(cell_cfg.layer1, &data.grouping),
                               &data.grouping);
    const LayerSamplerPlan p2 =
        LayerSamplerPlan::make(base, build_sampler(cell_cfg.layer2, &data.grouping),
                               &data.grouping);
    const RngStream eval_rng = RngStream(cell_seed).substream(2);
    sampled_eval1 = p1.sample_matrix(eval_rng.substream(0));
    sampled_eval2 = p2.sample_matrix(eval_rng.substream(1));
    eval1 = &sampled_eval1;
    eval2 = &sampled_eval2;
  }

  const EvalReport init_report =
      evaluate(params, data.x, *eval1, *eval2, data.test, data.y);
  row[20] = format_double(init_report.mean_l2_error);
  row[21] = format_double(init_report.classification_error);

  TrainConfig tc;
  tc.iterations = cell_cfg.iterations;
  tc.eta_w = cell_cfg.eta_w;
  tc.eta_v = cell_cfg.eta_v;
  tc.layer1 = build_sampler(cell_cfg.layer1, &data.grouping);
  tc.layer2 = build_sampler(cell_cfg.layer2, &data.grouping);
  tc.resample_every_iteration = cell_cfg.resample_every_iteration;
  tc.seed = detail::mix2(cell_seed, 1);
  tc.log_every = cell_cfg.log_every;
  tc.batch_size = cell_cfg.batch_size;
  tc.base_matrix = cell_cfg.base_matrix;
  tc.eval_matrix = cell_cfg.eval_matrix;

  TrainProblem problem;
  problem.x = &data.x;
  problem.a = &data.a;
  problem.a_star = &data.a_star;
  problem.y = &data.y;
  problem.omega = data.omega;
  problem.grouping = &data.grouping;

  const TrainLog log = train(problem, params, tc);
  row[18] = format_double(log.mean_dev1());
  row[19] = format_double(log.mean_dev2());
  row[22] = format_double(log.rows.back().risk);

  const EvalReport report = evaluate(params, data.x, *eval1, *eval2, data.test, data.y);
  row[23] = format_double(report.mean_l2_error);
  row[24] = format_double(report.classification_error);
  return row;
}

}  // namespace

SweepOutput run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();

  // Enumerate cells in row-major axis order.
  std::vector<std::vector<double>> cells;
  if (cfg.axes.size() == 1) {
    for (double v : cfg.axes[0].values) cells.push_back({v});
  } else {
    for (double v1 : cfg.axes[0].values) {
      for (double v2 : cfg.axes[1].values) cells.push_back({v1, v2});
    }
  }

  const std::int64_t num_cells = static_cast<std::int64_t>(cells.size());
  const std::int64_t reps = cfg.replications;
  std::vector<std::vector<std::string>> rows(
      static_cast<std::size_t>(num_cells * reps));
  std::vector<double> wall_ms(static_cast<std::size_t>(num_cells * reps), 0.0);

  // Cells are independent; results land in a preallocated slot per
  // (cell, rep), so the output order is fixed no matter how the loop is
  // scheduled.
  const std::int64_t total = num_cells * reps;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const std::int64_t cell = idx / reps;
    const std::int64_t rep = idx % reps;
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t cell_seed =
        detail::mix2(detail::mix2(cfg.master_seed, static_cast<std::uint64_t>(cell)),
                     static_cast<std::uint64_t>(rep));
    const std::uint64_t dataset_seed =
        detail::mix2(cfg.master_seed ^ kDatasetTag, static_cast<std::uint64_t>(rep));

    std::vector<std::string> row;
    try {
      ExperimentConfig cell_cfg = cfg;
      for (std::size_t a = 0; a < cfg.axes.size(); ++a) {
        apply_axis(cell_cfg, cfg.axes[a].name, cells[static_cast<std::size_t>(cell)][a]);
      }
      row = run_cell(cell_cfg, cell, rep, cell_seed, dataset_seed);
    } catch (const std::exception& e) {
      row.assign(kSweepHeader.size(), "");
      row[0] = std::to_string(cell);
      row[1] = std::to_string(rep);
      row[2] = std::to_string(cell_seed);
      row[3] = std::to_string(dataset_seed);
      row[25] = "error: " + sanitize_for_csv(e.what());
    }
    rows[static_cast<std::size_t>(idx)] = std::move(row);
    wall_ms[static_cast<std::size_t>(idx)] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
  }

  SweepOutput out;
  {
    std::ostringstream csv;
    for (std::size_t i = 0; i < kSweepHeader.size(); ++i) {
      csv << (i ? "," : "") << kSweepHeader[i];
    }
    csv << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
      csv << "\n";
    }
    out.results_csv = csv.str();
  }
  {
    std::ostringstream timing;
    timing << "cell,rep,wall_ms\n";
    for (std::int64_t idx = 0; idx < total; ++idx) {
      timing << idx / reps << "," << idx % reps << ","
             << format_double(wall_ms[static_cast<std::size_t>(idx)]) << "\n";
    }
    out.timing_csv = timing.str();
  }
  {
    std::ostringstream plot;
    plot << "# gnuplot companion\n"
         << "set datafile separator ','\n"
         << "set key autotitle columnhead\n"
         << "set xlabel '" << cfg.axes[0].name << "'\n"
         << "set ylabel 'test_l2_error'\n"
         << "plot '" << cfg.output << "' using '" << cfg.axes[0].name
         << "':'test_l2_error' with points\n";
    out.gnuplot_script = plot.str();
  }
  return out;
}

namespace {

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

int distinct_count(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return static_cast<int>(v.size());
}

}  // namespace

LabeledSplit labeled_split(index_t n, index_t omega, std::uint64_t dataset_seed) {
  if (omega < 1 || omega >= n) {
    throw ConfigError("omega must be in [1, N-1] so a test set remains");
  }
  std::vector<index_t> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), index_t{0});
  RngStream rng(detail::mix2(dataset_seed, kOmegaTag));
  for (index_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<index_t>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  LabeledSplit split;
  split.omega.assign(perm.begin(), perm.begin() + omega);
  split.test.assign(perm.begin() + omega, perm.end());
  std::sort(split.omega.begin(), split.omega.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

AsymmetryFit fit_asymmetry_slopes(const CsvTable& table) {
  std::vector<double> dev1, err1, dev2, err2;
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    if (table.cell(r, "status") != "ok") continue;
    const std::string m1 = table.cell(r, "layer1_mode");
    const std::string m2 = table.cell(r, "layer2_mode");
    const double err = table.number(r, "test_l2_error");
    if (m1 != "none" && m2 == "none") {
      dev1.push_back(table.number(r, "mean_dev1_l1"));
      err1.push_back(err);
    } else if (m1 == "none" && m2 != "none") {
      dev2.push_back(table.number(r, "mean_dev2_l1"));
      err2.push_back(err);
    }
  }
  if (distinct_count(dev1) < 3) {
    throw InsufficientPoints("need >= 3 distinct layer-1 deviation values, have " +
                             std::to_string(distinct_count(dev1)));
  }
  if (distinct_count(dev2) < 3) {
    throw InsufficientPoints("need >= 3 distinct layer-2 deviation values, have " +
                             std::to_string(distinct_count(dev2)));
  }

  AsymmetryFit fit;
  fit.slope1 = ols_slope(dev1, err1);
  fit.slope2 = ols_slope(dev2, err2);
  fit.points1 = static_cast<int>(dev1.size());
  fit.points2 = static_cast<int>(dev2.size());
  fit.dev1_min = *std::min_element(dev1.begin(), dev1.end());
  fit.dev1_max = *std::max_element(dev1.begin(), dev1.end());
  fit.dev2_min = *std::min_element(dev2.begin(), dev2.end());
  fit.dev2_max = *std::max_element(dev2.begin(), dev2.end());
  if (fit.slope1 == 0.0 && fit.slope2 == 0.0) {
    fit.degenerate = true;
    fit.ratio = std::nan("");
  } else {
    fit.ratio = fit.slope1 / fit.slope2;
  }
  return fit;
}

}  // namespace lwsgcn
