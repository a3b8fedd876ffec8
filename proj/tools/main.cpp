#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <omp.h>

#include "lwsgcn/experiment.hpp"
#include "lwsgcn/metrics.hpp"

using namespace lwsgcn;

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << content;
}

std::string train_log_csv(const TrainLog& log) {
  std::string out = "iteration,risk,node_loss,w_dev_fro,v_dev_fro,dev1_l1,dev2_l1\n";
  for (const TrainLogRow& r : log.rows) {
    out += std::to_string(r.iteration) + "," + format_double(r.risk) + "," +
           format_double(r.node_loss) + "," + format_double(r.w_dev_fro) + "," +
           format_double(r.v_dev_fro) + "," + format_double(r.dev1_l1) + "," +
           format_double(r.dev2_l1) + "\n";
  }
  return out;
}

MatrixChoice matrix_choice(const std::string& s) {
  if (s == "full") return MatrixChoice::full;
  if (s == "effective") return MatrixChoice::effective;
  if (s == "sampled") return MatrixChoice::sampled;
  throw ConfigError("unknown matrix choice '" + s + "'");
}

struct DatasetBundle {
  SparseMatrix a;
  SparseMatrix a_star;
  Dense x;
  Dense y;
  DegreeGrouping grouping;
};

DatasetBundle load_bundle(const std::string& dir) {
  LoadedDataset ds = load_dataset(dir);
  DatasetBundle b;
  b.grouping = ds.grouping.has_value()
                   ? assign_degree_groups(ds.graph, *ds.grouping)
                   : assign_degree_groups(ds.graph, std::vector<double>{});
  b.a = build_normalized_adjacency(ds.graph);
  b.a_star = build_effective_adjacency(b.a, b.grouping);
  b.x = std::move(ds.features);
  b.y = std::move(ds.labels);
  return b;
}

int cmd_synth_gen(const std::string& spec_path, const std::string& outdir,
                  std::uint64_t seed) {
  const TomlTable toml = TomlTable::parse_file(spec_path);
  const SyntheticGraphSpec graph = parse_graph_section(toml);
  const TargetFunctionSpec target = parse_target_section(toml);
  if (toml.has("seed")) seed = static_cast<std::uint64_t>(toml.require_int("seed"));
  const GeneratedDataset ds = generate_dataset(graph, target, seed);
  save_dataset(outdir, ds, graph, target, seed);
  std::cout << "wrote " << outdir << ": N=" << ds.graph.num_nodes()
            << " edges=" << ds.graph.edges().size() << " nnz(A)=" << ds.adjacency.nnz()
            << " nnz(A*)=" << ds.effective.nnz()
            << " |A*|_1=" << format_double(matrix_l1_norm(ds.effective)) << "\n";
  return 0;
}

int cmd_sparsify(const std::string& matrix_path, const std::string& cfg_path,
                 const std::string& grouping_path, const std::string& out,
                 const std::string& report, int draws, std::uint64_t seed) {
  const SparseMatrix a = load_matrix_csv(matrix_path);
  const TomlTable toml = TomlTable::parse_file(cfg_path);
  SamplerSpec spec = parse_sampler_section(toml, "sparsify");
  if (spec.mode == SamplerConfig::Mode::none && !toml.has("sparsify.mode")) {
    throw ConfigError("config needs a [sparsify] section with a mode");
  }

  DegreeGrouping grouping = DegreeGrouping::single_group(a.rows(), 1.0);
  if (!grouping_path.empty()) {
    const std::vector<int> group_of = load_grouping_csv(grouping_path, a.rows());
    // medians must come from a graph; for matrix-only input the caller's
    // grouping file is taken as given and representatives come from the
    // per-group mean column degree of the matrix itself
    int num_groups = 0;
    for (int g : group_of) num_groups = std::max(num_groups, g + 1);
    std::vector<double> colsum(static_cast<std::size_t>(num_groups), 0.0);
    std::vector<index_t> count(static_cast<std::size_t>(num_groups), 0);
    for (index_t j = 0; j < a.cols(); ++j) {
      const int g = group_of[static_cast<std::size_t>(j)];
      colsum[static_cast<std::size_t>(g)] += static_cast<double>(a.col_rows(j).size());
      ++count[static_cast<std::size_t>(g)];
    }
    grouping.num_groups = num_groups;
    grouping.group_of = group_of;
    grouping.group_sizes = count;
    grouping.representative_degree.clear();
    for (int g = 0; g < num_groups; ++g) {
      grouping.representative_degree.push_back(
          colsum[static_cast<std::size_t>(g)] /
          static_cast<double>(std::max<index_t>(1, count[static_cast<std::size_t>(g)])));
    }
  } else if (spec.mode == SamplerConfig::Mode::blockwise) {
    // sensible single-group default: budget from the mean column degree
    grouping.representative_degree[0] =
        std::max(1.0, static_cast<double>(a.nnz()) / static_cast<double>(a.cols()));
  }

  const SamplerConfig cfg = build_sampler(spec, &grouping);
  const LayerSamplerPlan plan = LayerSamplerPlan::make(a, cfg, &grouping);
  const RngStream root(seed);
  const SparseMatrix result = plan.sample_matrix(root.substream(0));
  if (!out.empty()) {
    save_matrix_csv(out, result);
    std::cout << "wrote " << out << " nnz=" << result.nnz() << "\n";
  } else {
    std::cout << "nnz=" << result.nnz() << " |.|_1=" << format_double(matrix_l1_norm(result))
              << "\n";
  }

  if (draws > 0) {
    const SparseMatrix eff = build_effective_adjacency(a, grouping);
    std::string csv = "iteration,layer,deviation_l1\n";
    for (int i = 0; i < draws; ++i) {
      const SparseMatrix s = plan.sample_matrix(root.substream(static_cast<std::uint64_t>(i)));
      csv += std::to_string(i) + ",1," + format_double(deviation_l1(s, eff)) + "\n";
    }
    if (report.empty()) {
      std::cout << csv;
    } else {
      write_text(report, csv);
      std::cout << "wrote " << report << "\n";
    }
  }
  return 0;
}

int cmd_train(const std::string& dataset_dir, const std::string& cfg_path,
              const std::string& out_prefix, std::uint64_t seed_override,
              bool seed_given) {
  const TomlTable toml = TomlTable::parse_file(cfg_path);
  const DatasetBundle b = load_bundle(dataset_dir);

  const index_t m = toml.get_int("train.m", 50);
  const index_t omega = toml.get_int("train.omega", b.x.cols() * 6 / 10);
  TrainConfig tc;
  tc.iterations = toml.get_int("train.iterations", 1000);
  tc.eta_w = toml.get_double("train.eta_w", 0.05);
  tc.eta_v = toml.get_double("train.eta_v", 0.05);
  tc.log_every = toml.get_int("train.log_every", 0);
  tc.batch_size = toml.get_int("train.batch_size", 1);
  tc.resample_every_iteration = toml.get_bool("train.resample_every_iteration", true);
  tc.seed = seed_given ? seed_override
                       : static_cast<std::uint64_t>(toml.get_int("train.seed", 1));
  tc.base_matrix = matrix_choice(toml.get_string("train.base_matrix", "full"));
  tc.eval_matrix = matrix_choice(toml.get_string("train.eval_matrix", "full"));
  if (toml.has("train.tau_w_cap")) tc.tau_w_cap = toml.require_double("train.tau_w_cap");
  if (toml.has("train.tau_v_cap")) tc.tau_v_cap = toml.require_double("train.tau_v_cap");
  tc.layer1 = build_sampler(parse_sampler_section(toml, "sparsify.layer1"), &b.grouping);
  tc.layer2 = build_sampler(parse_sampler_section(toml, "sparsify.layer2"), &b.grouping);

  InitConfig init_cfg = InitConfig::defaults(m);
  if (toml.has("train.sigma_w")) init_cfg.sigma_w = toml.require_double("train.sigma_w");
  if (toml.has("train.sigma_v")) init_cfg.sigma_v = toml.require_double("train.sigma_v");

  const LabeledSplit split = labeled_split(b.x.cols(), omega, detail::mix2(tc.seed, 0xDA7A));
  RngStream init_rng = RngStream(tc.seed).substream(100);
  ModelParams params = ModelParams::init(m, b.x.rows(), b.y.rows(), init_cfg, init_rng);

  TrainProblem problem;
  problem.x = &b.x;
  problem.a = &b.a;
  problem.a_star = &b.a_star;
  problem.y = &b.y;
  problem.omega = split.omega;
  problem.grouping = &b.grouping;

  const TrainLog log = train(problem, params, tc);

  const SparseMatrix* e1 = tc.eval_matrix == MatrixChoice::effective ? &b.a_star : &b.a;
  const EvalReport report = evaluate(params, b.x, *e1, *e1, split.test, b.y);

  write_text(out_prefix + ".log.csv", train_log_csv(log));
  save_checkpoint(out_prefix + ".ckpt", params);
  std::cout << "final_risk=" << format_double(log.rows.back().risk)
            << " test_l2_error=" << format_double(report.mean_l2_error)
            << " test_class_error=" << format_double(report.classification_error)
            << "\nwrote " << out_prefix << ".log.csv and " << out_prefix << ".ckpt\n";
  return 0;
}

int cmd_sweep(const std::string& cfg_path, const std::string& out_override,
              std::uint64_t seed_override, bool seed_given) {
  ExperimentConfig cfg = parse_experiment(TomlTable::parse_file(cfg_path));
  if (!out_override.empty()) cfg.output = out_override;
  if (seed_given) cfg.master_seed = seed_override;
  const SweepOutput out = run_sweep(cfg);
  write_text(cfg.output, out.results_csv);
  write_text(cfg.output + ".timing.csv", out.timing_csv);
  write_text(cfg.output + ".gnuplot", out.gnuplot_script);
  std::cout << "wrote " << cfg.output << " (+ .timing.csv, .gnuplot)\n";
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& dataset_dir,
             const std::string& matrix) {
  const ModelParams params = load_checkpoint(ckpt_path);
  const DatasetBundle b = load_bundle(dataset_dir);
  const SparseMatrix* e = matrix_choice(matrix) == MatrixChoice::effective ? &b.a_star : &b.a;
  std::vector<index_t> nodes(static_cast<std::size_t>(b.x.cols()));
  for (index_t i = 0; i < b.x.cols(); ++i) nodes[static_cast<std::size_t>(i)] = i;
  const EvalReport r = evaluate(params, b.x, *e, *e, nodes, b.y);
  std::cout << "mean_l2_error,classification_error,node_count\n"
            << format_double(r.mean_l2_error) << "," << format_double(r.classification_error)
            << "," << r.node_count << "\n";
  return 0;
}

int cmd_asymmetry(const std::vector<std::string>& csv_paths, double assert_ratio,
                  bool per_rep) {
  std::vector<CsvTable> tables;
  for (const std::string& path : csv_paths) tables.push_back(CsvTable::read_file(path));

  // pool all rows into one table
  CsvTable pooled = tables.front();
  for (std::size_t i = 1; i < tables.size(); ++i) {
    const CsvTable& t = tables[i];
    if (t.header() != pooled.header()) throw ConfigError("CSV headers differ between inputs");
    for (std::size_t r = 0; r < t.num_rows(); ++r) {
      std::vector<std::string> row;
      for (const std::string& col : t.header()) row.push_back(t.cell(r, col));
      pooled.append_row(std::move(row));
    }
  }

  double ratio;
  if (per_rep) {
    // median of per-replication ratios
    std::set<std::string> reps;
    for (std::size_t r = 0; r < pooled.num_rows(); ++r) reps.insert(pooled.cell(r, "rep"));
    std::vector<double> ratios;
    for (const std::string& rep : reps) {
      CsvTable sub;
      sub.set_header(pooled.header());
      for (std::size_t r = 0; r < pooled.num_rows(); ++r) {
        if (pooled.cell(r, "rep") != rep) continue;
        std::vector<std::string> row;
        for (const std::string& col : pooled.header()) row.push_back(pooled.cell(r, col));
        sub.append_row(std::move(row));
      }
      const AsymmetryFit fit = fit_asymmetry_slopes(sub);
      std::cout << "rep " << rep << ": slope1=" << format_double(fit.slope1)
                << " slope2=" << format_double(fit.slope2)
                << " ratio=" << format_double(fit.ratio) << "\n";
      ratios.push_back(fit.ratio);
    }
    std::sort(ratios.begin(), ratios.end());
    ratio = ratios[ratios.size() / 2];
    if (ratios.size() % 2 == 0) {
      ratio = 0.5 * (ratios[ratios.size() / 2 - 1] + ratios[ratios.size() / 2]);
    }
    std::cout << "median_ratio=" << format_double(ratio) << "\n";
  } else {
    const AsymmetryFit fit = fit_asymmetry_slopes(pooled);
    std::cout << "slope1=" << format_double(fit.slope1)
              << " slope2=" << format_double(fit.slope2)
              << " ratio=" << format_double(fit.ratio)
              << (fit.degenerate ? " (degenerate: both slopes are zero)" : "") << "\n";
    ratio = fit.ratio;
  }

  if (assert_ratio > 0.0) {
    if (std::isnan(ratio) || ratio < assert_ratio) {
      std::cerr << "asymmetry check failed: ratio " << format_double(ratio) << " < "
                << format_double(assert_ratio) << "\n";
      return 3;
    }
    std::cout << "asymmetry check passed: ratio >= " << format_double(assert_ratio) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"layer-wise sparsified jumping-connection GCN toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  bool seed_given = false;
  int threads = 0;
  std::string out;
  app.add_option("--seed", seed, "master seed")->each([&](const std::string&) {
    seed_given = true;
  });
  app.add_option("--threads", threads, "OpenMP thread count (0: library default)");
  app.add_option("--out", out, "output path / prefix");

  auto* synth = app.add_subcommand("synth-gen", "generate a synthetic dataset directory");
  std::string synth_spec, synth_outdir;
  synth->add_option("spec", synth_spec, "TOML spec with [graph] and [target]")->required();
  synth->add_option("outdir", synth_outdir, "output directory")->required();

  auto* sparsify = app.add_subcommand("sparsify", "apply a sparsifier to a matrix CSV");
  std::string sp_matrix, sp_cfg, sp_grouping, sp_report;
  int sp_draws = 0;
  sparsify->add_option("matrix", sp_matrix, "matrix CSV")->required();
  sparsify->add_option("config", sp_cfg, "TOML with a [sparsify] section")->required();
  sparsify->add_option("--grouping", sp_grouping, "grouping CSV (node,group)");
  sparsify->add_option("--draws", sp_draws, "emit a deviation report over this many draws");
  sparsify->add_option("--report", sp_report, "deviation report output CSV");

  auto* train_cmd = app.add_subcommand("train", "train on a dataset directory");
  std::string tr_dataset, tr_cfg;
  train_cmd->add_option("dataset", tr_dataset, "dataset directory")->required();
  train_cmd->add_option("config", tr_cfg, "TOML with [train] and [sparsify.*]")->required();

  auto* sweep = app.add_subcommand("sweep", "run an experiment sweep");
  std::string sw_cfg;
  sweep->add_option("config", sw_cfg, "experiment TOML")->required();

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  std::string ev_ckpt, ev_dataset, ev_matrix = "full";
  eval_cmd->add_option("checkpoint", ev_ckpt)->required();
  eval_cmd->add_option("dataset", ev_dataset)->required();
  eval_cmd->add_option("--matrix", ev_matrix, "full | effective");

  auto* asym = app.add_subcommand("asymmetry", "fit per-layer error-vs-deviation slopes");
  std::vector<std::string> as_csvs;
  double as_assert = 0.0;
  bool as_per_rep = false;
  asym->add_option("results", as_csvs, "sweep result CSVs")->required();
  asym->add_option("--assert-ratio", as_assert, "exit 3 unless ratio >= this");
  asym->add_flag("--per-rep", as_per_rep, "median of per-replication ratios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (threads > 0) omp_set_num_threads(threads);
    if (*synth) return cmd_synth_gen(synth_spec, synth_outdir, seed);
    if (*sparsify) return cmd_sparsify(sp_matrix, sp_cfg, sp_grouping, out, sp_report,
                                       sp_draws, seed);
    if (*train_cmd) return cmd_train(tr_dataset, tr_cfg, out.empty() ? "train_out" : out,
                                     seed, seed_given);
    if (*sweep) return cmd_sweep(sw_cfg, out, seed, seed_given);
    if (*eval_cmd) return cmd_eval(ev_ckpt, ev_dataset, ev_matrix);
    if (*asym) return cmd_asymmetry(as_csvs, as_assert, as_per_rep);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const MissingFile& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
