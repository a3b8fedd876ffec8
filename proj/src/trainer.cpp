#include "lwsgcn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "lwsgcn/kernels.hpp"

namespace lwsgcn {

namespace {

constexpr std::uint64_t kLayer1Salt = 0;
constexpr std::uint64_t kLayer2Salt = 1;
constexpr std::uint64_t kNodeSalt = 2;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// o1 = C relu(h): same op sequence as the batched matmul over a stored
// relu'd column (zeros are skipped in both).
void matvec_relu(const Dense& c, const double* h, std::span<double> o1) {
  const index_t k = c.rows();
  for (index_t r = 0; r < k; ++r) o1[static_cast<std::size_t>(r)] = 0.0;
  for (index_t p = 0; p < c.cols(); ++p) {
    const double v = kernels::relu(h[p]);
    if (v == 0.0) continue;
    const double* cc = c.col(p);
    for (index_t r = 0; r < k; ++r) o1[static_cast<std::size_t>(r)] += v * cc[r];
  }
}

// Forward over all nodes with X A1 precomputed; bitwise identical to
// forward_all on the same matrices.
Dense forward_all_prey1(const Dense& y1, const SparseMatrix& a2,
                        const ModelParams& params) {
  const index_t big_n = y1.cols();
  const index_t m = params.m();
  const index_t k = params.k();
  Dense h1(m, big_n);
  kernels::matmul_omp(params.w(), y1, h1);
  kernels::relu_inplace(h1);
  Dense o1(k, big_n);
  kernels::matmul_omp(params.c(), h1, o1);
  const Dense t2 = right_multiply(o1, a2);
  Dense u(m, big_n);
  kernels::matmul_omp(params.v(), t2, u);
  kernels::relu_inplace(u);
  Dense out(k, big_n);
  kernels::matmul_omp(params.c(), u, out);
  for (index_t j = 0; j < big_n; ++j) {
    double* oc = out.col(j);
    const double* o1c = o1.col(j);
    for (index_t r = 0; r < k; ++r) oc[r] += o1c[r];
  }
  return out;
}

double risk_prey1(const Dense& y1, const SparseMatrix& a2, const ModelParams& params,
                  const std::vector<index_t>& omega, const Dense& y) {
  const Dense out = forward_all_prey1(y1, a2, params);
  std::vector<double> losses(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    losses[i] = loss_node(out.col_span(omega[i]), y.col_span(omega[i]));
  }
  return kernels::pairwise_sum(losses) / static_cast<double>(omega.size());
}

/// Scratch buffers for the fused single-node SGD step; reused across
/// iterations to keep the hot loop allocation-free.
struct FusedScratch {
  std::vector<index_t> a2_rows;
  std::vector<double> a2_vals;
  std::vector<index_t> a2_slot;

  std::vector<index_t> cols;  // needed layer-1 columns, sorted unique
  std::vector<index_t> entry_offset;
  std::vector<index_t> entry_rows;
  std::vector<double> entry_vals;

  std::vector<double> y;   // d per slot, packed
  std::vector<double> h;   // m per slot, packed
  std::vector<double> o1;  // k per slot, packed

  std::vector<double> t2, u, relu_u, out, res, g1, gu, vtgu, q;
  std::vector<index_t> scratch_rows;
  std::vector<double> scratch_vals;

  Dense grad_w, grad_v;
};

/// One stochastic-gradient evaluation at node n. Only the layer-1 columns
/// referenced by the sampled a2 column (plus n itself) are sampled and
/// touched; the result matches forward_node + backward_node on the fully
/// materialized matrices bit for bit. Gradients accumulate into
/// scratch.grad_w / grad_v. Returns the node loss.
///
/// y1_fixed, when non-null, holds X * A1 for a deterministic layer-1 plan
/// so the per-column feature gathers can be skipped.
double fused_node_gradient(const Dense& x, const LayerSamplerPlan& plan1,
                           const LayerSamplerPlan& plan2, const RngStream& s1,
                           const RngStream& s2, const ModelParams& params,
                           index_t n, std::span<const double> yn,
                           const Dense* y1_fixed, FusedScratch& sc) {
  const index_t m = params.m();
  const index_t d = params.d();
  const index_t k = params.k();
  const Dense& w = params.w();
  const Dense& v = params.v();
  const Dense& c = params.c();

  plan2.sample_column(n, s2, sc.a2_rows, sc.a2_vals);

  // Needed layer-1 columns: the sampled a2 column's rows plus n.
  sc.cols.assign(sc.a2_rows.begin(), sc.a2_rows.end());
  {
    auto it = std::lower_bound(sc.cols.begin(), sc.cols.end(), n);
    if (it == sc.cols.end() || *it != n) sc.cols.insert(it, n);
  }
  const std::size_t slots = sc.cols.size();
  auto slot_of = [&](index_t col) {
    return static_cast<std::size_t>(
        std::lower_bound(sc.cols.begin(), sc.cols.end(), col) - sc.cols.begin());
  };
  sc.a2_slot.resize(sc.a2_rows.size());
  for (std::size_t e = 0; e < sc.a2_rows.size(); ++e) {
    sc.a2_slot[e] = static_cast<index_t>(slot_of(sc.a2_rows[e]));
  }
  const std::size_t slot_n = slot_of(n);

  // Phase A: sample the needed layer-1 columns (serial; rng only).
  const bool gather = y1_fixed == nullptr;
  if (gather) {
    sc.entry_offset.assign(slots + 1, 0);
    sc.entry_rows.clear();
    sc.entry_vals.clear();
    for (std::size_t s = 0; s < slots; ++s) {
      plan1.sample_column(sc.cols[s], s1, sc.scratch_rows, sc.scratch_vals);
      sc.entry_rows.insert(sc.entry_rows.end(), sc.scratch_rows.begin(),
                           sc.scratch_rows.end());
      sc.entry_vals.insert(sc.entry_vals.end(), sc.scratch_vals.begin(),
                           sc.scratch_vals.end());
      sc.entry_offset[s + 1] = static_cast<index_t>(sc.entry_rows.size());
    }
  }

  // Phase B: per-column feature gather, first-layer activations, o1.
  sc.y.resize(slots * static_cast<std::size_t>(d));
  sc.h.resize(slots * static_cast<std::size_t>(m));
  sc.o1.resize(slots * static_cast<std::size_t>(k));
  const auto num_slots = static_cast<index_t>(slots);
#pragma omp parallel for schedule(static)
  for (index_t s = 0; s < num_slots; ++s) {
    std::span<double> ys(sc.y.data() + static_cast<std::size_t>(s) * d,
                         static_cast<std::size_t>(d));
    if (gather) {
      const auto b = static_cast<std::size_t>(sc.entry_offset[static_cast<std::size_t>(s)]);
      const auto e = static_cast<std::size_t>(sc.entry_offset[static_cast<std::size_t>(s) + 1]);
      kernels::gather_columns(
          x, std::span<const index_t>(sc.entry_rows.data() + b, e - b),
          std::span<const double>(sc.entry_vals.data() + b, e - b), ys);
    } else {
      const double* src = y1_fixed->col(sc.cols[static_cast<std::size_t>(s)]);
      std::copy(src, src + d, ys.begin());
    }
    std::span<double> hs(sc.h.data() + static_cast<std::size_t>(s) * m,
                         static_cast<std::size_t>(m));
    kernels::matvec(w, ys, hs);
    matvec_relu(c, hs.data(),
                std::span<double>(sc.o1.data() + static_cast<std::size_t>(s) * k,
                                  static_cast<std::size_t>(k)));
  }

  // Second layer: t2 = o1 a2_n, u = V t2, out = o1_n + C relu(u).
  sc.t2.assign(static_cast<std::size_t>(k), 0.0);
  for (std::size_t e = 0; e < sc.a2_rows.size(); ++e) {
    const double* o1c = sc.o1.data() + static_cast<std::size_t>(sc.a2_slot[e]) * k;
    const double coeff = sc.a2_vals[e];
    for (index_t r = 0; r < k; ++r) sc.t2[static_cast<std::size_t>(r)] += coeff * o1c[r];
  }
  sc.u.assign(static_cast<std::size_t>(m), 0.0);
  kernels::matvec(v, sc.t2, sc.u);
  sc.relu_u.resize(static_cast<std::size_t>(m));
  for (index_t r = 0; r < m; ++r) {
    sc.relu_u[static_cast<std::size_t>(r)] = kernels::relu(sc.u[static_cast<std::size_t>(r)]);
  }
  sc.out.assign(static_cast<std::size_t>(k), 0.0);
  kernels::matvec(c, sc.relu_u, sc.out);
  const double* o1n = sc.o1.data() + slot_n * static_cast<std::size_t>(k);
  for (index_t r = 0; r < k; ++r) sc.out[static_cast<std::size_t>(r)] += o1n[r];

  const double loss = loss_node(sc.out, yn);

  // Backward, same accumulation order as backward_node.
  sc.res.resize(static_cast<std::size_t>(k));
  for (index_t i = 0; i < k; ++i) {
    sc.res[static_cast<std::size_t>(i)] =
        sc.out[static_cast<std::size_t>(i)] - yn[static_cast<std::size_t>(i)];
  }
  sc.g1.resize(static_cast<std::size_t>(m));
  kernels::matvec_transposed(c, sc.res, sc.g1);

  const double* hn = sc.h.data() + slot_n * static_cast<std::size_t>(m);
  const double* yn1 = sc.y.data() + slot_n * static_cast<std::size_t>(d);
  for (index_t j = 0; j < d; ++j) {
    double* gc = sc.grad_w.col(j);
    const double xj = yn1[j];
    for (index_t r = 0; r < m; ++r) {
      if (kernels::relu_mask(hn[r])) gc[r] += sc.g1[static_cast<std::size_t>(r)] * xj;
    }
  }

  sc.gu.resize(static_cast<std::size_t>(m));
  for (index_t r = 0; r < m; ++r) {
    sc.gu[static_cast<std::size_t>(r)] =
        kernels::relu_mask(sc.u[static_cast<std::size_t>(r)])
            ? sc.g1[static_cast<std::size_t>(r)]
            : 0.0;
  }
  for (index_t j = 0; j < k; ++j) {
    double* gc = sc.grad_v.col(j);
    const double tj = sc.t2[static_cast<std::size_t>(j)];
    for (index_t r = 0; r < m; ++r) gc[r] += sc.gu[static_cast<std::size_t>(r)] * tj;
  }

  sc.vtgu.resize(static_cast<std::size_t>(k));
  kernels::matvec_transposed(v, sc.gu, sc.vtgu);
  sc.q.resize(static_cast<std::size_t>(m));
  kernels::matvec_transposed(c, sc.vtgu, sc.q);

  for (std::size_t e = 0; e < sc.a2_rows.size(); ++e) {
    const std::size_t slot = static_cast<std::size_t>(sc.a2_slot[e]);
    const double coeff = sc.a2_vals[e];
    const double* hi = sc.h.data() + slot * static_cast<std::size_t>(m);
    const double* yi = sc.y.data() + slot * static_cast<std::size_t>(d);
    for (index_t j = 0; j < d; ++j) {
      double* gc = sc.grad_w.col(j);
      const double sj = coeff * yi[j];
      for (index_t r = 0; r < m; ++r) {
        if (kernels::relu_mask(hi[r])) gc[r] += sj * sc.q[static_cast<std::size_t>(r)];
      }
    }
  }
  return loss;
}

}  // namespace

void TrainConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (eta_w < 0.0 || eta_v < 0.0) throw ConfigError("step sizes must be >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (log_every < 0) throw ConfigError("log_every must be >= 0");
}

double TrainLog::mean_dev1() const {
  double sum = 0.0;
  std::int64_t count = 0;
  for (const TrainLogRow& r : rows) {
    if (!std::isnan(r.dev1_l1)) {
      sum += r.dev1_l1;
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : nan_value();
}

double TrainLog::mean_dev2() const {
  double sum = 0.0;
  std::int64_t count = 0;
  for (const TrainLogRow& r : rows) {
    if (!std::isnan(r.dev2_l1)) {
      sum += r.dev2_l1;
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : nan_value();
}

index_t sample_labeled_node(const std::vector<index_t>& omega, RngStream& rng) {
  if (omega.empty()) throw EmptyLabelSet("cannot sample from an empty label set");
  return omega[rng.next_below(omega.size())];
}

TrainLog train(const TrainProblem& pb, ModelParams& params, const TrainConfig& cfg) {
  cfg.validate();
  if (pb.x == nullptr || pb.a == nullptr || pb.y == nullptr) {
    throw Error("train: problem is missing x, a, or y");
  }
  if (pb.omega.empty()) throw EmptyLabelSet("train: empty labeled set");
  const index_t big_n = pb.x->cols();
  if (pb.a->rows() != big_n || pb.a->cols() != big_n || pb.y->cols() != big_n) {
    throw DimensionMismatch("train: inconsistent dataset dimensions");
  }
  for (index_t node : pb.omega) {
    if (node < 0 || node >= big_n) throw NodeOutOfRange("train: labeled node out of range");
  }
  if (cfg.base_matrix == MatrixChoice::sampled) {
    throw ConfigError("base_matrix must be full or effective");
  }
  if ((cfg.base_matrix == MatrixChoice::effective ||
       cfg.eval_matrix == MatrixChoice::effective) &&
      pb.a_star == nullptr) {
    throw ConfigError("effective matrix requested but A* was not supplied");
  }

  const SparseMatrix& base =
      cfg.base_matrix == MatrixChoice::effective ? *pb.a_star : *pb.a;

  LayerSamplerPlan plan1 = LayerSamplerPlan::make(base, cfg.layer1, pb.grouping);
  LayerSamplerPlan plan2 = LayerSamplerPlan::make(base, cfg.layer2, pb.grouping);

  const RngStream root(cfg.seed);
  const RngStream layer1_root = root.substream(kLayer1Salt);
  const RngStream layer2_root = root.substream(kLayer2Salt);
  RngStream node_rng = root.substream(kNodeSalt);

  // A sampler frozen across iterations is drawn once from the iteration-0
  // stream and behaves like a fixed matrix afterwards.
  SparseMatrix frozen1, frozen2;
  bool use_frozen1 = false, use_frozen2 = false;
  if (plan1.stochastic() && !cfg.resample_every_iteration) {
    frozen1 = plan1.sample_matrix(layer1_root.substream(0));
    plan1 = LayerSamplerPlan::make(frozen1, SamplerConfig{}, nullptr);
    use_frozen1 = true;
  }
  if (plan2.stochastic() && !cfg.resample_every_iteration) {
    frozen2 = plan2.sample_matrix(layer2_root.substream(0));
    plan2 = LayerSamplerPlan::make(frozen2, SamplerConfig{}, nullptr);
    use_frozen2 = true;
  }
  (void)use_frozen1;
  (void)use_frozen2;

  // A deterministic layer-1 plan has fixed X A1 columns; precompute them.
  Dense y1_fixed;
  const Dense* y1_fixed_ptr = nullptr;
  if (!plan1.stochastic()) {
    y1_fixed = right_multiply(*pb.x, plan1.fixed_matrix());
    y1_fixed_ptr = &y1_fixed;
  }

  // Evaluation adjacency for the risk column of the log.
  const SparseMatrix* eval1 = pb.a;
  const SparseMatrix* eval2 = pb.a;
  if (cfg.eval_matrix == MatrixChoice::effective) {
    eval1 = pb.a_star;
    eval2 = pb.a_star;
  }
  Dense y1_eval;
  if (cfg.eval_matrix != MatrixChoice::sampled) {
    y1_eval = right_multiply(*pb.x, *eval1);
  }

  // Fixed-plan deviations are constant; compute them once.
  double fixed_dev1 = nan_value(), fixed_dev2 = nan_value();
  if (pb.a_star != nullptr) {
    if (!plan1.stochastic()) fixed_dev1 = deviation_l1(plan1.fixed_matrix(), *pb.a_star);
    if (!plan2.stochastic()) fixed_dev2 = deviation_l1(plan2.fixed_matrix(), *pb.a_star);
  }

  FusedScratch sc;
  sc.grad_w = Dense(params.m(), params.d());
  sc.grad_v = Dense(params.m(), params.k());

#ifndef NDEBUG
  Dense tracker_w(params.m(), params.d());
  Dense tracker_v(params.m(), params.k());
#endif

  bool warned_tau_w = false, warned_tau_v = false;
  TrainLog log;
  const std::int64_t stride = cfg.log_every;

  auto risk_now = [&](std::int64_t t) {
    if (cfg.eval_matrix == MatrixChoice::sampled) {
      const RngStream s1 = layer1_root.substream(static_cast<std::uint64_t>(t));
      const RngStream s2 = layer2_root.substream(static_cast<std::uint64_t>(t));
      const SparseMatrix e1 = plan1.sample_matrix(s1);
      const SparseMatrix e2 = plan2.sample_matrix(s2);
      const Dense y1 = right_multiply(*pb.x, e1);
      return risk_prey1(y1, e2, params, pb.omega, *pb.y);
    }
    return risk_prey1(y1_eval, *eval2, params, pb.omega, *pb.y);
  };

  for (std::int64_t t = 0; t < cfg.iterations; ++t) {
    const RngStream s1 = layer1_root.substream(static_cast<std::uint64_t>(t));
    const RngStream s2 = layer2_root.substream(static_cast<std::uint64_t>(t));

    sc.grad_w.fill(0.0);
    sc.grad_v.fill(0.0);
    double loss_sum = 0.0;
    for (std::int64_t b = 0; b < cfg.batch_size; ++b) {
      const index_t node = sample_labeled_node(pb.omega, node_rng);
      loss_sum += fused_node_gradient(*pb.x, plan1, plan2, s1, s2, params, node,
                                      pb.y->col_span(node), y1_fixed_ptr, sc);
    }
    const double node_loss = loss_sum / static_cast<double>(cfg.batch_size);
    if (!std::isfinite(node_loss)) {
      throw NonFiniteLoss("non-finite loss at iteration " + std::to_string(t), t);
    }

    const bool log_now = stride > 0 ? (t % stride == 0) : (t == 0);
    if (log_now) {
      TrainLogRow row;
      row.iteration = t;
      row.risk = risk_now(t);
      row.node_loss = node_loss;
      row.w_dev_fro = kernels::frobenius_norm(params.deviation_w());
      row.v_dev_fro = kernels::frobenius_norm(params.deviation_v());
      row.dev1_l1 = fixed_dev1;
      row.dev2_l1 = fixed_dev2;
      if (pb.a_star != nullptr) {
        if (plan1.stochastic()) row.dev1_l1 = deviation_l1(plan1.sample_matrix(s1), *pb.a_star);
        if (plan2.stochastic()) row.dev2_l1 = deviation_l1(plan2.sample_matrix(s2), *pb.a_star);
      }
      log.rows.push_back(row);

      if (cfg.tau_w_cap && !warned_tau_w && row.w_dev_fro > *cfg.tau_w_cap) {
        std::cerr << "monitor: ||W_t||_F = " << row.w_dev_fro
                  << " crossed tau_w at iteration " << t << "\n";
        warned_tau_w = true;
      }
      if (cfg.tau_v_cap && !warned_tau_v && row.v_dev_fro > *cfg.tau_v_cap) {
        std::cerr << "monitor: ||V_t||_F = " << row.v_dev_fro
                  << " crossed tau_v at iteration " << t << "\n";
        warned_tau_v = true;
      }
#ifndef NDEBUG
      for (std::size_t i = 0; i < tracker_w.data().size(); ++i) {
        assert(tracker_w.data()[i] == params.deviation_w().data()[i]);
      }
      for (std::size_t i = 0; i < tracker_v.data().size(); ++i) {
        assert(tracker_v.data()[i] == params.deviation_v().data()[i]);
      }
#endif
    }

    const double scale = 1.0 / static_cast<double>(cfg.batch_size);
    params.step_w(cfg.eta_w * scale, sc.grad_w);
    params.step_v(cfg.eta_v * scale, sc.grad_v);
#ifndef NDEBUG
    for (std::size_t i = 0; i < tracker_w.data().size(); ++i) {
      tracker_w.data()[i] -= (cfg.eta_w * scale) * sc.grad_w.data()[i];
    }
    for (std::size_t i = 0; i < tracker_v.data().size(); ++i) {
      tracker_v.data()[i] -= (cfg.eta_v * scale) * sc.grad_v.data()[i];
    }
#endif
  }

  TrainLogRow final_row;
  final_row.iteration = cfg.iterations;
  final_row.risk = risk_now(cfg.iterations);
  final_row.node_loss = nan_value();
  final_row.w_dev_fro = kernels::frobenius_norm(params.deviation_w());
  final_row.v_dev_fro = kernels::frobenius_norm(params.deviation_v());
  final_row.dev1_l1 = nan_value();
  final_row.dev2_l1 = nan_value();
  log.rows.push_back(final_row);
  return log;
}

}  // namespace lwsgcn
