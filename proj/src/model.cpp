#include "lwsgcn/model.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "lwsgcn/kernels.hpp"

namespace lwsgcn {

namespace {

std::atomic<std::uint64_t> next_params_id{1};

void add_into(const Dense& a, const Dense& b, Dense& out) {
  if (!out.same_shape(a)) out = Dense(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = a.data()[i] + b.data()[i];
  }
}

}  // namespace

InitConfig InitConfig::defaults(index_t m) {
  InitConfig cfg;
  cfg.sigma_w = std::pow(static_cast<double>(m), -0.25);
  cfg.sigma_v = std::log(static_cast<double>(m));
  return cfg;
}

ModelParams ModelParams::init(index_t m, index_t d, index_t k,
                              const InitConfig& cfg, RngStream& rng) {
  if (m < 1 || d < 1 || k < 1) throw DimensionMismatch("model dims must be >= 1");
  if (cfg.sigma_w < 0.0 || cfg.sigma_v < 0.0) {
    throw ConfigError("init sigmas must be nonnegative");
  }
  ModelParams p;
  p.w_init_ = Dense(m, d);
  for (double& v : p.w_init_.data()) v = cfg.sigma_w * rng.next_gaussian();
  p.v_init_ = Dense(m, k);
  const double sv = cfg.sigma_v / std::sqrt(static_cast<double>(m));
  for (double& v : p.v_init_.data()) v = sv * rng.next_gaussian();
  p.c_ = Dense(k, m);
  const double sc = 1.0 / std::sqrt(static_cast<double>(m));
  for (double& v : p.c_.data()) v = sc * rng.next_gaussian();
  p.dev_w_ = Dense(m, d);
  p.dev_v_ = Dense(m, k);
  p.id_ = next_params_id.fetch_add(1);
  p.init_cfg_ = cfg;
  p.init_seed_ = rng.key();
  return p;
}

ModelParams::ModelParams(Dense w_init, Dense v_init, Dense c)
    : w_init_(std::move(w_init)), v_init_(std::move(v_init)), c_(std::move(c)) {
  if (w_init_.rows() != v_init_.rows() || c_.cols() != w_init_.rows() ||
      c_.rows() != v_init_.cols()) {
    throw DimensionMismatch("inconsistent parameter shapes");
  }
  dev_w_ = Dense(w_init_.rows(), w_init_.cols());
  dev_v_ = Dense(v_init_.rows(), v_init_.cols());
  id_ = next_params_id.fetch_add(1);
}

const Dense& ModelParams::w() const {
  if (!w_valid_) {
    add_into(w_init_, dev_w_, w_cache_);
    w_valid_ = true;
  }
  return w_cache_;
}

const Dense& ModelParams::v() const {
  if (!v_valid_) {
    add_into(v_init_, dev_v_, v_cache_);
    v_valid_ = true;
  }
  return v_cache_;
}

void ModelParams::step_w(double step, const Dense& g) {
  if (!g.same_shape(dev_w_)) throw DimensionMismatch("step_w: gradient shape");
  for (std::size_t i = 0; i < dev_w_.data().size(); ++i) {
    dev_w_.data()[i] -= step * g.data()[i];
  }
  w_valid_ = false;
  ++version_;
}

void ModelParams::step_v(double step, const Dense& g) {
  if (!g.same_shape(dev_v_)) throw DimensionMismatch("step_v: gradient shape");
  for (std::size_t i = 0; i < dev_v_.data().size(); ++i) {
    dev_v_.data()[i] -= step * g.data()[i];
  }
  v_valid_ = false;
  ++version_;
}

ForwardCache forward_node(const Dense& x, const SparseMatrix& a1,
                          const SparseMatrix& a2, const ModelParams& params,
                          index_t n) {
  const index_t big_n = x.cols();
  if (x.rows() != params.d()) throw DimensionMismatch("x is not d x N");
  if (a1.rows() != big_n || a1.cols() != big_n || a2.rows() != big_n ||
      a2.cols() != big_n) {
    throw DimensionMismatch("adjacency matrices must be N x N");
  }
  if (n < 0 || n >= big_n) throw NodeOutOfRange("node index outside [0, N)");

  const index_t m = params.m();
  const index_t k = params.k();

  ForwardCache cache;
  cache.node = n;
  cache.y1 = right_multiply(x, a1);
  cache.h1 = Dense(m, big_n);
  kernels::matmul_omp(params.w(), cache.y1, cache.h1);
  cache.z1 = cache.h1;
  kernels::relu_inplace(cache.z1);
  cache.o1 = Dense(k, big_n);
  kernels::matmul_omp(params.c(), cache.z1, cache.o1);

  const auto a2r = a2.col_rows(n);
  const auto a2v = a2.col_vals(n);
  cache.a2_rows.assign(a2r.begin(), a2r.end());
  cache.a2_vals.assign(a2v.begin(), a2v.end());

  cache.t2.assign(static_cast<std::size_t>(k), 0.0);
  for (std::size_t e = 0; e < cache.a2_rows.size(); ++e) {
    const double* col = cache.o1.col(cache.a2_rows[e]);
    for (index_t r = 0; r < k; ++r) {
      cache.t2[static_cast<std::size_t>(r)] += cache.a2_vals[e] * col[r];
    }
  }

  cache.u.assign(static_cast<std::size_t>(m), 0.0);
  kernels::matvec(params.v(), cache.t2, cache.u);

  cache.mask_w_n.resize(static_cast<std::size_t>(m));
  cache.mask_v_n.resize(static_cast<std::size_t>(m));
  const double* h1n = cache.h1.col(n);
  for (index_t r = 0; r < m; ++r) {
    cache.mask_w_n[static_cast<std::size_t>(r)] = kernels::relu_mask(h1n[r]) ? 1 : 0;
    cache.mask_v_n[static_cast<std::size_t>(r)] =
        kernels::relu_mask(cache.u[static_cast<std::size_t>(r)]) ? 1 : 0;
  }

  std::vector<double> relu_u(static_cast<std::size_t>(m));
  for (index_t r = 0; r < m; ++r) {
    relu_u[static_cast<std::size_t>(r)] = kernels::relu(cache.u[static_cast<std::size_t>(r)]);
  }
  cache.out.assign(static_cast<std::size_t>(k), 0.0);
  kernels::matvec(params.c(), relu_u, cache.out);
  const double* o1n = cache.o1.col(n);
  for (index_t r = 0; r < k; ++r) cache.out[static_cast<std::size_t>(r)] += o1n[r];

  cache.params_id = params.id();
  cache.params_version = params.version();

#ifndef NDEBUG
  {
    double norm2 = 0.0;
    for (double v : cache.out) norm2 += v * v;
    assert(std::sqrt(norm2) <= output_norm_bound(x, a1, a2, params, n) + 1e-9);
  }
#endif
  return cache;
}

Dense forward_all(const Dense& x, const SparseMatrix& a1, const SparseMatrix& a2,
                  const ModelParams& params) {
  const index_t big_n = x.cols();
  if (x.rows() != params.d()) throw DimensionMismatch("x is not d x N");
  if (a1.rows() != big_n || a1.cols() != big_n || a2.rows() != big_n ||
      a2.cols() != big_n) {
    throw DimensionMismatch("adjacency matrices must be N x N");
  }
  const index_t m = params.m();
  const index_t k = params.k();

  const Dense y1 = right_multiply(x, a1);
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

double loss_node(std::span<const double> out, std::span<const double> y) {
  if (out.size() != y.size()) throw DimensionMismatch("loss_node: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = y[i] - out[i];
    sum += r * r;
  }
  return 0.5 * sum;
}

Gradients backward_node(const ForwardCache& cache, std::span<const double> y,
                        const ModelParams& params) {
  if (cache.params_id != params.id() || cache.params_version != params.version()) {
    throw StaleCache("forward cache does not match current parameters");
  }
  const index_t m = params.m();
  const index_t d = params.d();
  const index_t k = params.k();
  if (static_cast<index_t>(y.size()) != k) {
    throw DimensionMismatch("label length mismatch");
  }

  // residual r = out - y
  std::vector<double> res(static_cast<std::size_t>(k));
  for (index_t i = 0; i < k; ++i) {
    res[static_cast<std::size_t>(i)] =
        cache.out[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
  }

  // g1 = C^T r
  std::vector<double> g1(static_cast<std::size_t>(m));
  kernels::matvec_transposed(params.c(), res, g1);

  Gradients grads{Dense(m, d), Dense(m, k)};

  // Jumping branch: grad_W += (mask_w_n .* g1) (X a1_n)^T
  const double* y1n = cache.y1.col(cache.node);
  for (index_t j = 0; j < d; ++j) {
    double* gc = grads.w.col(j);
    const double xj = y1n[j];
    for (index_t r = 0; r < m; ++r) {
      if (cache.mask_w_n[static_cast<std::size_t>(r)]) {
        gc[r] += g1[static_cast<std::size_t>(r)] * xj;
      }
    }
  }

  // gu = mask_v_n .* g1
  std::vector<double> gu(static_cast<std::size_t>(m));
  for (index_t r = 0; r < m; ++r) {
    gu[static_cast<std::size_t>(r)] =
        cache.mask_v_n[static_cast<std::size_t>(r)] ? g1[static_cast<std::size_t>(r)] : 0.0;
  }

  // grad_V = gu t2^T
  for (index_t j = 0; j < k; ++j) {
    double* gc = grads.v.col(j);
    const double tj = cache.t2[static_cast<std::size_t>(j)];
    for (index_t r = 0; r < m; ++r) gc[r] += gu[static_cast<std::size_t>(r)] * tj;
  }

  // q = C^T (V^T gu): composite-path signal arriving at each neighbor's
  // first-layer activation.
  std::vector<double> vtgu(static_cast<std::size_t>(k));
  kernels::matvec_transposed(params.v(), gu, vtgu);
  std::vector<double> q(static_cast<std::size_t>(m));
  kernels::matvec_transposed(params.c(), vtgu, q);

  // grad_W += sum_i a2_{n,i} (mask_w_i .* q) (X a1_i)^T
  for (std::size_t e = 0; e < cache.a2_rows.size(); ++e) {
    const index_t i = cache.a2_rows[e];
    const double coeff = cache.a2_vals[e];
    const double* h1i = cache.h1.col(i);
    const double* y1i = cache.y1.col(i);
    for (index_t j = 0; j < d; ++j) {
      double* gc = grads.w.col(j);
      const double s = coeff * y1i[j];
      for (index_t r = 0; r < m; ++r) {
        if (kernels::relu_mask(h1i[r])) gc[r] += s * q[static_cast<std::size_t>(r)];
      }
    }
  }
  return grads;
}

double empirical_risk(const ModelParams& params, const Dense& x,
                      const SparseMatrix& a1, const SparseMatrix& a2,
                      const std::vector<index_t>& labeled, const Dense& y) {
  if (labeled.empty()) throw EmptyLabelSet("empirical risk over an empty label set");
  const Dense out = forward_all(x, a1, a2, params);
  std::vector<double> losses(labeled.size());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    losses[i] = loss_node(out.col_span(labeled[i]), y.col_span(labeled[i]));
  }
  return kernels::pairwise_sum(losses) / static_cast<double>(labeled.size());
}

double output_norm_bound(const Dense& x, const SparseMatrix& a1,
                         const SparseMatrix& a2, const ModelParams& params,
                         index_t n) {
  double x_col_max = 0.0;
  for (index_t j = 0; j < x.cols(); ++j) {
    double s = 0.0;
    for (double v : x.col_span(j)) s += v * v;
    x_col_max = std::max(x_col_max, std::sqrt(s));
  }
  auto col_l1 = [](const SparseMatrix& a, index_t j) {
    double s = 0.0;
    for (double v : a.col_vals(j)) s += std::abs(v);
    return s;
  };
  const double cw = kernels::frobenius_norm(params.c()) * kernels::frobenius_norm(params.w());
  // ||relu(W X a)|| <= ||W|| ||X a|| and ||X a|| <= max_col ||x|| * ||a||_1.
  const double branch1 = cw * x_col_max * col_l1(a1, n);
  const double o1_col_bound = cw * x_col_max * matrix_l1_norm(a1);
  const double branch2 = kernels::frobenius_norm(params.c()) *
                         kernels::frobenius_norm(params.v()) * o1_col_bound *
                         col_l1(a2, n);
  return branch1 + branch2;
}

void save_checkpoint(const std::string& path, const ModelParams& params) {
  nlohmann::json header;
  header["m"] = params.m();
  header["d"] = params.d();
  header["k"] = params.k();
  header["sigma_w"] = params.init_config().sigma_w;
  header["sigma_v"] = params.init_config().sigma_v;
  header["seed"] = params.init_seed();
  header["format"] = "f64le-colmajor";
  header["arrays"] = {"w", "v", "c", "w_init", "v_init"};

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open checkpoint for writing: " + path);
  f << header.dump() << '\n';
  auto dump = [&f](const Dense& mat) {
    f.write(reinterpret_cast<const char*>(mat.data().data()),
            static_cast<std::streamsize>(mat.data().size() * sizeof(double)));
  };
  dump(params.w());
  dump(params.v());
  dump(params.c());
  dump(params.w_init());
  dump(params.v_init());
  if (!f) throw Error("checkpoint write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingFile("checkpoint not found: " + path);
  std::string line;
  std::getline(f, line);
  nlohmann::json header = nlohmann::json::parse(line);
  const index_t m = header.at("m").get<index_t>();
  const index_t d = header.at("d").get<index_t>();
  const index_t k = header.at("k").get<index_t>();

  auto read = [&f, &path](index_t rows, index_t cols) {
    Dense mat(rows, cols);
    f.read(reinterpret_cast<char*>(mat.data().data()),
           static_cast<std::streamsize>(mat.data().size() * sizeof(double)));
    if (!f) throw Error("checkpoint truncated: " + path);
    return mat;
  };
  Dense w = read(m, d);
  Dense v = read(m, k);
  Dense c = read(k, m);
  Dense w_init = read(m, d);
  Dense v_init = read(m, k);

  ModelParams p(std::move(w_init), std::move(v_init), std::move(c));
  // Deviations are reconstructed; the loaded weights themselves are kept
  // verbatim in the caches so that w()/v() round-trip bit-exactly.
  for (std::size_t i = 0; i < p.dev_w_.data().size(); ++i) {
    p.dev_w_.data()[i] = w.data()[i] - p.w_init_.data()[i];
  }
  for (std::size_t i = 0; i < p.dev_v_.data().size(); ++i) {
    p.dev_v_.data()[i] = v.data()[i] - p.v_init_.data()[i];
  }
  p.w_cache_ = std::move(w);
  p.v_cache_ = std::move(v);
  p.w_valid_ = true;
  p.v_valid_ = true;
  p.init_cfg_.sigma_w = header.at("sigma_w").get<double>();
  p.init_cfg_.sigma_v = header.at("sigma_v").get<double>();
  p.init_seed_ = header.at("seed").get<std::uint64_t>();
  return p;
}

}  // namespace lwsgcn
