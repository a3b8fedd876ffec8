#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lwsgcn/dense.hpp"
#include "lwsgcn/rng.hpp"
#include "lwsgcn/sparse.hpp"

namespace lwsgcn {

struct InitConfig {
  double sigma_w = 0.0;
  double sigma_v = 0.0;

  /// Defaults: sigma_w = m^{-1/4}, sigma_v = ln(m).
  static InitConfig defaults(index_t m);
};

/// Two-hidden-layer jumping-connection GCN in reparameterized form:
///
///   out_n = C relu(W X a1_n) + C relu(V C relu(W X A1) a2_n)
///
/// W (m x d) and V (m x k) train; C (k x m) stays at its initialization.
/// Weight deviations from initialization are the primary trained state;
/// the current weights are materialized as init + deviation on demand.
class ModelParams {
 public:
  static ModelParams init(index_t m, index_t d, index_t k, const InitConfig& cfg,
                          RngStream& rng);

  /// Construct with given initial weights and zero deviations (tests).
  ModelParams(Dense w_init, Dense v_init, Dense c);

  index_t m() const { return w_init_.rows(); }
  index_t d() const { return w_init_.cols(); }
  index_t k() const { return c_.rows(); }

  const Dense& w() const;
  const Dense& v() const;
  const Dense& c() const { return c_; }
  const Dense& w_init() const { return w_init_; }
  const Dense& v_init() const { return v_init_; }
  const Dense& deviation_w() const { return dev_w_; }
  const Dense& deviation_v() const { return dev_v_; }

  /// In-place deviation update: dev_w -= step * g. Invalidates caches.
  void step_w(double step, const Dense& g);
  void step_v(double step, const Dense& g);

  std::uint64_t id() const { return id_; }
  std::uint64_t version() const { return version_; }

  InitConfig init_config() const { return init_cfg_; }
  std::uint64_t init_seed() const { return init_seed_; }

  friend ModelParams load_checkpoint(const std::string& path);

 private:
  ModelParams() = default;

  Dense w_init_, v_init_, c_;
  Dense dev_w_, dev_v_;
  mutable Dense w_cache_, v_cache_;
  mutable bool w_valid_ = false, v_valid_ = false;
  std::uint64_t id_ = 0;
  std::uint64_t version_ = 0;
  InitConfig init_cfg_{};
  std::uint64_t init_seed_ = 0;
};

/// Everything backward needs from one node's forward pass.
struct ForwardCache {
  index_t node = -1;
  Dense y1;                         // d x N  = X A1
  Dense h1;                         // m x N  = W X A1 (pre-activation)
  Dense z1;                         // m x N  = relu(h1)
  Dense o1;                         // k x N  = C z1
  std::vector<index_t> a2_rows;     // column n of A2
  std::vector<double> a2_vals;
  std::vector<double> t2;           // k      = o1 a2_n
  std::vector<double> u;            // m      = V t2 (pre-activation)
  std::vector<std::uint8_t> mask_w_n;  // 1{W X a1_n >= 0}
  std::vector<std::uint8_t> mask_v_n;  // 1{u >= 0}
  std::vector<double> out;          // k
  std::uint64_t params_id = 0;
  std::uint64_t params_version = 0;
};

struct Gradients {
  Dense w;  // m x d
  Dense v;  // m x k
};

ForwardCache forward_node(const Dense& x, const SparseMatrix& a1,
                          const SparseMatrix& a2, const ModelParams& params,
                          index_t n);

Dense forward_all(const Dense& x, const SparseMatrix& a1, const SparseMatrix& a2,
                  const ModelParams& params);

double loss_node(std::span<const double> out, std::span<const double> y);

Gradients backward_node(const ForwardCache& cache, std::span<const double> y,
                        const ModelParams& params);

double empirical_risk(const ModelParams& params, const Dense& x,
                      const SparseMatrix& a1, const SparseMatrix& a2,
                      const std::vector<index_t>& labeled, const Dense& y);

/// Upper bound on ||out_n|| from norm products (the inequality asserted in
/// debug builds after every forward_node call).
double output_norm_bound(const Dense& x, const SparseMatrix& a1,
                         const SparseMatrix& a2, const ModelParams& params,
                         index_t n);

void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace lwsgcn
