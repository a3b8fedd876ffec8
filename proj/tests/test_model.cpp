#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lwsgcn/graph.hpp"
#include "lwsgcn/model.hpp"
#include "lwsgcn/synthgen.hpp"
#include "oracles.hpp"

using namespace lwsgcn;

namespace {

struct Instance {
  Dense x;
  SparseMatrix a1, a2;
  Dense w, v, c;
  std::vector<double> y;
  index_t node;
};

SparseMatrix random_adjacency(index_t n, double density, RngStream& rng) {
  std::vector<Edge> edges;
  for (index_t u = 0; u < n; ++u) {
    for (index_t v = u + 1; v < n; ++v) {
      if (rng.next_uniform() < density) edges.push_back({u, v});
    }
  }
  return build_normalized_adjacency(Graph(n, edges));
}

Dense gaussian(index_t rows, index_t cols, double scale, RngStream& rng) {
  Dense m(rows, cols);
  for (double& v : m.data()) v = scale * rng.next_gaussian();
  return m;
}

Instance random_instance(RngStream& rng, index_t n, index_t d, index_t m, index_t k) {
  Instance inst;
  inst.x = generate_features(n, d, rng);
  inst.a1 = random_adjacency(n, 0.3, rng);
  inst.a2 = random_adjacency(n, 0.3, rng);
  inst.w = gaussian(m, d, 1.0, rng);
  inst.v = gaussian(m, k, 0.7, rng);
  inst.c = gaussian(k, m, 1.0 / std::sqrt(static_cast<double>(m)), rng);
  inst.y.resize(static_cast<std::size_t>(k));
  for (double& v : inst.y) v = rng.next_gaussian();
  inst.node = static_cast<index_t>(rng.next_below(static_cast<std::uint64_t>(n)));
  return inst;
}

/// Smallest |pre-activation| across the cache (distance from ReLU kinks).
double kink_clearance(const ForwardCache& cache) {
  double lo = std::numeric_limits<double>::infinity();
  for (double v : cache.h1.data()) lo = std::min(lo, std::abs(v));
  for (double v : cache.u) lo = std::min(lo, std::abs(v));
  return lo;
}

Instance clear_instance(RngStream& rng, index_t n, index_t d, index_t m, index_t k) {
  while (true) {
    Instance inst = random_instance(rng, n, d, m, k);
    const ModelParams params(inst.w, inst.v, inst.c);
    const ForwardCache cache = forward_node(inst.x, inst.a1, inst.a2, params, inst.node);
    if (kink_clearance(cache) >= 1e-3) return inst;
  }
}

double loss_of(const Instance& inst, const Dense& w, const Dense& v) {
  const ModelParams params(w, v, inst.c);
  const ForwardCache cache = forward_node(inst.x, inst.a1, inst.a2, params, inst.node);
  return loss_node(cache.out, inst.y);
}

struct GradCheckResult {
  double max_rel = 0.0;
};

GradCheckResult finite_difference_check(const Instance& inst, double step) {
  const ModelParams params(inst.w, inst.v, inst.c);
  const ForwardCache cache = forward_node(inst.x, inst.a1, inst.a2, params, inst.node);
  const Gradients grads = backward_node(cache, inst.y, params);

  Dense w = inst.w, v = inst.v;
  std::vector<double> an, fd;
  for (double& slot : w.data()) {
    fd.push_back(oracle::central_diff([&] { return loss_of(inst, w, v); }, slot, step));
  }
  for (double g : grads.w.data()) an.push_back(g);
  for (double& slot : v.data()) {
    fd.push_back(oracle::central_diff([&] { return loss_of(inst, w, v); }, slot, step));
  }
  for (double g : grads.v.data()) an.push_back(g);
  REQUIRE(an.size() == fd.size());

  double gmax = 1e-8;
  for (std::size_t i = 0; i < an.size(); ++i) {
    gmax = std::max({gmax, std::abs(an[i]), std::abs(fd[i])});
  }
  GradCheckResult result;
  for (std::size_t i = 0; i < an.size(); ++i) {
    const double denom = std::max({std::abs(an[i]), std::abs(fd[i]), 1e-3 * gmax});
    result.max_rel = std::max(result.max_rel, std::abs(an[i] - fd[i]) / denom);
  }
  return result;
}

}  // namespace

TEST_CASE("forward_node: zero first-layer weights give zero output") {
  RngStream rng(1);
  Instance inst = random_instance(rng, 8, 3, 5, 2);
  inst.w.fill(0.0);
  const ModelParams params(inst.w, inst.v, inst.c);
  const ForwardCache cache = forward_node(inst.x, inst.a1, inst.a2, params, inst.node);
  for (double v : cache.out) CHECK(v == 0.0);
}

TEST_CASE("forward_node: matches the independent straight-line implementation") {
  RngStream rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(rng, 10, 4, 6, 3);
    const ModelParams params(inst.w, inst.v, inst.c);
    const ForwardCache cache = forward_node(inst.x, inst.a1, inst.a2, params, inst.node);
    const auto expect = oracle::forward_reference(
        oracle::to_mat(inst.x), oracle::to_mat(inst.a1), oracle::to_mat(inst.a2),
        oracle::to_mat(inst.w), oracle::to_mat(inst.v), oracle::to_mat(inst.c),
        static_cast<std::size_t>(inst.node));
    for (std::size_t i = 0; i < expect.size(); ++i) {
      CHECK(cache.out[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward_node: scalar instance evaluated by hand") {
  Dense x(1, 1), w(1, 1), v(1, 1), c(1, 1);
  x(0, 0) = 0.8;
  w(0, 0) = 1.2;
  v(0, 0) = 0.9;
  c(0, 0) = 0.7;
  const SparseMatrix a1 = SparseMatrix::from_triplets(1, 1, {{0, 0, 0.6}});
  const SparseMatrix a2 = SparseMatrix::from_triplets(1, 1, {{0, 0, 0.5}});
  const ModelParams params(w, v, c);
  const ForwardCache cache = forward_node(x, a1, a2, params, 0);
  // h = 1.2*0.8*0.6 = 0.576, o1 = 0.4032, u = 0.9*0.4032*0.5 = 0.18144
  CHECK(cache.out[0] == doctest::Approx(0.4032 + 0.7 * 0.18144).epsilon(1e-15));
}

TEST_CASE("forward_node: errors") {
  RngStream rng(3);
  const Instance inst = random_instance(rng, 6, 3, 4, 2);
  const ModelParams params(inst.w, inst.v, inst.c);
  CHECK_THROWS_AS(forward_node(inst.x, inst.a1, inst.a2, params, 6), NodeOutOfRange);
  CHECK_THROWS_AS(forward_node(inst.x, SparseMatrix::identity(5), inst.a2, params, 0),
                  DimensionMismatch);
}

TEST_CASE("forward_all: every column equals forward_node bit for bit") {
  RngStream rng(4);
  const Instance inst = random_instance(rng, 12, 4, 5, 3);
  const ModelParams params(inst.w, inst.v, inst.c);
  const Dense out = forward_all(inst.x, inst.a1, inst.a2, params);
  for (index_t n = 0; n < 12; ++n) {
    const ForwardCache cache = forward_node(inst.x, inst.a1, inst.a2, params, n);
    for (index_t i = 0; i < out.rows(); ++i) {
      CHECK(out(i, n) == cache.out[static_cast<std::size_t>(i)]);
    }
  }

  Dense zero_x(4, 12);
  const Dense zout = forward_all(zero_x, inst.a1, inst.a2, params);
  for (double v : zout.data()) CHECK(v == 0.0);
}

TEST_CASE("positive homogeneity: doubling W doubles the jumping branch exactly") {
  RngStream rng(5);
  Instance inst = random_instance(rng, 9, 3, 4, 2);
  inst.v.fill(0.0);  // isolate the first branch: out = C relu(W X a1_n)
  const ModelParams p1(inst.w, inst.v, inst.c);
  Dense w2 = inst.w;
  for (double& x : w2.data()) x *= 2.0;
  const ModelParams p2(w2, inst.v, inst.c);
  const ForwardCache c1 = forward_node(inst.x, inst.a1, inst.a2, p1, inst.node);
  const ForwardCache c2 = forward_node(inst.x, inst.a1, inst.a2, p2, inst.node);
  CHECK(c1.mask_w_n == c2.mask_w_n);
  for (std::size_t i = 0; i < c1.out.size(); ++i) {
    CHECK(c2.out[i] == 2.0 * c1.out[i]);
  }
}

TEST_CASE("output_norm_bound holds for random instances") {
  RngStream rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(rng, 8, 3, 5, 2);
    const ModelParams params(inst.w, inst.v, inst.c);
    const ForwardCache cache = forward_node(inst.x, inst.a1, inst.a2, params, inst.node);
    double norm2 = 0.0;
    for (double v : cache.out) norm2 += v * v;
    CHECK(std::sqrt(norm2) <=
          output_norm_bound(inst.x, inst.a1, inst.a2, params, inst.node) + 1e-12);
  }
}

TEST_CASE("loss_node: zero residual, hand value, quadratic homogeneity") {
  const std::vector<double> y{1.0, 0.0};
  CHECK(loss_node(y, y) == 0.0);
  CHECK(loss_node(std::vector<double>{0.0, 0.0}, y) == 0.5);
  const std::vector<double> out{0.3, -0.4};
  const std::vector<double> out2{-0.4, -0.8};  // residual doubled: y - out2 = 2(y - out)
  CHECK(loss_node(out2, y) == doctest::Approx(4.0 * loss_node(out, y)).epsilon(1e-15));
  CHECK_THROWS_AS(loss_node(std::vector<double>{1.0}, y), DimensionMismatch);
}

TEST_CASE("backward_node: perfect prediction gives exactly zero gradients") {
  RngStream rng(7);
  Instance inst = random_instance(rng, 8, 3, 5, 2);
  const ModelParams params(inst.w, inst.v, inst.c);
  const ForwardCache cache = forward_node(inst.x, inst.a1, inst.a2, params, inst.node);
  const Gradients grads = backward_node(cache, cache.out, params);
  for (double g : grads.w.data()) CHECK(g == 0.0);
  for (double g : grads.v.data()) CHECK(g == 0.0);
}

TEST_CASE("backward_node: finite differences on kink-free instances") {
  RngStream rng(8);
  for (int trial = 0; trial < 15; ++trial) {
    const index_t n = 4 + static_cast<index_t>(rng.next_below(17));
    const index_t d = 2 + static_cast<index_t>(rng.next_below(7));
    const index_t m = 2 + static_cast<index_t>(rng.next_below(15));
    const index_t k = 1 + static_cast<index_t>(rng.next_below(3));
    const Instance inst = clear_instance(rng, n, d, m, k);
    const GradCheckResult r = finite_difference_check(inst, 1e-5);
    CHECK(r.max_rel < 1e-4);
  }
}

TEST_CASE("backward_node: V = 0 kink uses the active-side subgradient") {
  RngStream rng(9);
  Instance inst = clear_instance(rng, 8, 3, 5, 2);
  inst.v.fill(0.0);
  const ModelParams params(inst.w, inst.v, inst.c);
  const ForwardCache cache = forward_node(inst.x, inst.a1, inst.a2, params, inst.node);
  for (std::uint8_t mask : cache.mask_v_n) CHECK(mask == 1);  // u = 0 activates
  const Gradients grads = backward_node(cache, inst.y, params);

  Dense w = inst.w, v = inst.v;
  const double step = 1e-6;
  for (index_t j = 0; j < v.cols(); ++j) {
    const double t2j = cache.t2[static_cast<std::size_t>(j)];
    if (t2j <= 0.0) continue;
    for (index_t i = 0; i < v.rows(); ++i) {
      const double analytic = grads.v(i, j);
      double& slot = v(i, j);
      const double base = loss_of(inst, w, v);
      slot = step;
      const double fwd = (loss_of(inst, w, v) - base) / step;
      slot = -step;
      const double bwd = (base - loss_of(inst, w, v)) / step;
      slot = 0.0;
      // forward difference sees the active side; central averages in the
      // flat side and lands at half the subgradient
      CHECK(fwd == doctest::Approx(analytic).epsilon(1e-3));
      CHECK(0.5 * (fwd + bwd) == doctest::Approx(0.5 * analytic).epsilon(1e-3));
    }
  }
}

TEST_CASE("backward_node: stale cache is rejected") {
  RngStream rng(10);
  const Instance inst = random_instance(rng, 6, 3, 4, 2);
  ModelParams params(inst.w, inst.v, inst.c);
  const ForwardCache cache = forward_node(inst.x, inst.a1, inst.a2, params, inst.node);
  Dense g(4, 3);
  g.fill(0.1);
  params.step_w(0.5, g);
  CHECK_THROWS_AS(backward_node(cache, inst.y, params), StaleCache);
}

TEST_CASE("empirical_risk: singleton, hand average, empty set") {
  RngStream rng(11);
  const Instance inst = random_instance(rng, 6, 3, 4, 2);
  const ModelParams params(inst.w, inst.v, inst.c);
  Dense y(2, 6);
  for (double& v : y.data()) v = rng.next_gaussian();

  const double r0 = empirical_risk(params, inst.x, inst.a1, inst.a2, {2}, y);
  const ForwardCache cache = forward_node(inst.x, inst.a1, inst.a2, params, 2);
  CHECK(r0 == loss_node(cache.out, y.col_span(2)));

  const double r2 = empirical_risk(params, inst.x, inst.a1, inst.a2, {1, 4}, y);
  const ForwardCache c1 = forward_node(inst.x, inst.a1, inst.a2, params, 1);
  const ForwardCache c4 = forward_node(inst.x, inst.a1, inst.a2, params, 4);
  CHECK(r2 == doctest::Approx(0.5 * (loss_node(c1.out, y.col_span(1)) +
                                     loss_node(c4.out, y.col_span(4))))
                  .epsilon(1e-15));

  CHECK_THROWS_AS(empirical_risk(params, inst.x, inst.a1, inst.a2, {}, y), EmptyLabelSet);
}

TEST_CASE("init_params: distribution scales, zero sigma, determinism") {
  const index_t m = 4096, d = 3, k = 4;
  RngStream rng(12);
  const ModelParams p = ModelParams::init(m, d, k, InitConfig::defaults(m), rng);

  double c_var = 0.0;
  for (double v : p.c().data()) c_var += v * v;
  c_var /= static_cast<double>(p.c().data().size());
  CHECK(c_var == doctest::Approx(1.0 / static_cast<double>(m)).epsilon(0.10));

  double w_var = 0.0;
  for (double v : p.w().data()) w_var += v * v;
  w_var /= static_cast<double>(p.w().data().size());
  const double sw = InitConfig::defaults(m).sigma_w;
  CHECK(w_var == doctest::Approx(sw * sw).epsilon(0.10));

  RngStream rng0(13);
  const ModelParams z = ModelParams::init(8, 3, 2, {0.0, 1.0}, rng0);
  for (double v : z.w().data()) CHECK(v == 0.0);

  RngStream ra(14), rb(14);
  const ModelParams pa = ModelParams::init(8, 3, 2, InitConfig::defaults(8), ra);
  const ModelParams pb = ModelParams::init(8, 3, 2, InitConfig::defaults(8), rb);
  CHECK(pa.w() == pb.w());
  CHECK(pa.v() == pb.v());
  CHECK(pa.c() == pb.c());
}

TEST_CASE("checkpoint: bit-exact round trip") {
  RngStream rng(15);
  const index_t m = 6, d = 4, k = 3;
  ModelParams p = ModelParams::init(m, d, k, InitConfig::defaults(m), rng);
  Dense gw(m, d), gv(m, k);
  for (double& v : gw.data()) v = rng.next_gaussian();
  for (double& v : gv.data()) v = rng.next_gaussian();
  p.step_w(0.37, gw);
  p.step_v(0.11, gv);

  const std::string path = "checkpoint_roundtrip_test.bin";
  save_checkpoint(path, p);
  const ModelParams q = load_checkpoint(path);
  CHECK(q.w().data() == p.w().data());
  CHECK(q.v().data() == p.v().data());
  CHECK(q.c().data() == p.c().data());
  CHECK(q.w_init().data() == p.w_init().data());
  CHECK(q.v_init().data() == p.v_init().data());

  // saving the loaded params again must reproduce the file content
  const std::string path2 = "checkpoint_roundtrip_test2.bin";
  save_checkpoint(path2, q);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  std::remove(path.c_str());
  std::remove(path2.c_str());
}
