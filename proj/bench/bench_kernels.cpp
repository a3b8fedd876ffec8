// Timings for the OpenMP kernels against their serial references, plus the
// two training-relevant composites (full forward pass, one SGD-style
// gradient). Sizes default to the synthetic-benchmark scale.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <omp.h>

#include "lwsgcn/graph.hpp"
#include "lwsgcn/kernels.hpp"
#include "lwsgcn/model.hpp"
#include "lwsgcn/synthgen.hpp"

using namespace lwsgcn;

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(int reps, F&& fn) {
  fn();  // warm-up
  const auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double omp_ms) {
  std::printf("%-28s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx\n", name,
              serial_ms, omp_ms, serial_ms / omp_ms);
}

}  // namespace

int main(int argc, char** argv) {
  index_t n = 2000;
  index_t d = 100;
  index_t m = 50;
  index_t k = 5;
  int reps = 5;
  if (argc > 1) n = std::stoll(argv[1]);
  if (argc > 2) reps = std::stoi(argv[2]);

  std::printf("N=%lld d=%lld m=%lld k=%lld threads=%d\n",
              static_cast<long long>(n), static_cast<long long>(d),
              static_cast<long long>(m), static_cast<long long>(k),
              omp_get_max_threads());

  SyntheticGraphSpec spec;
  spec.groups = {{n / 10, 50.0, 10.0}, {n - n / 10, 150.0, 10.0}};
  RngStream rng(1);
  const Graph graph = generate_graph(spec, rng);
  const SparseMatrix a = build_normalized_adjacency(graph);
  const Dense x = generate_features(n, d, rng);

  {
    Dense out_serial(d, n), out_omp(d, n);
    const double ts = time_ms(reps, [&] { kernels::right_multiply_serial(x, a, out_serial); });
    const double tp = time_ms(reps, [&] { kernels::right_multiply_omp(x, a, out_omp); });
    report("right_multiply (X*A)", ts, tp);
    if (!(out_serial == out_omp)) {
      std::printf("MISMATCH between serial and omp right_multiply\n");
      return 1;
    }
  }

  RngStream wrng(2);
  Dense w(m, d);
  for (double& v : w.data()) v = 0.1 * wrng.next_gaussian();
  {
    Dense out_serial(m, n), out_omp(m, n);
    const double ts = time_ms(reps, [&] { kernels::matmul_serial(w, x, out_serial); });
    const double tp = time_ms(reps, [&] { kernels::matmul_omp(w, x, out_omp); });
    report("matmul (W*X)", ts, tp);
    if (!(out_serial == out_omp)) {
      std::printf("MISMATCH between serial and omp matmul\n");
      return 1;
    }
  }

  {
    RngStream irng(3);
    const ModelParams params = ModelParams::init(m, d, k, InitConfig::defaults(m), irng);
    const double tf = time_ms(reps, [&] { (void)forward_all(x, a, a, params); });
    std::printf("%-28s %9.3f ms per call\n", "forward_all (full graph)", tf);

    const double tn = time_ms(reps, [&] {
      ForwardCache cache = forward_node(x, a, a, params, n / 2);
      (void)backward_node(cache, std::vector<double>(static_cast<std::size_t>(k), 0.5),
                          params);
    });
    std::printf("%-28s %9.3f ms per call\n", "forward+backward (one node)", tn);
  }
  return 0;
}
