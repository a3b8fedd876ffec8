#include "lwsgcn/metrics.hpp"

#include "lwsgcn/kernels.hpp"

namespace lwsgcn {

namespace {

index_t argmax_lowest(std::span<const double> v) {
  index_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<index_t>(i);
  }
  return best;
}

}  // namespace

EvalReport evaluate(const ModelParams& params, const Dense& x,
                    const SparseMatrix& a_eval1, const SparseMatrix& a_eval2,
                    const std::vector<index_t>& nodes, const Dense& y) {
  if (nodes.empty()) throw EmptyEvalSet("evaluate: empty node set");
  const Dense out = forward_all(x, a_eval1, a_eval2, params);

  std::vector<double> losses(nodes.size());
  std::vector<double> misses(nodes.size());
  const auto count = static_cast<index_t>(nodes.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < count; ++i) {
    const index_t n = nodes[static_cast<std::size_t>(i)];
    losses[static_cast<std::size_t>(i)] = loss_node(out.col_span(n), y.col_span(n));
    misses[static_cast<std::size_t>(i)] =
        argmax_lowest(out.col_span(n)) != argmax_lowest(y.col_span(n)) ? 1.0 : 0.0;
  }

  EvalReport report;
  report.node_count = count;
  report.mean_l2_error = kernels::pairwise_sum(losses) / static_cast<double>(count);
  report.classification_error = kernels::pairwise_sum(misses) / static_cast<double>(count);
  return report;
}

}  // namespace lwsgcn
