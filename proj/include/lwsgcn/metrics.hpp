#pragma once

#include "lwsgcn/model.hpp"

namespace lwsgcn {

struct EvalReport {
  double mean_l2_error = 0.0;        // mean over nodes of 1/2 ||y_n - out_n||^2
  double classification_error = 0.0;  // fraction with argmax(out) != argmax(y)
  index_t node_count = 0;
};

/// Evaluate on a node set with the supplied per-layer adjacency matrices.
/// Argmax ties break toward the lowest class index; the mean uses a
/// deterministic pairwise reduction so node order and thread count do not
/// change the result.
EvalReport evaluate(const ModelParams& params, const Dense& x,
                    const SparseMatrix& a_eval1, const SparseMatrix& a_eval2,
                    const std::vector<index_t>& nodes, const Dense& y);

}  // namespace lwsgcn
