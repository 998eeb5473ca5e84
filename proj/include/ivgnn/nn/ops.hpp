#pragma once

// Differentiable building blocks recorded on a Tape. Matrices are [rows x cols]
// with one row per node (or per graph after pooling).

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ivgnn/interval.hpp"
#include "ivgnn/nn/tape.hpp"

namespace ivgnn::nn {

/// x [N x I] times w [I x O].
Var matmul(Tape& t, Var x, Var w);
/// x w + b with b of shape [O].
Var linear(Tape& t, Var x, Var w, Var b);
Var relu(Tape& t, Var x);
Var sigmoid(Tape& t, Var x);
Var scale(Tape& t, Var x, double s);
/// (1 + eps) * x for a single-element eps.
Var scale_one_plus(Tape& t, Var x, Var eps);
/// Sum of all elements, as a single-element tensor.
Var sum(Tape& t, Var x);
/// Sum of w * x elementwise; w is a constant of x's shape.
Var weighted_sum(Tape& t, Var x, const Tensor& w);
/// Column-wise concatenation of matrices with equal row counts.
Var concat_cols(Tape& t, const std::vector<Var>& xs);
/// Sums rows into `num_segments` output rows; row r goes to segment_of_row[r].
Var segment_sum(Tape& t, Var x, std::vector<std::size_t> segment_of_row, std::size_t num_segments);
/// Multiplies row r by factors[r].
Var row_scale(Tape& t, Var x, std::vector<double> factors);

struct BatchNormState {
  Tensor running_mean;
  Tensor running_var;
  double momentum = 0.1;
  double eps = 1e-5;

  static BatchNormState make(std::size_t features);
};

/// Per-column batch normalization. Training mode normalizes with the batch
/// statistics (biased variance) and updates the running estimates (unbiased
/// variance); eval mode uses the running estimates.
Var batch_norm(Tape& t, Var x, Var gamma, Var beta, BatchNormState& state, bool train);

/// Inverted dropout at train time, identity at eval.
Var dropout(Tape& t, Var x, double p, std::mt19937_64& rng, bool train);

/// Softmax cross-entropy summed over the rows of logits [B x C].
Var softmax_cross_entropy(Tape& t, Var logits, std::span<const int> labels);

/// One output element: a copy of sources[source][index], or `constant` when
/// source < 0.
struct Pick {
  std::int32_t source = -1;
  std::uint32_t index = 0;
  double constant = 0.0;
};

/// Piecewise selection. Gradients flow to the picked element only; the
/// selection pattern is mixed into the tape's branch signature.
Var select(Tape& t, const std::vector<Var>& sources, std::vector<Pick> picks,
           Tensor::Shape shape);

/// Interval-valued matrix: paired lo/hi channels of shape [N x d].
struct IntervalVar {
  Var lo;
  Var hi;
};

struct RowRef {
  std::uint32_t source = 0;
  std::uint32_t row = 0;
};

/// Output row r is the coordinate-wise aggregate (interval_algebra::agr) of
/// the rows listed in groups[r]. Forward values come from the same meet code
/// as the algebra module; each output endpoint's gradient goes to the input
/// endpoint the realized min/max branch selected, or nowhere when the branch
/// emits the constant 1.
IntervalVar interval_meet_aggregate(Tape& t, Aggregator variant,
                                    const std::vector<IntervalVar>& sources,
                                    const std::vector<std::vector<RowRef>>& groups);

/// lo = clamp01(min(a, b)), hi = clamp01(max(a, b)) elementwise.
IntervalVar order_and_clamp(Tape& t, Var a, Var b);

/// For x [N x 2H]: lo = min(x[:, j], x[:, H + j]), hi = max(...).
IntervalVar min_max_pair(Tape& t, Var x);

}  // namespace ivgnn::nn
