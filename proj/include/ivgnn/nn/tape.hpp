#pragma once

// Reverse-mode differentiation over a linear record of tensor operations.

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include "ivgnn/nn/tensor.hpp"

namespace ivgnn::nn {

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();
  std::size_t id = kInvalid;
  bool valid() const { return id != kInvalid; }
};

/// Receives the gradient of the node's output and accumulates into inputs
/// through Tape::accumulate.
using BackwardFn = std::function<void(Tape& tape, const Tensor& grad_out)>;

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that never receives a gradient.
  Var constant(Tensor value);
  /// Leaf whose gradient is kept after backward().
  Var parameter(Tensor value);

  /// Records an op. Throws NumericError when `value` holds NaN or Inf.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);
  Var record(Tensor value, const std::vector<Var>& inputs, BackwardFn backward);

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  /// Gradient after backward(); zeros of the value's shape when none flowed.
  const Tensor& grad(Var v);
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }

  /// Adds `g` into the gradient buffer of `v` (no-op for constants).
  void accumulate(Var v, const Tensor& g);
  /// Buffer for in-place accumulation; nullptr for constants.
  Tensor* grad_buffer(Var v);

  /// Seeds d(out)/d(out) = 1 for a single-element `out` and walks the record
  /// in reverse, visiting each node once.
  void backward(Var out);

  std::size_t size() const { return nodes_.size(); }
  /// Total number of stored activation values across all nodes.
  std::size_t activation_floats() const;

  /// Hash of the discrete choices taken during forward (ReLU masks, min/max
  /// selections). Two evaluations with equal signatures ran the same
  /// piecewise-smooth branch.
  std::uint64_t branch_signature() const { return signature_; }
  void mix_signature(std::uint64_t v);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<Var> inputs;
    BackwardFn backward;
    bool requires_grad = false;
  };
  std::deque<Node> nodes_;  // stable references across record()
  std::uint64_t signature_ = 0x9e3779b97f4a7c15ULL;
};

}  // namespace ivgnn::nn
