#pragma once

// Central finite-difference oracle for tape gradients.

#include <functional>
#include <random>
#include <vector>

#include "ivgnn/nn/tape.hpp"

namespace ivgnn::testing {

using ScalarFn = std::function<nn::Var(nn::Tape&, const std::vector<nn::Var>&)>;

struct GradCheck {
  double rel_error = 0.0;
  // False when some +-h probe changed a discrete branch (ReLU mask, min/max
  // choice); the point straddles a kink and the comparison is meaningless.
  bool branch_stable = true;
};

/// Compares the analytic gradient of f w.r.t. every element of `inputs`
/// against central differences. rel = |a - n| / max(|a|, |n|, 1e-12), norms
/// over all elements.
GradCheck grad_check(const ScalarFn& f, const std::vector<nn::Tensor>& inputs, double h = 1e-5);

/// Restricts the comparison to the listed (input, element) coordinates.
struct Coord {
  std::size_t input;
  std::size_t index;
};
GradCheck grad_check_coords(const ScalarFn& f, const std::vector<nn::Tensor>& inputs,
                            const std::vector<Coord>& coords, double h = 1e-5);

nn::Tensor random_tensor(nn::Tensor::Shape shape, std::mt19937_64& rng, double lo = -1.0,
                         double hi = 1.0);

}  // namespace ivgnn::testing
