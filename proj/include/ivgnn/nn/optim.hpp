#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ivgnn/nn/tensor.hpp"

namespace ivgnn::nn {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t step = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
};

/// One bias-corrected Adam update. Moment buffers are created on the first
/// call; later calls must pass parameters of the same shapes.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state,
               double lr);

/// base_lr * factor^(epoch / step_epochs), integer division.
double lr_schedule(std::size_t epoch, double base_lr, std::size_t step_epochs = 50,
                   double factor = 0.5);

}  // namespace ivgnn::nn
