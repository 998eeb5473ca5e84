#include "ivgnn/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ivgnn::nn {

Var Tape::constant(Tensor value) {
  if (!value.all_finite()) throw NumericError("non-finite constant");
  nodes_.push_back({std::move(value), {}, {}, nullptr, false});
  return {nodes_.size() - 1};
}

Var Tape::parameter(Tensor value) {
  if (!value.all_finite()) throw NumericError("non-finite parameter");
  nodes_.push_back({std::move(value), {}, {}, nullptr, true});
  return {nodes_.size() - 1};
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
  return record(std::move(value), std::vector<Var>(inputs), std::move(backward));
}

Var Tape::record(Tensor value, const std::vector<Var>& inputs, BackwardFn backward) {
  if (!value.all_finite()) throw NumericError("non-finite value produced by tape op");
  bool needs = false;
  for (Var in : inputs) needs = needs || nodes_.at(in.id).requires_grad;
  Node node{std::move(value), {}, inputs, needs ? std::move(backward) : BackwardFn{}, needs};
  nodes_.push_back(std::move(node));
  return {nodes_.size() - 1};
}

const Tensor& Tape::grad(Var v) {
  Node& n = nodes_.at(v.id);
  if (n.grad.size() != n.value.size()) n.grad = Tensor(n.value.shape());
  return n.grad;
}

Tensor* Tape::grad_buffer(Var v) {
  Node& n = nodes_.at(v.id);
  if (!n.requires_grad) return nullptr;
  if (n.grad.size() != n.value.size()) n.grad = Tensor(n.value.shape());
  return &n.grad;
}

void Tape::accumulate(Var v, const Tensor& g) {
  Tensor* buf = grad_buffer(v);
  if (!buf) return;
  if (buf->size() != g.size()) throw ShapeError("accumulate: gradient shape mismatch");
  double* dst = buf->data();
  const double* src = g.data();
  for (std::size_t i = 0; i < g.size(); ++i) dst[i] += src[i];
}

void Tape::backward(Var out) {
  Node& root = nodes_.at(out.id);
  if (root.value.size() != 1) throw ShapeError("backward: output must hold a single value");
  if (!root.requires_grad) return;
  root.grad = Tensor(root.value.shape(), 1.0);
  for (std::size_t id = out.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.backward || n.grad.size() == 0) continue;
    n.backward(*this, n.grad);
  }
}

std::size_t Tape::activation_floats() const {
  std::size_t total = 0;
  for (const auto& n : nodes_) total += n.value.size();
  return total;
}

void Tape::mix_signature(std::uint64_t v) {
  // splitmix64 finalizer over the running state
  std::uint64_t z = signature_ ^ (v + 0x9e3779b97f4a7c15ULL + (signature_ << 6) + (signature_ >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  signature_ = z ^ (z >> 31);
}

}  // namespace ivgnn::nn
