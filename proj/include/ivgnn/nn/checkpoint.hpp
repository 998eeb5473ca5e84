#pragma once

// Parameter checkpoints.
//
// Text format, version 1:
//
//   ivgnn-checkpoint 1
//   <tensor count>
//   <name> <rank> <dim0> ... <dim{rank-1}>
//   <values, whitespace separated, 17 significant digits>
//   ... (repeated per tensor)
//
// Names contain no whitespace. Values round-trip exactly.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ivgnn/nn/tensor.hpp"

namespace ivgnn::nn {

struct NamedTensor {
  std::string name;
  Tensor value;
};

void write_checkpoint(std::ostream& out, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

}  // namespace ivgnn::nn
