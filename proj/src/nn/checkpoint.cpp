#include "ivgnn/nn/checkpoint.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace ivgnn::nn {
namespace {
constexpr const char* kMagic = "ivgnn-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void write_checkpoint(std::ostream& out, const std::vector<NamedTensor>& tensors) {
  const auto old = out.precision(17);
  out << kMagic << ' ' << kVersion << '\n' << tensors.size() << '\n';
  for (const auto& [name, value] : tensors) {
    if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
      throw std::invalid_argument("checkpoint: invalid tensor name '" + name + "'");
    }
    out << name << ' ' << value.rank();
    for (auto d : value.shape()) out << ' ' << d;
    out << '\n';
    for (std::size_t i = 0; i < value.size(); ++i) out << (i ? " " : "") << value[i];
    out << '\n';
  }
  out.precision(old);
}

std::vector<NamedTensor> read_checkpoint(std::istream& in) {
  std::string magic;
  int version = 0;
  std::size_t count = 0;
  if (!(in >> magic >> version) || magic != kMagic) {
    throw std::runtime_error("checkpoint: missing header");
  }
  if (version != kVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  if (!(in >> count)) throw std::runtime_error("checkpoint: missing tensor count");
  std::vector<NamedTensor> out;
  for (std::size_t k = 0; k < count; ++k) {
    NamedTensor nt;
    std::size_t rank = 0;
    if (!(in >> nt.name >> rank)) throw std::runtime_error("checkpoint: truncated tensor header");
    Tensor::Shape shape(rank);
    for (auto& d : shape)
      if (!(in >> d)) throw std::runtime_error("checkpoint: truncated shape of " + nt.name);
    nt.value = Tensor(shape);
    for (auto& v : nt.value.values())
      if (!(in >> v)) throw std::runtime_error("checkpoint: truncated values of " + nt.name);
    out.push_back(std::move(nt));
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_checkpoint(out, tensors);
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace ivgnn::nn
