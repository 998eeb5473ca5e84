#include "ivgnn/nn/ops.hpp"

#include <algorithm>
#include <cmath>

namespace ivgnn::nn {
namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw ShapeError(msg);
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw ShapeError(msg);
}

void require_matrix(const Tensor& x, const char* op) {
  require(x.rank() == 2, std::string(op) + ": expected a matrix, got " + shape_string(x.shape()));
}

// c[n x o] += a[n x i] * b[i x o]
void gemm_nn(const double* a, const double* b, double* c, std::size_t n, std::size_t in,
             std::size_t out) {
  for (std::size_t r = 0; r < n; ++r) {
    double* crow = c + r * out;
    const double* arow = a + r * in;
    for (std::size_t k = 0; k < in; ++k) {
      const double av = arow[k];
      if (av == 0.0) continue;
      const double* brow = b + k * out;
      for (std::size_t j = 0; j < out; ++j) crow[j] += av * brow[j];
    }
  }
}

// dx[n x i] += dy[n x o] * w^T ; dw[i x o] += x^T dy
void gemm_backward(const double* x, const double* w, const double* dy, double* dx, double* dw,
                   std::size_t n, std::size_t in, std::size_t out) {
  for (std::size_t r = 0; r < n; ++r) {
    const double* dyrow = dy + r * out;
    const double* xrow = x + r * in;
    for (std::size_t k = 0; k < in; ++k) {
      const double* wrow = w + k * out;
      if (dx) {
        double acc = 0.0;
        for (std::size_t j = 0; j < out; ++j) acc += dyrow[j] * wrow[j];
        dx[r * in + k] += acc;
      }
      if (dw) {
        const double xv = xrow[k];
        if (xv == 0.0) continue;
        double* dwrow = dw + k * out;
        for (std::size_t j = 0; j < out; ++j) dwrow[j] += xv * dyrow[j];
      }
    }
  }
}

}  // namespace

Var matmul(Tape& t, Var x, Var w) {
  const Tensor& xv = t.value(x);
  const Tensor& wv = t.value(w);
  require_matrix(xv, "matmul");
  require_matrix(wv, "matmul");
  require(xv.cols() == wv.rows(), "matmul: inner dimensions differ " + shape_string(xv.shape()) +
                                      " * " + shape_string(wv.shape()));
  const std::size_t n = xv.rows(), in = xv.cols(), out = wv.cols();
  Tensor y({n, out});
  gemm_nn(xv.data(), wv.data(), y.data(), n, in, out);
  return t.record(std::move(y), {x, w}, [x, w, n, in, out](Tape& tp, const Tensor& g) {
    Tensor* dx = tp.grad_buffer(x);
    Tensor* dw = tp.grad_buffer(w);
    gemm_backward(tp.value(x).data(), tp.value(w).data(), g.data(), dx ? dx->data() : nullptr,
                  dw ? dw->data() : nullptr, n, in, out);
  });
}

Var linear(Tape& t, Var x, Var w, Var b) {
  const Tensor& xv = t.value(x);
  const Tensor& wv = t.value(w);
  const Tensor& bv = t.value(b);
  require_matrix(xv, "linear");
  require_matrix(wv, "linear");
  require(xv.cols() == wv.rows(), "linear: input width " + std::to_string(xv.cols()) +
                                      " does not match weight " + shape_string(wv.shape()));
  require(bv.size() == wv.cols(), "linear: bias size mismatch");
  const std::size_t n = xv.rows(), in = xv.cols(), out = wv.cols();
  Tensor y({n, out});
  for (std::size_t r = 0; r < n; ++r) std::copy(bv.data(), bv.data() + out, y.data() + r * out);
  gemm_nn(xv.data(), wv.data(), y.data(), n, in, out);
  return t.record(std::move(y), {x, w, b}, [x, w, b, n, in, out](Tape& tp, const Tensor& g) {
    Tensor* dx = tp.grad_buffer(x);
    Tensor* dw = tp.grad_buffer(w);
    gemm_backward(tp.value(x).data(), tp.value(w).data(), g.data(), dx ? dx->data() : nullptr,
                  dw ? dw->data() : nullptr, n, in, out);
    if (Tensor* db = tp.grad_buffer(b)) {
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < out; ++j) (*db)[j] += g[r * out + j];
    }
  });
}

Var relu(Tape& t, Var x) {
  const Tensor& xv = t.value(x);
  Tensor y(xv.shape());
  std::uint64_t active = 0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    if (xv[i] > 0.0) {
      y[i] = xv[i];
      active = active * 31 + i + 1;
    }
  }
  t.mix_signature(active);
  return t.record(std::move(y), {x}, [x](Tape& tp, const Tensor& g) {
    const Tensor& xv = tp.value(x);
    Tensor* dx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (xv[i] > 0.0) (*dx)[i] += g[i];
  });
}

Var sigmoid(Tape& t, Var x) {
  const Tensor& xv = t.value(x);
  Tensor y(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const double v = xv[i];
    y[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  Tensor s = y;
  return t.record(std::move(y), {x}, [x, s = std::move(s)](Tape& tp, const Tensor& g) {
    Tensor* dx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) (*dx)[i] += g[i] * s[i] * (1.0 - s[i]);
  });
}

Var scale(Tape& t, Var x, double s) {
  Tensor y = t.value(x);
  for (auto& v : y.values()) v *= s;
  return t.record(std::move(y), {x}, [x, s](Tape& tp, const Tensor& g) {
    Tensor* dx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) (*dx)[i] += s * g[i];
  });
}

Var scale_one_plus(Tape& t, Var x, Var eps) {
  require(t.value(eps).size() == 1, "scale_one_plus: eps must hold one value");
  const double s = 1.0 + t.value(eps)[0];
  Tensor y = t.value(x);
  for (auto& v : y.values()) v *= s;
  return t.record(std::move(y), {x, eps}, [x, eps](Tape& tp, const Tensor& g) {
    const double s = 1.0 + tp.value(eps)[0];
    const Tensor& xv = tp.value(x);
    if (Tensor* dx = tp.grad_buffer(x)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*dx)[i] += s * g[i];
    }
    if (Tensor* de = tp.grad_buffer(eps)) {
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * xv[i];
      (*de)[0] += acc;
    }
  });
}

Var sum(Tape& t, Var x) {
  double s = 0.0;
  for (double v : t.value(x).values()) s += v;
  return t.record(Tensor::scalar(s), {x}, [x](Tape& tp, const Tensor& g) {
    Tensor* dx = tp.grad_buffer(x);
    for (auto& v : dx->values()) v += g[0];
  });
}

Var weighted_sum(Tape& t, Var x, const Tensor& w) {
  const Tensor& xv = t.value(x);
  require(w.size() == xv.size(), "weighted_sum: weight size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) s += w[i] * xv[i];
  return t.record(Tensor::scalar(s), {x}, [x, w](Tape& tp, const Tensor& g) {
    Tensor* dx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < w.size(); ++i) (*dx)[i] += g[0] * w[i];
  });
}

Var concat_cols(Tape& t, const std::vector<Var>& xs) {
  require(!xs.empty(), "concat_cols: no inputs");
  const std::size_t n = t.value(xs[0]).rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (Var x : xs) {
    const Tensor& v = t.value(x);
    require_matrix(v, "concat_cols");
    require(v.rows() == n, "concat_cols: row counts differ");
    widths.push_back(v.cols());
    total += v.cols();
  }
  Tensor y({n, total});
  std::size_t offset = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const Tensor& v = t.value(xs[k]);
    for (std::size_t r = 0; r < n; ++r)
      std::copy(v.data() + r * widths[k], v.data() + (r + 1) * widths[k], y.data() + r * total + offset);
    offset += widths[k];
  }
  return t.record(std::move(y), xs, [xs, widths, n, total](Tape& tp, const Tensor& g) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (Tensor* dx = tp.grad_buffer(xs[k])) {
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t j = 0; j < widths[k]; ++j)
            (*dx)[r * widths[k] + j] += g[r * total + offset + j];
      }
      offset += widths[k];
    }
  });
}

Var segment_sum(Tape& t, Var x, std::vector<std::size_t> segment_of_row, std::size_t num_segments) {
  const Tensor& xv = t.value(x);
  require_matrix(xv, "segment_sum");
  require(segment_of_row.size() == xv.rows(), "segment_sum: one segment id per row required");
  const std::size_t d = xv.cols();
  Tensor y({num_segments, d});
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    require(segment_of_row[r] < num_segments, "segment_sum: segment id out of range");
    double* dst = y.data() + segment_of_row[r] * d;
    const double* src = xv.data() + r * d;
    for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
  }
  return t.record(std::move(y), {x}, [x, seg = std::move(segment_of_row), d](Tape& tp, const Tensor& g) {
    Tensor* dx = tp.grad_buffer(x);
    for (std::size_t r = 0; r < seg.size(); ++r)
      for (std::size_t j = 0; j < d; ++j) (*dx)[r * d + j] += g[seg[r] * d + j];
  });
}

Var row_scale(Tape& t, Var x, std::vector<double> factors) {
  Tensor y = t.value(x);
  require_matrix(y, "row_scale");
  require(factors.size() == y.rows(), "row_scale: one factor per row required");
  const std::size_t d = y.cols();
  for (std::size_t r = 0; r < y.rows(); ++r)
    for (std::size_t j = 0; j < d; ++j) y[r * d + j] *= factors[r];
  return t.record(std::move(y), {x}, [x, f = std::move(factors), d](Tape& tp, const Tensor& g) {
    Tensor* dx = tp.grad_buffer(x);
    for (std::size_t r = 0; r < f.size(); ++r)
      for (std::size_t j = 0; j < d; ++j) (*dx)[r * d + j] += f[r] * g[r * d + j];
  });
}

BatchNormState BatchNormState::make(std::size_t features) {
  BatchNormState s;
  s.running_mean = Tensor({features}, 0.0);
  s.running_var = Tensor({features}, 1.0);
  return s;
}

Var batch_norm(Tape& t, Var x, Var gamma, Var beta, BatchNormState& state, bool train) {
  const Tensor& xv = t.value(x);
  require_matrix(xv, "batch_norm");
  const std::size_t n = xv.rows(), d = xv.cols();
  require(t.value(gamma).size() == d && t.value(beta).size() == d,
          "batch_norm: gamma/beta size mismatch");
  require(state.running_mean.size() == d, "batch_norm: running stats size mismatch");
  const Tensor& gv = t.value(gamma);
  const Tensor& bv = t.value(beta);

  Tensor mean({d}), inv_std({d});
  if (train) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < d; ++j) mean[j] += xv[r * d + j];
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
    Tensor var({d});
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < d; ++j) {
        const double c = xv[r * d + j] - mean[j];
        var[j] += c * c;
      }
    for (std::size_t j = 0; j < d; ++j) {
      var[j] /= static_cast<double>(n);
      inv_std[j] = 1.0 / std::sqrt(var[j] + state.eps);
      state.running_mean[j] = (1.0 - state.momentum) * state.running_mean[j] + state.momentum * mean[j];
      if (n > 1) {
        const double unbiased = var[j] * static_cast<double>(n) / static_cast<double>(n - 1);
        state.running_var[j] = (1.0 - state.momentum) * state.running_var[j] + state.momentum * unbiased;
      }
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      mean[j] = state.running_mean[j];
      inv_std[j] = 1.0 / std::sqrt(state.running_var[j] + state.eps);
    }
  }

  Tensor xhat({n, d}), y({n, d});
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (xv[r * d + j] - mean[j]) * inv_std[j];
      xhat[r * d + j] = h;
      y[r * d + j] = gv[j] * h + bv[j];
    }

  return t.record(std::move(y), {x, gamma, beta},
                  [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std), n, d,
                   train](Tape& tp, const Tensor& g) {
                    const Tensor& gv = tp.value(gamma);
                    std::vector<double> sum_g(d, 0.0), sum_gh(d, 0.0);
                    for (std::size_t r = 0; r < n; ++r)
                      for (std::size_t j = 0; j < d; ++j) {
                        sum_g[j] += g[r * d + j];
                        sum_gh[j] += g[r * d + j] * xhat[r * d + j];
                      }
                    if (Tensor* db = tp.grad_buffer(beta))
                      for (std::size_t j = 0; j < d; ++j) (*db)[j] += sum_g[j];
                    if (Tensor* dg = tp.grad_buffer(gamma))
                      for (std::size_t j = 0; j < d; ++j) (*dg)[j] += sum_gh[j];
                    Tensor* dx = tp.grad_buffer(x);
                    if (!dx) return;
                    const double nn = static_cast<double>(n);
                    for (std::size_t r = 0; r < n; ++r)
                      for (std::size_t j = 0; j < d; ++j) {
                        const double gy = g[r * d + j];
                        if (train) {
                          (*dx)[r * d + j] += gv[j] * inv_std[j] / nn *
                                              (nn * gy - sum_g[j] - xhat[r * d + j] * sum_gh[j]);
                        } else {
                          (*dx)[r * d + j] += gv[j] * inv_std[j] * gy;
                        }
                      }
                  });
}

Var dropout(Tape& t, Var x, double p, std::mt19937_64& rng, bool train) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("dropout: p must be in [0,1)");
  if (!train || p == 0.0) return x;
  const Tensor& xv = t.value(x);
  std::bernoulli_distribution keep(1.0 - p);
  Tensor mask(xv.shape());
  const double s = 1.0 / (1.0 - p);
  for (auto& m : mask.values()) m = keep(rng) ? s : 0.0;
  Tensor y(xv.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = xv[i] * mask[i];
  return t.record(std::move(y), {x}, [x, mask = std::move(mask)](Tape& tp, const Tensor& g) {
    Tensor* dx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) (*dx)[i] += mask[i] * g[i];
  });
}

Var softmax_cross_entropy(Tape& t, Var logits, std::span<const int> labels) {
  const Tensor& z = t.value(logits);
  require_matrix(z, "softmax_cross_entropy");
  const std::size_t b = z.rows(), c = z.cols();
  require(labels.size() == b, "softmax_cross_entropy: one label per row required");
  Tensor probs({b, c});
  double loss = 0.0;
  for (std::size_t r = 0; r < b; ++r) {
    require(labels[r] >= 0 && static_cast<std::size_t>(labels[r]) < c,
            "softmax_cross_entropy: label out of range");
    const double* row = z.data() + r * c;
    const double m = *std::max_element(row, row + c);
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += std::exp(row[j] - m);
    const double lse = m + std::log(s);
    for (std::size_t j = 0; j < c; ++j) probs[r * c + j] = std::exp(row[j] - lse);
    loss += lse - row[labels[r]];
  }
  std::vector<int> y(labels.begin(), labels.end());
  return t.record(Tensor::scalar(loss), {logits},
                  [logits, probs = std::move(probs), y = std::move(y), c](Tape& tp, const Tensor& g) {
                    Tensor* dz = tp.grad_buffer(logits);
                    for (std::size_t r = 0; r < y.size(); ++r)
                      for (std::size_t j = 0; j < c; ++j) {
                        const double target = static_cast<int>(j) == y[r] ? 1.0 : 0.0;
                        (*dz)[r * c + j] += g[0] * (probs[r * c + j] - target);
                      }
                  });
}

Var select(Tape& t, const std::vector<Var>& sources, std::vector<Pick> picks, Tensor::Shape shape) {
  Tensor y(std::move(shape));
  require(y.size() == picks.size(), "select: one pick per output element required");
  std::vector<const Tensor*> src;
  src.reserve(sources.size());
  for (Var s : sources) src.push_back(&t.value(s));
  std::uint64_t h = 0;
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const Pick& p = picks[i];
    if (p.source < 0) {
      y[i] = p.constant;
      h = h * 1099511628211ULL + 0x5bd1e995ULL;
    } else {
      require(static_cast<std::size_t>(p.source) < src.size(), "select: source out of range");
      const Tensor& from = *src[static_cast<std::size_t>(p.source)];
      require(p.index < from.size(), "select: index out of range");
      y[i] = from[p.index];
      h = h * 1099511628211ULL + (static_cast<std::uint64_t>(p.source) << 32) + p.index;
    }
  }
  t.mix_signature(h);
  return t.record(std::move(y), sources, [sources, picks = std::move(picks)](Tape& tp, const Tensor& g) {
    std::vector<Tensor*> bufs;
    bufs.reserve(sources.size());
    for (Var s : sources) bufs.push_back(tp.grad_buffer(s));
    for (std::size_t i = 0; i < picks.size(); ++i) {
      const Pick& p = picks[i];
      if (p.source < 0) continue;
      if (Tensor* b = bufs[static_cast<std::size_t>(p.source)]) (*b)[p.index] += g[i];
    }
  });
}

IntervalVar interval_meet_aggregate(Tape& t, Aggregator variant,
                                    const std::vector<IntervalVar>& sources,
                                    const std::vector<std::vector<RowRef>>& groups) {
  require(!sources.empty(), "interval_meet_aggregate: no sources");
  const std::size_t d = t.value(sources[0].lo).cols();
  std::vector<Var> inputs;
  for (const auto& s : sources) {
    const Tensor& lo = t.value(s.lo);
    const Tensor& hi = t.value(s.hi);
    require(lo.same_shape(hi), "interval_meet_aggregate: lo/hi shapes differ");
    require(lo.cols() == d, "interval_meet_aggregate: interval dimensions differ");
    inputs.push_back(s.lo);
    inputs.push_back(s.hi);
  }
  // Endpoint provenance: (input slot << 32) | flat index.
  auto encode = [](std::size_t slot, std::size_t index) {
    return static_cast<std::int64_t>((static_cast<std::uint64_t>(slot) << 32) | index);
  };
  const std::size_t rows = groups.size();
  std::vector<Pick> lo_picks(rows * d), hi_picks(rows * d);
  std::vector<BasicInterval<TracedEndpoint>> scratch;
  auto to_pick = [](const TracedEndpoint& e) {
    if (e.source < 0) return Pick{-1, 0, e.value};
    const auto u = static_cast<std::uint64_t>(e.source);
    return Pick{static_cast<std::int32_t>(u >> 32), static_cast<std::uint32_t>(u & 0xffffffffu), 0.0};
  };
  std::vector<const double*> lo_data, hi_data;
  std::vector<std::size_t> source_rows;
  for (const auto& s : sources) {
    lo_data.push_back(t.value(s.lo).data());
    hi_data.push_back(t.value(s.hi).data());
    source_rows.push_back(t.value(s.lo).rows());
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& group = groups[r];
    if (group.empty()) {
      throw std::invalid_argument("interval_meet_aggregate: empty neighborhood for output row " +
                                  std::to_string(r));
    }
    for (const RowRef& ref : group) {
      require(ref.source < sources.size(), "interval_meet_aggregate: bad source");
      require(ref.row < source_rows[ref.source], "interval_meet_aggregate: bad row");
    }
    scratch.resize(group.size());
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t m = 0; m < group.size(); ++m) {
        const RowRef& ref = group[m];
        const std::size_t idx = ref.row * d + j;
        scratch[m] = {TracedEndpoint{lo_data[ref.source][idx], encode(2 * ref.source, idx)},
                      TracedEndpoint{hi_data[ref.source][idx], encode(2 * ref.source + 1, idx)}};
      }
      const auto out = agr_in_place<TracedEndpoint>(variant, scratch);
      lo_picks[r * d + j] = to_pick(out.lo);
      hi_picks[r * d + j] = to_pick(out.hi);
    }
  }
  return {select(t, inputs, std::move(lo_picks), {rows, d}),
          select(t, inputs, std::move(hi_picks), {rows, d})};
}

IntervalVar order_and_clamp(Tape& t, Var a, Var b) {
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  require(av.same_shape(bv), "order_and_clamp: shapes differ");
  std::vector<Pick> lo(av.size()), hi(av.size());
  auto clamp_pick = [](double v, Pick p) {
    if (v < 0.0) return Pick{-1, 0, 0.0};
    if (v > 1.0) return Pick{-1, 0, 1.0};
    return p;
  };
  for (std::size_t i = 0; i < av.size(); ++i) {
    const auto idx = static_cast<std::uint32_t>(i);
    const bool a_low = !(bv[i] < av[i]);
    const Pick pa{0, idx, 0.0}, pb{1, idx, 0.0};
    lo[i] = clamp_pick(a_low ? av[i] : bv[i], a_low ? pa : pb);
    hi[i] = clamp_pick(a_low ? bv[i] : av[i], a_low ? pb : pa);
  }
  // Ties resolve to the first operand for both endpoints.
  for (std::size_t i = 0; i < av.size(); ++i) {
    if (av[i] == bv[i] && hi[i].source == 1) hi[i].source = 0;
  }
  return {select(t, {a, b}, std::move(lo), av.shape()), select(t, {a, b}, std::move(hi), av.shape())};
}

IntervalVar min_max_pair(Tape& t, Var x) {
  const Tensor& xv = t.value(x);
  require_matrix(xv, "min_max_pair");
  require(xv.cols() % 2 == 0, "min_max_pair: width must be even");
  const std::size_t n = xv.rows(), w = xv.cols(), h = w / 2;
  std::vector<Pick> lo(n * h), hi(n * h);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < h; ++j) {
      const auto ia = static_cast<std::uint32_t>(r * w + j);
      const auto ib = static_cast<std::uint32_t>(r * w + h + j);
      const bool a_low = !(xv[ib] < xv[ia]);
      const bool a_high = !(xv[ia] < xv[ib]);
      lo[r * h + j] = {0, a_low ? ia : ib, 0.0};
      hi[r * h + j] = {0, a_high ? ia : ib, 0.0};
    }
  return {select(t, {x}, std::move(lo), {n, h}), select(t, {x}, std::move(hi), {n, h})};
}

}  // namespace ivgnn::nn
