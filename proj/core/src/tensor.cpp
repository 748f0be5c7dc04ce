#include "adnet/tensor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace adnet {

namespace {

void check_finite(const Tensor::Node& n, const char* op) {
#ifndef NDEBUG
  for (double v : n.value) {
    if (!std::isfinite(v)) {
      throw std::runtime_error(std::string("non-finite value produced by ") +
                               op);
    }
  }
#else
  (void)n;
  (void)op;
#endif
}

std::shared_ptr<Tensor::Node> make_node(std::vector<int> shape,
                                        bool requires_grad) {
  auto n = std::make_shared<Tensor::Node>();
  n->shape = std::move(shape);
  n->value.assign(shape_numel(n->shape), 0.0);
  n->requires_grad = requires_grad;
  return n;
}

bool any_grad(const std::vector<Tensor>& ts) {
  for (const auto& t : ts)
    if (t.requires_grad()) return true;
  return false;
}

}  // namespace

std::size_t shape_numel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("negative dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

Tensor::Tensor(std::vector<int> shape, bool requires_grad) {
  node_ = make_node(std::move(shape), requires_grad);
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data,
               bool requires_grad) {
  node_ = std::make_shared<Node>();
  node_->shape = std::move(shape);
  if (data.size() != shape_numel(node_->shape))
    throw std::invalid_argument("data length " + std::to_string(data.size()) +
                                " does not match shape " +
                                shape_str(node_->shape));
  node_->value = std::move(data);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::wrap(std::shared_ptr<Node> n) {
  Tensor t;
  t.node_ = std::move(n);
  return t;
}

void backward(const Tensor& root, double seed) {
  if (root.size() != 1)
    throw std::invalid_argument("backward requires a scalar root, got " +
                                shape_str(root.shape()));
  // Iterative post-order DFS to get a topological order.
  std::vector<Tensor::Node*> order;
  std::unordered_set<Tensor::Node*> visited;
  struct Frame {
    Tensor::Node* n;
    std::size_t next_parent;
  };
  std::vector<Frame> stack;
  stack.push_back({root.node().get(), 0});
  visited.insert(root.node().get());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.n->parents.size()) {
      Tensor::Node* p = f.n->parents[f.next_parent++].get();
      if (visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(f.n);
      stack.pop_back();
    }
  }
  root.node()->ensure_grad();
  root.node()->grad[0] += seed;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Tensor::Node* n = *it;
    if (n->backprop && n->grad.size() == n->value.size()) n->backprop(*n);
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
    throw std::invalid_argument("matmul shape mismatch: " +
                                shape_str(a.shape()) + " x " +
                                shape_str(b.shape()));
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  auto out = make_node({m, n}, any_grad({a, b}));
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = out->value.data();
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l < k; ++l) {
      const double av = pa[i * k + l];
      if (av == 0.0) continue;
      const double* brow = pb + l * n;
      double* crow = pc + i * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  check_finite(*out, "matmul");
  if (out->requires_grad) {
    auto an = a.node(), bn = b.node();
    out->parents = {an, bn};
    out->backprop = [an, bn, m, k, n](Tensor::Node& self) {
      const double* g = self.grad.data();
      if (an->requires_grad) {
        an->ensure_grad();
        // dA = dC * B^T
        for (int i = 0; i < m; ++i)
          for (int l = 0; l < k; ++l) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j)
              acc += g[i * n + j] * bn->value[l * n + j];
            an->grad[i * k + l] += acc;
          }
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        // dB = A^T * dC
        for (int i = 0; i < m; ++i)
          for (int l = 0; l < k; ++l) {
            const double av = an->value[i * k + l];
            if (av == 0.0) continue;
            for (int j = 0; j < n; ++j)
              bn->grad[l * n + j] += av * g[i * n + j];
          }
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2)
    throw std::invalid_argument("transpose expects rank-2, got " +
                                shape_str(a.shape()));
  const int m = a.dim(0), n = a.dim(1);
  auto out = make_node({n, m}, a.requires_grad());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out->value[j * m + i] = a.data()[i * n + j];
  if (out->requires_grad) {
    auto an = a.node();
    out->parents = {an};
    out->backprop = [an, m, n](Tensor::Node& self) {
      an->ensure_grad();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
          an->grad[i * n + j] += self.grad[j * m + i];
    };
  }
  return Tensor::wrap(out);
}

Tensor softmax_rows(const Tensor& m) {
  if (m.rank() != 2)
    throw std::invalid_argument("softmax_rows expects rank-2, got " +
                                shape_str(m.shape()));
  const int r = m.dim(0), s = m.dim(1);
  auto out = make_node({r, s}, m.requires_grad());
  for (int i = 0; i < r; ++i) {
    const double* row = m.data().data() + static_cast<std::size_t>(i) * s;
    double* orow = out->value.data() + static_cast<std::size_t>(i) * s;
    double mx = row[0];
    for (int j = 1; j < s; ++j) mx = std::max(mx, row[j]);
    double denom = 0.0;
    for (int j = 0; j < s; ++j) {
      orow[j] = std::exp(row[j] - mx);
      denom += orow[j];
    }
    for (int j = 0; j < s; ++j) orow[j] /= denom;
  }
  check_finite(*out, "softmax_rows");
  if (out->requires_grad) {
    auto mn = m.node();
    out->parents = {mn};
    out->backprop = [mn, r, s](Tensor::Node& self) {
      mn->ensure_grad();
      for (int i = 0; i < r; ++i) {
        const double* y = self.value.data() + static_cast<std::size_t>(i) * s;
        const double* g = self.grad.data() + static_cast<std::size_t>(i) * s;
        double dot = 0.0;
        for (int j = 0; j < s; ++j) dot += y[j] * g[j];
        for (int j = 0; j < s; ++j)
          mn->grad[static_cast<std::size_t>(i) * s + j] += y[j] * (g[j] - dot);
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor conv2d(const Tensor& x, const Tensor& kernel, const Tensor& bias,
              int stride, int pad) {
  if (x.rank() != 3 || kernel.rank() != 4)
    throw std::invalid_argument("conv2d expects x[C,H,W], kernel[Co,Ci,k,k]");
  const int ci = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int co = kernel.dim(0), kci = kernel.dim(1), kh = kernel.dim(2),
            kw = kernel.dim(3);
  if (kci != ci)
    throw std::invalid_argument("conv2d channel mismatch: x " +
                                shape_str(x.shape()) + " kernel " +
                                shape_str(kernel.shape()));
  if (kh > h + 2 * pad || kw > w + 2 * pad)
    throw std::invalid_argument("conv2d kernel larger than padded input");
  if (bias.size() != static_cast<std::size_t>(co))
    throw std::invalid_argument("conv2d bias size mismatch");
  const int oh = (h + 2 * pad - kh) / stride + 1;
  const int ow = (w + 2 * pad - kw) / stride + 1;
  auto out = make_node({co, oh, ow}, any_grad({x, kernel, bias}));

  const double* px = x.data().data();
  const double* pk = kernel.data().data();
  double* po = out->value.data();
  for (int oc = 0; oc < co; ++oc) {
    const double b = bias.data()[oc];
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        double acc = b;
        const int iy0 = oy * stride - pad, ix0 = ox * stride - pad;
        for (int ic = 0; ic < ci; ++ic)
          for (int ky = 0; ky < kh; ++ky) {
            const int iy = iy0 + ky;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < kw; ++kx) {
              const int ix = ix0 + kx;
              if (ix < 0 || ix >= w) continue;
              acc += px[(ic * h + iy) * w + ix] *
                     pk[((oc * ci + ic) * kh + ky) * kw + kx];
            }
          }
        po[(oc * oh + oy) * ow + ox] = acc;
      }
  }
  check_finite(*out, "conv2d");
  if (out->requires_grad) {
    auto xn = x.node(), kn = kernel.node(), bn = bias.node();
    out->parents = {xn, kn, bn};
    out->backprop = [=](Tensor::Node& self) {
      if (xn->requires_grad) xn->ensure_grad();
      if (kn->requires_grad) kn->ensure_grad();
      if (bn->requires_grad) bn->ensure_grad();
      const double* g = self.grad.data();
      for (int oc = 0; oc < co; ++oc)
        for (int oy = 0; oy < oh; ++oy)
          for (int ox = 0; ox < ow; ++ox) {
            const double gv = g[(oc * oh + oy) * ow + ox];
            if (gv == 0.0) continue;
            if (bn->requires_grad) bn->grad[oc] += gv;
            const int iy0 = oy * stride - pad, ix0 = ox * stride - pad;
            for (int ic = 0; ic < ci; ++ic)
              for (int ky = 0; ky < kh; ++ky) {
                const int iy = iy0 + ky;
                if (iy < 0 || iy >= h) continue;
                for (int kx = 0; kx < kw; ++kx) {
                  const int ix = ix0 + kx;
                  if (ix < 0 || ix >= w) continue;
                  const std::size_t xi = (ic * h + iy) * w + ix;
                  const std::size_t wi = ((oc * ci + ic) * kh + ky) * kw + kx;
                  if (xn->requires_grad)
                    xn->grad[xi] += gv * kn->value[wi];
                  if (kn->requires_grad)
                    kn->grad[wi] += gv * xn->value[xi];
                }
              }
          }
    };
  }
  return Tensor::wrap(out);
}

namespace {

// align-corners-false sample position and lerp weights for one axis
struct LerpCoord {
  int i0, i1;
  double w1;  // weight of i1; weight of i0 is 1-w1
};

LerpCoord lerp_coord(int out_i, int in_size, int out_size) {
  const double sc = static_cast<double>(in_size) / out_size;
  double src = (out_i + 0.5) * sc - 0.5;
  src = std::clamp(src, 0.0, static_cast<double>(in_size - 1));
  const int i0 = static_cast<int>(std::floor(src));
  const int i1 = std::min(i0 + 1, in_size - 1);
  return {i0, i1, src - i0};
}

}  // namespace

Tensor bilinear_resize(const Tensor& x, int out_h, int out_w) {
  if (x.rank() != 3)
    throw std::invalid_argument("bilinear_resize expects [C,H,W]");
  if (out_h < 1 || out_w < 1)
    throw std::invalid_argument("bilinear_resize output size must be >= 1");
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (out_h == h && out_w == w) {
    // exact identity
    Tensor out(x.shape(), x.data(), x.requires_grad());
    if (x.requires_grad()) {
      auto xn = x.node();
      out.node()->parents = {xn};
      out.node()->backprop = [xn](Tensor::Node& self) {
        xn->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
          xn->grad[i] += self.grad[i];
      };
    }
    return out;
  }
  auto out = make_node({c, out_h, out_w}, x.requires_grad());
  std::vector<LerpCoord> ys(out_h), xs(out_w);
  for (int i = 0; i < out_h; ++i) ys[i] = lerp_coord(i, h, out_h);
  for (int j = 0; j < out_w; ++j) xs[j] = lerp_coord(j, w, out_w);
  for (int ch = 0; ch < c; ++ch) {
    const double* src = x.data().data() + static_cast<std::size_t>(ch) * h * w;
    double* dst = out->value.data() +
                  static_cast<std::size_t>(ch) * out_h * out_w;
    for (int i = 0; i < out_h; ++i)
      for (int j = 0; j < out_w; ++j) {
        const auto& yc = ys[i];
        const auto& xc = xs[j];
        const double v00 = src[yc.i0 * w + xc.i0];
        const double v01 = src[yc.i0 * w + xc.i1];
        const double v10 = src[yc.i1 * w + xc.i0];
        const double v11 = src[yc.i1 * w + xc.i1];
        dst[i * out_w + j] = (1 - yc.w1) * ((1 - xc.w1) * v00 + xc.w1 * v01) +
                             yc.w1 * ((1 - xc.w1) * v10 + xc.w1 * v11);
      }
  }
  if (out->requires_grad) {
    auto xn = x.node();
    out->parents = {xn};
    out->backprop = [xn, ys, xs, c, h, w, out_h, out_w](Tensor::Node& self) {
      xn->ensure_grad();
      for (int ch = 0; ch < c; ++ch) {
        double* gx = xn->grad.data() + static_cast<std::size_t>(ch) * h * w;
        const double* g = self.grad.data() +
                          static_cast<std::size_t>(ch) * out_h * out_w;
        for (int i = 0; i < out_h; ++i)
          for (int j = 0; j < out_w; ++j) {
            const auto& yc = ys[i];
            const auto& xc = xs[j];
            const double gv = g[i * out_w + j];
            gx[yc.i0 * w + xc.i0] += gv * (1 - yc.w1) * (1 - xc.w1);
            gx[yc.i0 * w + xc.i1] += gv * (1 - yc.w1) * xc.w1;
            gx[yc.i1 * w + xc.i0] += gv * yc.w1 * (1 - xc.w1);
            gx[yc.i1 * w + xc.i1] += gv * yc.w1 * xc.w1;
          }
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw std::invalid_argument("add shape mismatch: " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
  auto out = make_node(a.shape(), any_grad({a, b}));
  for (std::size_t i = 0; i < a.size(); ++i)
    out->value[i] = a.data()[i] + b.data()[i];
  if (out->requires_grad) {
    auto an = a.node(), bn = b.node();
    out->parents = {an, bn};
    out->backprop = [an, bn](Tensor::Node& self) {
      for (auto* n : {an.get(), bn.get()}) {
        if (!n->requires_grad) continue;
        n->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
          n->grad[i] += self.grad[i];
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw std::invalid_argument("mul shape mismatch: " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
  auto out = make_node(a.shape(), any_grad({a, b}));
  for (std::size_t i = 0; i < a.size(); ++i)
    out->value[i] = a.data()[i] * b.data()[i];
  if (out->requires_grad) {
    auto an = a.node(), bn = b.node();
    out->parents = {an, bn};
    out->backprop = [an, bn](Tensor::Node& self) {
      if (an->requires_grad) {
        an->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
          an->grad[i] += self.grad[i] * bn->value[i];
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
          bn->grad[i] += self.grad[i] * an->value[i];
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor scale(const Tensor& a, double s) {
  auto out = make_node(a.shape(), a.requires_grad());
  for (std::size_t i = 0; i < a.size(); ++i) out->value[i] = a.data()[i] * s;
  if (out->requires_grad) {
    auto an = a.node();
    out->parents = {an};
    out->backprop = [an, s](Tensor::Node& self) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        an->grad[i] += self.grad[i] * s;
    };
  }
  return Tensor::wrap(out);
}

Tensor leaky_relu(const Tensor& a, double slope) {
  auto out = make_node(a.shape(), a.requires_grad());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = a.data()[i];
    out->value[i] = v >= 0 ? v : slope * v;
  }
  if (out->requires_grad) {
    auto an = a.node();
    out->parents = {an};
    out->backprop = [an, slope](Tensor::Node& self) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        an->grad[i] += self.grad[i] * (an->value[i] >= 0 ? 1.0 : slope);
    };
  }
  return Tensor::wrap(out);
}

Tensor sigmoid(const Tensor& a) {
  auto out = make_node(a.shape(), a.requires_grad());
  for (std::size_t i = 0; i < a.size(); ++i)
    out->value[i] = 1.0 / (1.0 + std::exp(-a.data()[i]));
  if (out->requires_grad) {
    auto an = a.node();
    out->parents = {an};
    out->backprop = [an](Tensor::Node& self) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        const double y = self.value[i];
        an->grad[i] += self.grad[i] * y * (1.0 - y);
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty input");
  const int rows = parts[0].dim(0);
  int cols = 0;
  bool rg = false;
  for (const auto& p : parts) {
    if (p.rank() != 2 || p.dim(0) != rows)
      throw std::invalid_argument("concat_cols row mismatch");
    cols += p.dim(1);
    rg = rg || p.requires_grad();
  }
  auto out = make_node({rows, cols}, rg);
  int off = 0;
  for (const auto& p : parts) {
    const int pc = p.dim(1);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < pc; ++j)
        out->value[static_cast<std::size_t>(i) * cols + off + j] =
            p.data()[static_cast<std::size_t>(i) * pc + j];
    off += pc;
  }
  if (rg) {
    std::vector<std::shared_ptr<Tensor::Node>> ps;
    for (const auto& p : parts) ps.push_back(p.node());
    out->parents = ps;
    out->backprop = [ps, rows, cols](Tensor::Node& self) {
      int off = 0;
      for (auto& pn : ps) {
        const int pc = pn->shape[1];
        if (pn->requires_grad) {
          pn->ensure_grad();
          for (int i = 0; i < rows; ++i)
            for (int j = 0; j < pc; ++j)
              pn->grad[static_cast<std::size_t>(i) * pc + j] +=
                  self.grad[static_cast<std::size_t>(i) * cols + off + j];
        }
        off += pc;
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor add_bias_cols(const Tensor& a, const Tensor& bias) {
  if (a.rank() != 2 || bias.rank() != 1 || bias.dim(0) != a.dim(1))
    throw std::invalid_argument("add_bias_cols shape mismatch: " +
                                shape_str(a.shape()) + " + " +
                                shape_str(bias.shape()));
  const int m = a.dim(0), n = a.dim(1);
  auto out = make_node({m, n}, any_grad({a, bias}));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      out->value[static_cast<std::size_t>(i) * n + j] =
          a.data()[static_cast<std::size_t>(i) * n + j] + bias.data()[j];
  if (out->requires_grad) {
    auto an = a.node(), bn = bias.node();
    out->parents = {an, bn};
    out->backprop = [an, bn, m, n](Tensor::Node& self) {
      if (an->requires_grad) {
        an->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
          an->grad[i] += self.grad[i];
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < n; ++j)
            bn->grad[j] += self.grad[static_cast<std::size_t>(i) * n + j];
      }
    };
  }
  return Tensor::wrap(out);
}

Tensor reshape(const Tensor& a, std::vector<int> shape) {
  if (shape_numel(shape) != a.size())
    throw std::invalid_argument("reshape size mismatch: " +
                                shape_str(a.shape()) + " -> " +
                                shape_str(shape));
  Tensor out(shape, a.data(), a.requires_grad());
  if (a.requires_grad()) {
    auto an = a.node();
    out.node()->parents = {an};
    out.node()->backprop = [an](Tensor::Node& self) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        an->grad[i] += self.grad[i];
    };
  }
  return out;
}

Tensor sum(const Tensor& a) {
  auto out = make_node({1}, a.requires_grad());
  out->value[0] = std::accumulate(a.data().begin(), a.data().end(), 0.0);
  if (out->requires_grad) {
    auto an = a.node();
    out->parents = {an};
    out->backprop = [an](Tensor::Node& self) {
      an->ensure_grad();
      for (std::size_t i = 0; i < an->grad.size(); ++i)
        an->grad[i] += self.grad[0];
    };
  }
  return Tensor::wrap(out);
}

Tensor mul_const(const Tensor& a, std::vector<double> coeff) {
  if (coeff.size() != a.size())
    throw std::invalid_argument("mul_const coefficient size mismatch");
  auto out = make_node(a.shape(), a.requires_grad());
  for (std::size_t i = 0; i < a.size(); ++i)
    out->value[i] = a.data()[i] * coeff[i];
  if (out->requires_grad) {
    auto an = a.node();
    auto c = std::make_shared<std::vector<double>>(std::move(coeff));
    out->parents = {an};
    out->backprop = [an, c](Tensor::Node& self) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        an->grad[i] += self.grad[i] * (*c)[i];
    };
  }
  return Tensor::wrap(out);
}

Tensor bce_mean(const Tensor& pred, const std::vector<double>& target) {
  if (target.size() != pred.size())
    throw std::invalid_argument("bce_mean target size mismatch: pred " +
                                shape_str(pred.shape()));
  constexpr double kEps = 1e-7;
  const std::size_t n = pred.size();
  auto out = make_node({1}, pred.requires_grad());
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::clamp(pred.data()[i], kEps, 1.0 - kEps);
    const double y = target[i];
    loss += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  out->value[0] = loss / static_cast<double>(n);
  check_finite(*out, "bce_mean");
  if (out->requires_grad) {
    auto pn = pred.node();
    auto tgt = std::make_shared<std::vector<double>>(target);
    out->parents = {pn};
    out->backprop = [pn, tgt, n](Tensor::Node& self) {
      pn->ensure_grad();
      const double g = self.grad[0] / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double p = pn->value[i];
        if (p < kEps || p > 1.0 - kEps) continue;  // flat in clamp region
        const double y = (*tgt)[i];
        pn->grad[i] += g * ((1.0 - y) / (1.0 - p) - y / p);
      }
    };
  }
  return Tensor::wrap(out);
}

double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor& x,
                  double eps) {
  return grad_check_param([&f, &x]() { return f(x); }, x, eps);
}

double grad_check_param(const std::function<Tensor()>& f, Tensor& param,
                        double eps) {
  param.zero_grad();
  Tensor y = f();
  if (!std::isfinite(y.item()))
    throw std::runtime_error("grad_check: non-finite function value");
  backward(y);
  std::vector<double> analytic = param.grad();
  if (analytic.size() != param.size())
    analytic.assign(param.size(), 0.0);

  double max_err = 0.0;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double saved = param.data()[i];
    param.data()[i] = saved + eps;
    const double fp = f().item();
    param.data()[i] = saved - eps;
    const double fm = f().item();
    param.data()[i] = saved;
    const double numeric = (fp - fm) / (2.0 * eps);
    const double a = analytic[i];
    const double err = std::abs(a - numeric) /
                       std::max({1.0, std::abs(a), std::abs(numeric)});
    max_err = std::max(max_err, err);
  }
  param.zero_grad();
  return max_err;
}

}  // namespace adnet
