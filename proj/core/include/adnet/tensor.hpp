#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace adnet {

// Dense row-major tensor of doubles with reverse-mode autodiff.
// A Tensor is a cheap handle onto a shared node; ops build a graph of
// nodes that backward() replays in reverse topological order.
class Tensor {
 public:
  struct Node {
    std::vector<int> shape;
    std::vector<double> value;
    std::vector<double> grad;  // sized lazily, only when needed
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Propagates this node's grad into its parents' grads.
    std::function<void(Node&)> backprop;

    std::size_t size() const { return value.size(); }
    void ensure_grad() {
      if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    }
  };

  Tensor() = default;
  Tensor(std::vector<int> shape, bool requires_grad = false);
  Tensor(std::vector<int> shape, std::vector<double> data,
         bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& shape() const { return node_->shape; }
  int dim(int i) const { return node_->shape[static_cast<std::size_t>(i)]; }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  std::size_t size() const { return node_->value.size(); }

  std::vector<double>& data() { return node_->value; }
  const std::vector<double>& data() const { return node_->value; }
  std::vector<double>& grad() { return node_->grad; }
  const std::vector<double>& grad() const { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return node_->grad.size() == node_->value.size(); }
  void zero_grad() {
    if (node_->requires_grad) node_->grad.assign(node_->value.size(), 0.0);
  }

  double item() const { return node_->value.at(0); }

  std::shared_ptr<Node> node() const { return node_; }
  static Tensor wrap(std::shared_ptr<Node> n);

 private:
  std::shared_ptr<Node> node_;
};

std::size_t shape_numel(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

// Runs reverse-mode accumulation from a scalar root. Grads of leaf tensors
// with requires_grad accumulate (are not cleared first), so per-sample
// backward passes within a batch sum naturally.
void backward(const Tensor& root, double seed = 1.0);

// --- forward/backward ops ---

Tensor matmul(const Tensor& a, const Tensor& b);        // [m,k]x[k,n]->[m,n]
Tensor transpose(const Tensor& a);                      // [m,n]->[n,m]
Tensor softmax_rows(const Tensor& m);                   // row-wise, stabilized
Tensor conv2d(const Tensor& x, const Tensor& kernel, const Tensor& bias,
              int stride, int pad);                     // x:[Cin,H,W] k:[Cout,Cin,k,k]
Tensor bilinear_resize(const Tensor& x, int out_h, int out_w);  // x:[C,H,W]
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);           // elementwise
Tensor scale(const Tensor& a, double s);
Tensor leaky_relu(const Tensor& a, double slope);
Tensor sigmoid(const Tensor& a);
Tensor concat_cols(const std::vector<Tensor>& parts);   // [r,c_i] -> [r,sum c_i]
Tensor add_bias_cols(const Tensor& a, const Tensor& bias);  // [m,n]+[n] per row
Tensor reshape(const Tensor& a, std::vector<int> shape);
Tensor sum(const Tensor& a);                            // -> scalar [1]
// Elementwise multiply by a fixed (non-differentiated) coefficient vector;
// used for inverted dropout.
Tensor mul_const(const Tensor& a, std::vector<double> coeff);
// Mean binary cross-entropy against a fixed 0/1 target, predictions clamped
// to [1e-7, 1-1e-7]. -> scalar [1]
Tensor bce_mean(const Tensor& pred, const std::vector<double>& target);

// Max relative error between analytic gradients of f at x and central
// differences: max_i |a_i - n_i| / max(1, |a_i|, |n_i|).
double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor& x,
                  double eps = 1e-5);
// Same check but perturbing `param` while `f` is evaluated with no argument
// (param captured); used for model weights.
double grad_check_param(const std::function<Tensor()>& f, Tensor& param,
                        double eps = 1e-5);

}  // namespace adnet
