#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <functional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "geom.hpp"

namespace bgs::ad {

// Dense row-major 2-D tensor of 64-bit floats. Vectors are 1xC, scalars 1x1.
struct Tensor {
  int rows = 0, cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c) { return Tensor(r, c); }
  static Tensor full(int r, int c, double v) {
    Tensor t(r, c);
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }
  static Tensor scalar(double v) { return full(1, 1, v); }
  static Tensor row(const std::vector<double>& v) {
    Tensor t(1, static_cast<int>(v.size()));
    t.data = v;
    return t;
  }
  static Tensor column(const std::vector<double>& v) {
    Tensor t(static_cast<int>(v.size()), 1);
    t.data = v;
    return t;
  }

  double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
  int size() const { return rows * cols; }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
};

// Handle into the active graph; carries shape for convenience.
struct Var {
  int id = -1;
  int rows = 0, cols = 0;
  bool valid() const { return id >= 0; }
};

// Reverse-mode tape. Ops execute eagerly and record a backward closure; the
// recording order is the topological order, so backward() is a single reverse
// sweep. Every forward result is checked finite (NaN/Inf raises a numeric
// error). Single-threaded per graph.
class Graph {
 public:
  Var leaf(const Tensor& value, bool requires_grad);
  Var constant(Tensor value);
  Var constant_scalar(double v) { return constant(Tensor::scalar(v)); }

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double s);
  Var add_scalar(Var a, double s);

  // Row-wise affine map: x [N x a] * w [a x b] + bias [1 x b] (bias optional).
  Var linear(Var x, Var w, Var bias);

  Var relu(Var x);
  Var sigmoid(Var x);
  Var tanh(Var x);
  // clamp to [0,1]; gradient passes unchanged inside the bounds, 0 outside.
  Var clamp01(Var x);

  Var max_pool_rows(Var x);             // [N x c] -> [1 x c], first-index ties
  Var concat_cols(Var a, Var b);        // [N x c1],[N x c2] -> [N x (c1+c2)]
  Var repeat_row(Var row, int n);       // [1 x c] -> [n x c]
  Var scale_rows(Var x, Var s);         // x [N x c] scaled by s [N x 1]
  Var sum(Var x);                       // -> [1 x 1]

  // Mean over rows of -log softmax(logits_i)[labels_i].
  Var cross_entropy_mean(Var logits, const std::vector<uint8_t>& labels);

  // For each row i in `support`: interpolate `field` at cloud[i] + disp[i]
  // over the k nearest cloud points, weights 1/(dist+eps). Rows outside the
  // support are 0. Differentiable in both field values and displacements.
  Var interp_field(Var field, Var disp, const PointCloud& cloud,
                   const std::vector<int>& support, int k, double eps);

  // Softmax(field/temp)-weighted position expectation over `side` indices.
  Var soft_select(Var field, const std::vector<int>& side,
                  const PointCloud& cloud, double temp);

  // Euclidean distance of a [1 x 3] position from a line.
  Var line_distance(Var p, const GravityLine& line);

  void backward(Var scalar_root);

  const Tensor& value(Var v) const;
  const Tensor& grad(Var v);  // zeros if the node was never reached
  int node_count() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool grad_touched = false;
    std::function<void(Graph&)> backprop;
  };

  std::deque<Node> nodes_;

  Var push(Tensor value, bool requires_grad, std::function<void(Graph&)> bp);
  Node& node(int id) { return nodes_[static_cast<size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
  Tensor& grad_buffer(int id);
  void accumulate(int id, const Tensor& contribution);
  bool wants_grad(Var v) const { return node(v.id).requires_grad; }
};

// Parameter-to-leaf bookkeeping used by net forward passes so training code
// can read out gradients for each bound tensor.
struct Bindings {
  bool trainable = true;
  std::vector<std::pair<Tensor*, Var>> entries;

  Var bind(Graph& g, Tensor& t) {
    Var v = g.leaf(t, trainable);
    if (trainable) entries.emplace_back(&t, v);
    return v;
  }
};

// Max over all parameter coordinates of
// |analytic - central difference| / (|central difference| + 1e-8).
// `build` must construct the loss from the *current* values of the tensors it
// binds; it is re-invoked for every probe.
double grad_check(const std::function<Var(Graph&, Bindings&)>& build,
                  double eps);

// Plain (non-tape) helpers shared with inference paths.
Tensor softmax_rows(const Tensor& logits);

}  // namespace bgs::ad
