#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace evoflow::ad {

// Dense row-major matrix of doubles. Row vectors are 1 x n.
struct Tensor {
  int rows = 0, cols = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(size_t(r) * size_t(c), 0.0) {}
  static Tensor row(std::vector<double> data) {
    Tensor t;
    t.rows = 1;
    t.cols = int(data.size());
    t.v = std::move(data);
    return t;
  }
  double& at(int i, int j) { return v[size_t(i) * cols + j]; }
  double at(int i, int j) const { return v[size_t(i) * cols + j]; }
  size_t size() const { return v.size(); }
};

// Reverse-mode tape over tensor operations. Node creation order is a valid
// topological order, so backward is a single reverse sweep. rollback()
// truncates the tape to a mark, which is how the time-conditioned part of
// the rate model is re-evaluated cheaply on top of a cached encoder prefix.
class Tape {
 public:
  using NodeId = int;

  NodeId constant(Tensor value);
  // Leaf backed by externally owned float32 storage; gradients are
  // accumulated per-parameter and read back via param_grad().
  NodeId param(std::span<const float> data, int rows, int cols, int slot);

  NodeId matmul(NodeId a, NodeId b);
  NodeId transpose(NodeId a);
  NodeId add(NodeId a, NodeId b);            // same shape
  NodeId sub(NodeId a, NodeId b);            // same shape
  NodeId mul(NodeId a, NodeId b);            // elementwise, same shape
  NodeId add_rowvec(NodeId a, NodeId row);   // broadcast 1 x c over rows
  NodeId mul_rowvec(NodeId a, NodeId row);   // broadcast 1 x c over rows
  NodeId scale(NodeId a, double s);
  NodeId add_const(NodeId a, double c);
  NodeId gelu(NodeId a);       // exact erf form
  NodeId tanh_n(NodeId a);
  NodeId softplus(NodeId a);   // numerically stable
  NodeId sigmoid(NodeId a);
  NodeId log_n(NodeId a);
  NodeId softmax_rows(NodeId a);
  NodeId layer_norm_rows(NodeId a, NodeId gain, NodeId bias, double eps = 1e-5);
  NodeId gather_rows(NodeId table, std::vector<int> idx);
  NodeId slice_rows(NodeId a, int r0, int r1);
  NodeId slice_cols(NodeId a, int c0, int c1);
  NodeId concat_cols(std::span<const NodeId> parts);
  // Rows shifted by delta (positive = toward higher indices), zero-filled.
  NodeId shift_rows(NodeId a, int delta);
  NodeId sum_all(NodeId a);  // 1 x 1

  const Tensor& val(NodeId id) const { return nodes_[size_t(id)].val; }

  size_t mark() const { return nodes_.size(); }
  void rollback(size_t mark);

  // Reverse sweep from seed tensors placed on the given nodes. Parameter
  // gradients accumulate into an internal per-slot buffer; read them out
  // with param_grad(). reset_param_grads() clears the buffer.
  void backward(std::span<const std::pair<NodeId, Tensor>> seeds);
  void backward_scalar(NodeId scalar_node, double seed = 1.0);

  void configure_param_grads(const std::vector<size_t>& slot_sizes);
  void reset_param_grads();
  std::span<const double> param_grad(int slot) const;

 private:
  struct Node {
    Tensor val;
    Tensor grad;
    std::function<void(Tape&, Node&)> back;
    int param_slot = -1;
  };

  NodeId push(Tensor val, std::function<void(Tape&, Node&)> back);
  Node& node(NodeId id) { return nodes_[size_t(id)]; }

  std::vector<Node> nodes_;
  std::vector<std::vector<double>> param_grads_;
};

}  // namespace evoflow::ad
