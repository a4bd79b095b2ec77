#include "evoflow/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace evoflow::ad {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* where) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument(std::string(where) + ": shape mismatch");
}

double gelu_fwd(double x) { return 0.5 * x * (1.0 + std::erf(x * 0.7071067811865475244)); }

double gelu_grad(double x) {
  const double phi = std::exp(-0.5 * x * x) * 0.3989422804014326779;  // N(0,1) pdf
  return 0.5 * (1.0 + std::erf(x * 0.7071067811865475244)) + x * phi;
}

double softplus_fwd(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid_fwd(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

Tape::NodeId Tape::push(Tensor val, std::function<void(Tape&, Node&)> back) {
  Node n;
  n.val = std::move(val);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return NodeId(nodes_.size() - 1);
}

Tape::NodeId Tape::constant(Tensor value) { return push(std::move(value), nullptr); }

Tape::NodeId Tape::param(std::span<const float> data, int rows, int cols, int slot) {
  if (data.size() != size_t(rows) * size_t(cols))
    throw std::invalid_argument("param: data size does not match shape");
  Tensor t(rows, cols);
  for (size_t i = 0; i < data.size(); ++i) t.v[i] = double(data[i]);
  const NodeId id = push(std::move(t), nullptr);
  nodes_.back().param_slot = slot;
  return id;
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (A.cols != B.rows) throw std::invalid_argument("matmul: inner dimension mismatch");
  Tensor C(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      const double aik = A.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < B.cols; ++j) C.at(i, j) += aik * B.at(k, j);
    }
  return push(std::move(C), [a, b](Tape& t, Node& n) {
    const Tensor& A = t.val(a);
    const Tensor& B = t.val(b);
    Tensor& ga = t.node(a).grad;
    Tensor& gb = t.node(b).grad;
    // dA = dC * B^T, dB = A^T * dC
    for (int i = 0; i < A.rows; ++i)
      for (int j = 0; j < B.cols; ++j) {
        const double g = n.grad.at(i, j);
        if (g == 0.0) continue;
        for (int k = 0; k < A.cols; ++k) {
          ga.at(i, k) += g * B.at(k, j);
          gb.at(k, j) += A.at(i, k) * g;
        }
      }
  });
}

Tape::NodeId Tape::transpose(NodeId a) {
  const Tensor& A = val(a);
  Tensor C(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) C.at(j, i) = A.at(i, j);
  return push(std::move(C), [a](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    for (int i = 0; i < n.grad.rows; ++i)
      for (int j = 0; j < n.grad.cols; ++j) ga.at(j, i) += n.grad.at(i, j);
  });
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  check_same_shape(A, B, "add");
  Tensor C = A;
  for (size_t i = 0; i < C.size(); ++i) C.v[i] += B.v[i];
  return push(std::move(C), [a, b](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    Tensor& gb = t.node(b).grad;
    for (size_t i = 0; i < n.grad.size(); ++i) {
      ga.v[i] += n.grad.v[i];
      gb.v[i] += n.grad.v[i];
    }
  });
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  check_same_shape(A, B, "sub");
  Tensor C = A;
  for (size_t i = 0; i < C.size(); ++i) C.v[i] -= B.v[i];
  return push(std::move(C), [a, b](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    Tensor& gb = t.node(b).grad;
    for (size_t i = 0; i < n.grad.size(); ++i) {
      ga.v[i] += n.grad.v[i];
      gb.v[i] -= n.grad.v[i];
    }
  });
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  check_same_shape(A, B, "mul");
  Tensor C = A;
  for (size_t i = 0; i < C.size(); ++i) C.v[i] *= B.v[i];
  return push(std::move(C), [a, b](Tape& t, Node& n) {
    const Tensor& A = t.val(a);
    const Tensor& B = t.val(b);
    Tensor& ga = t.node(a).grad;
    Tensor& gb = t.node(b).grad;
    for (size_t i = 0; i < n.grad.size(); ++i) {
      ga.v[i] += n.grad.v[i] * B.v[i];
      gb.v[i] += n.grad.v[i] * A.v[i];
    }
  });
}

Tape::NodeId Tape::add_rowvec(NodeId a, NodeId row) {
  const Tensor& A = val(a);
  const Tensor& R = val(row);
  if (R.rows != 1 || R.cols != A.cols) throw std::invalid_argument("add_rowvec: bad row shape");
  Tensor C = A;
  for (int i = 0; i < C.rows; ++i)
    for (int j = 0; j < C.cols; ++j) C.at(i, j) += R.at(0, j);
  return push(std::move(C), [a, row](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    Tensor& gr = t.node(row).grad;
    for (int i = 0; i < n.grad.rows; ++i)
      for (int j = 0; j < n.grad.cols; ++j) {
        ga.at(i, j) += n.grad.at(i, j);
        gr.at(0, j) += n.grad.at(i, j);
      }
  });
}

Tape::NodeId Tape::mul_rowvec(NodeId a, NodeId row) {
  const Tensor& A = val(a);
  const Tensor& R = val(row);
  if (R.rows != 1 || R.cols != A.cols) throw std::invalid_argument("mul_rowvec: bad row shape");
  Tensor C = A;
  for (int i = 0; i < C.rows; ++i)
    for (int j = 0; j < C.cols; ++j) C.at(i, j) *= R.at(0, j);
  return push(std::move(C), [a, row](Tape& t, Node& n) {
    const Tensor& A = t.val(a);
    const Tensor& R = t.val(row);
    Tensor& ga = t.node(a).grad;
    Tensor& gr = t.node(row).grad;
    for (int i = 0; i < n.grad.rows; ++i)
      for (int j = 0; j < n.grad.cols; ++j) {
        ga.at(i, j) += n.grad.at(i, j) * R.at(0, j);
        gr.at(0, j) += n.grad.at(i, j) * A.at(i, j);
      }
  });
}

Tape::NodeId Tape::scale(NodeId a, double s) {
  Tensor C = val(a);
  for (double& x : C.v) x *= s;
  return push(std::move(C), [a, s](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    for (size_t i = 0; i < n.grad.size(); ++i) ga.v[i] += n.grad.v[i] * s;
  });
}

Tape::NodeId Tape::add_const(NodeId a, double c) {
  Tensor C = val(a);
  for (double& x : C.v) x += c;
  return push(std::move(C), [a](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    for (size_t i = 0; i < n.grad.size(); ++i) ga.v[i] += n.grad.v[i];
  });
}

Tape::NodeId Tape::gelu(NodeId a) {
  Tensor C = val(a);
  for (double& x : C.v) x = gelu_fwd(x);
  return push(std::move(C), [a](Tape& t, Node& n) {
    const Tensor& A = t.val(a);
    Tensor& ga = t.node(a).grad;
    for (size_t i = 0; i < n.grad.size(); ++i) ga.v[i] += n.grad.v[i] * gelu_grad(A.v[i]);
  });
}

Tape::NodeId Tape::tanh_n(NodeId a) {
  Tensor C = val(a);
  for (double& x : C.v) x = std::tanh(x);
  return push(std::move(C), [a](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    for (size_t i = 0; i < n.grad.size(); ++i)
      ga.v[i] += n.grad.v[i] * (1.0 - n.val.v[i] * n.val.v[i]);
  });
}

Tape::NodeId Tape::softplus(NodeId a) {
  Tensor C = val(a);
  for (double& x : C.v) x = softplus_fwd(x);
  return push(std::move(C), [a](Tape& t, Node& n) {
    const Tensor& A = t.val(a);
    Tensor& ga = t.node(a).grad;
    for (size_t i = 0; i < n.grad.size(); ++i) ga.v[i] += n.grad.v[i] * sigmoid_fwd(A.v[i]);
  });
}

Tape::NodeId Tape::sigmoid(NodeId a) {
  Tensor C = val(a);
  for (double& x : C.v) x = sigmoid_fwd(x);
  return push(std::move(C), [a](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    for (size_t i = 0; i < n.grad.size(); ++i)
      ga.v[i] += n.grad.v[i] * n.val.v[i] * (1.0 - n.val.v[i]);
  });
}

Tape::NodeId Tape::log_n(NodeId a) {
  Tensor C = val(a);
  for (double& x : C.v) x = std::log(x);
  return push(std::move(C), [a](Tape& t, Node& n) {
    const Tensor& A = t.val(a);
    Tensor& ga = t.node(a).grad;
    for (size_t i = 0; i < n.grad.size(); ++i) ga.v[i] += n.grad.v[i] / A.v[i];
  });
}

Tape::NodeId Tape::softmax_rows(NodeId a) {
  Tensor C = val(a);
  for (int i = 0; i < C.rows; ++i) {
    double mx = C.at(i, 0);
    for (int j = 1; j < C.cols; ++j) mx = std::max(mx, C.at(i, j));
    double z = 0.0;
    for (int j = 0; j < C.cols; ++j) {
      C.at(i, j) = std::exp(C.at(i, j) - mx);
      z += C.at(i, j);
    }
    for (int j = 0; j < C.cols; ++j) C.at(i, j) /= z;
  }
  return push(std::move(C), [a](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    for (int i = 0; i < n.val.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < n.val.cols; ++j) dot += n.grad.at(i, j) * n.val.at(i, j);
      for (int j = 0; j < n.val.cols; ++j)
        ga.at(i, j) += n.val.at(i, j) * (n.grad.at(i, j) - dot);
    }
  });
}

Tape::NodeId Tape::layer_norm_rows(NodeId a, NodeId gain, NodeId bias, double eps) {
  const Tensor& A = val(a);
  const Tensor& G = val(gain);
  const Tensor& B = val(bias);
  if (G.rows != 1 || G.cols != A.cols || B.rows != 1 || B.cols != A.cols)
    throw std::invalid_argument("layer_norm_rows: bad gain/bias shape");
  Tensor C(A.rows, A.cols);
  std::vector<double> inv_sd(size_t(A.rows)), mean(size_t(A.rows));
  for (int i = 0; i < A.rows; ++i) {
    double mu = 0.0;
    for (int j = 0; j < A.cols; ++j) mu += A.at(i, j);
    mu /= A.cols;
    double var = 0.0;
    for (int j = 0; j < A.cols; ++j) {
      const double d = A.at(i, j) - mu;
      var += d * d;
    }
    var /= A.cols;
    const double is = 1.0 / std::sqrt(var + eps);
    mean[size_t(i)] = mu;
    inv_sd[size_t(i)] = is;
    for (int j = 0; j < A.cols; ++j) C.at(i, j) = (A.at(i, j) - mu) * is * G.at(0, j) + B.at(0, j);
  }
  return push(std::move(C),
              [a, gain, bias, mean, inv_sd](Tape& t, Node& n) {
                const Tensor& A = t.val(a);
                const Tensor& G = t.val(gain);
                Tensor& ga = t.node(a).grad;
                Tensor& gg = t.node(gain).grad;
                Tensor& gb = t.node(bias).grad;
                const int D = A.cols;
                for (int i = 0; i < A.rows; ++i) {
                  const double mu = mean[size_t(i)];
                  const double is = inv_sd[size_t(i)];
                  // xhat = (x - mu) * is; dy/dx through mu and var.
                  double sum_dy_g = 0.0, sum_dy_g_xhat = 0.0;
                  for (int j = 0; j < D; ++j) {
                    const double xhat = (A.at(i, j) - mu) * is;
                    const double dyg = n.grad.at(i, j) * G.at(0, j);
                    sum_dy_g += dyg;
                    sum_dy_g_xhat += dyg * xhat;
                    gg.at(0, j) += n.grad.at(i, j) * xhat;
                    gb.at(0, j) += n.grad.at(i, j);
                  }
                  for (int j = 0; j < D; ++j) {
                    const double xhat = (A.at(i, j) - mu) * is;
                    const double dyg = n.grad.at(i, j) * G.at(0, j);
                    ga.at(i, j) += is * (dyg - sum_dy_g / D - xhat * sum_dy_g_xhat / D);
                  }
                }
              });
}

Tape::NodeId Tape::gather_rows(NodeId table, std::vector<int> idx) {
  const Tensor& T = val(table);
  Tensor C(int(idx.size()), T.cols);
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= T.rows) throw std::out_of_range("gather_rows: index");
    for (int j = 0; j < T.cols; ++j) C.at(int(i), j) = T.at(idx[i], j);
  }
  return push(std::move(C), [table, idx = std::move(idx)](Tape& t, Node& n) {
    Tensor& gt = t.node(table).grad;
    for (size_t i = 0; i < idx.size(); ++i)
      for (int j = 0; j < n.grad.cols; ++j) gt.at(idx[i], j) += n.grad.at(int(i), j);
  });
}

Tape::NodeId Tape::slice_rows(NodeId a, int r0, int r1) {
  const Tensor& A = val(a);
  if (r0 < 0 || r1 > A.rows || r0 > r1) throw std::out_of_range("slice_rows");
  Tensor C(r1 - r0, A.cols);
  for (int i = r0; i < r1; ++i)
    for (int j = 0; j < A.cols; ++j) C.at(i - r0, j) = A.at(i, j);
  return push(std::move(C), [a, r0](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    for (int i = 0; i < n.grad.rows; ++i)
      for (int j = 0; j < n.grad.cols; ++j) ga.at(i + r0, j) += n.grad.at(i, j);
  });
}

Tape::NodeId Tape::slice_cols(NodeId a, int c0, int c1) {
  const Tensor& A = val(a);
  if (c0 < 0 || c1 > A.cols || c0 > c1) throw std::out_of_range("slice_cols");
  Tensor C(A.rows, c1 - c0);
  for (int i = 0; i < A.rows; ++i)
    for (int j = c0; j < c1; ++j) C.at(i, j - c0) = A.at(i, j);
  return push(std::move(C), [a, c0](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    for (int i = 0; i < n.grad.rows; ++i)
      for (int j = 0; j < n.grad.cols; ++j) ga.at(i, j + c0) += n.grad.at(i, j);
  });
}

Tape::NodeId Tape::concat_cols(std::span<const NodeId> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
  const int rows = val(parts[0]).rows;
  int cols = 0;
  for (NodeId p : parts) {
    if (val(p).rows != rows) throw std::invalid_argument("concat_cols: row mismatch");
    cols += val(p).cols;
  }
  Tensor C(rows, cols);
  int off = 0;
  for (NodeId p : parts) {
    const Tensor& P = val(p);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < P.cols; ++j) C.at(i, off + j) = P.at(i, j);
    off += P.cols;
  }
  std::vector<NodeId> ps(parts.begin(), parts.end());
  return push(std::move(C), [ps = std::move(ps)](Tape& t, Node& n) {
    int off = 0;
    for (NodeId p : ps) {
      Tensor& gp = t.node(p).grad;
      for (int i = 0; i < gp.rows; ++i)
        for (int j = 0; j < gp.cols; ++j) gp.at(i, j) += n.grad.at(i, off + j);
      off += gp.cols;
    }
  });
}

Tape::NodeId Tape::shift_rows(NodeId a, int delta) {
  const Tensor& A = val(a);
  Tensor C(A.rows, A.cols);
  for (int i = 0; i < A.rows; ++i) {
    const int src = i - delta;
    if (src < 0 || src >= A.rows) continue;
    for (int j = 0; j < A.cols; ++j) C.at(i, j) = A.at(src, j);
  }
  return push(std::move(C), [a, delta](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    for (int i = 0; i < n.grad.rows; ++i) {
      const int src = i - delta;
      if (src < 0 || src >= ga.rows) continue;
      for (int j = 0; j < n.grad.cols; ++j) ga.at(src, j) += n.grad.at(i, j);
    }
  });
}

Tape::NodeId Tape::sum_all(NodeId a) {
  const Tensor& A = val(a);
  Tensor C(1, 1);
  double s = 0.0;
  for (double x : A.v) s += x;
  C.at(0, 0) = s;
  return push(std::move(C), [a](Tape& t, Node& n) {
    Tensor& ga = t.node(a).grad;
    for (double& g : ga.v) g += n.grad.at(0, 0);
  });
}

void Tape::rollback(size_t mark) {
  if (mark > nodes_.size()) throw std::invalid_argument("rollback: bad mark");
  nodes_.resize(mark);
}

void Tape::backward(std::span<const std::pair<NodeId, Tensor>> seeds) {
  for (auto& n : nodes_) {
    n.grad = Tensor(n.val.rows, n.val.cols);
  }
  NodeId top = -1;
  for (const auto& [id, seed] : seeds) {
    Node& n = node(id);
    check_same_shape(n.val, seed, "backward seed");
    for (size_t i = 0; i < seed.size(); ++i) n.grad.v[i] += seed.v[i];
    top = std::max(top, id);
  }
  for (NodeId id = top; id >= 0; --id) {
    Node& n = node(id);
    if (n.param_slot >= 0) {
      auto& buf = param_grads_.at(size_t(n.param_slot));
      for (size_t i = 0; i < n.grad.size(); ++i) buf[i] += n.grad.v[i];
    }
    if (n.back) n.back(*this, n);
  }
  // Release gradient storage; values stay valid for further forward work.
  for (auto& n : nodes_) n.grad = Tensor();
}

void Tape::backward_scalar(NodeId scalar_node, double seed) {
  Tensor s(1, 1);
  s.at(0, 0) = seed;
  const std::pair<NodeId, Tensor> one[] = {{scalar_node, std::move(s)}};
  backward(one);
}

void Tape::configure_param_grads(const std::vector<size_t>& slot_sizes) {
  param_grads_.clear();
  param_grads_.reserve(slot_sizes.size());
  for (size_t sz : slot_sizes) param_grads_.emplace_back(sz, 0.0);
}

void Tape::reset_param_grads() {
  for (auto& g : param_grads_) std::fill(g.begin(), g.end(), 0.0);
}

std::span<const double> Tape::param_grad(int slot) const {
  return param_grads_.at(size_t(slot));
}

}  // namespace evoflow::ad
