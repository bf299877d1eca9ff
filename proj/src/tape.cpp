#include "bidep/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace bidep {

NodeId Tape::push(TapeNode&& n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

const RealVector& Tape::vec(NodeId id) const {
  const TapeNode& n = nodes_[id];
  if (n.mat != nullptr)
    throw DimensionError("tape: matrix node used where a vector is required");
  return n.value;
}

NodeId Tape::input(RealVector v) {
  TapeNode n;
  n.kind = OpKind::kInput;
  n.value = std::move(v);
  return push(std::move(n));
}

NodeId Tape::input(const RealMatrix& m) {
  TapeNode n;
  n.kind = OpKind::kInput;
  n.mat = &m;
  return push(std::move(n));
}

NodeId Tape::matvec(NodeId m, NodeId x) {
  const TapeNode& mn = nodes_[m];
  const RealVector& xv = vec(x);
  TapeNode n;
  n.kind = OpKind::kMatVec;
  n.args = {m, x};
  if (mn.mat != nullptr) {
    n.value = bidep::matvec(*mn.mat, xv);
  } else {
    // Row-vector times vector: a dot product yielding a scalar node.
    n.value = RealVector(1, dot(mn.value, xv));
  }
  return push(std::move(n));
}

NodeId Tape::add(const std::vector<NodeId>& terms) {
  if (terms.empty()) throw DimensionError("add: no operands");
  const std::size_t d = vec(terms[0]).dim();
  RealVector out(d);
  for (NodeId t : terms) {
    const RealVector& v = vec(t);
    if (v.dim() != d)
      throw DimensionError("add: incompatible shapes " + shape_str(out) +
                           " x " + shape_str(v));
    for (std::size_t i = 0; i < d; ++i) out[i] += v[i];
  }
  TapeNode n;
  n.kind = OpKind::kAdd;
  n.args = terms;
  n.value = std::move(out);
  return push(std::move(n));
}

NodeId Tape::hadamard(NodeId a, NodeId b) {
  const RealVector& av = vec(a);
  const RealVector& bv = vec(b);
  if (av.dim() != bv.dim())
    throw DimensionError("hadamard: incompatible shapes " + shape_str(av) +
                         " x " + shape_str(bv));
  RealVector out(av.dim());
  for (std::size_t i = 0; i < av.dim(); ++i) out[i] = av[i] * bv[i];
  TapeNode n;
  n.kind = OpKind::kHadamard;
  n.args = {a, b};
  n.value = std::move(out);
  return push(std::move(n));
}

NodeId Tape::concat(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw DimensionError("concat: no operands");
  RealVector out;
  for (NodeId p : parts) {
    const RealVector& v = vec(p);
    out.data.insert(out.data.end(), v.data.begin(), v.data.end());
  }
  TapeNode n;
  n.kind = OpKind::kConcat;
  n.args = parts;
  n.value = std::move(out);
  return push(std::move(n));
}

NodeId Tape::lrel(NodeId x) {
  TapeNode n;
  n.kind = OpKind::kLrel;
  n.args = {x};
  n.value = bidep::lrel(vec(x));
  return push(std::move(n));
}

NodeId Tape::sigmoid(NodeId x) {
  TapeNode n;
  n.kind = OpKind::kSigmoid;
  n.args = {x};
  n.value = sigmoid_vec(vec(x));
  return push(std::move(n));
}

NodeId Tape::tanh(NodeId x) {
  TapeNode n;
  n.kind = OpKind::kTanh;
  n.args = {x};
  n.value = tanh_vec(vec(x));
  return push(std::move(n));
}

NodeId Tape::softmax(NodeId x) {
  TapeNode n;
  n.kind = OpKind::kSoftmax;
  n.args = {x};
  n.value = bidep::softmax(vec(x));
  return push(std::move(n));
}

NodeId Tape::weighted_sum(NodeId w, const std::vector<NodeId>& items,
                          std::size_t offset) {
  const RealVector& wv = vec(w);
  if (items.empty()) throw DimensionError("weighted_sum: no items");
  if (wv.dim() < offset + items.size())
    throw DimensionError("weighted_sum: weight vector " + shape_str(wv) +
                         " shorter than offset + item count");
  const std::size_t d = vec(items[0]).dim();
  RealVector out(d);
  for (std::size_t k = 0; k < items.size(); ++k) {
    const RealVector& v = vec(items[k]);
    if (v.dim() != d)
      throw DimensionError("weighted_sum: incompatible shapes " +
                           shape_str(out) + " x " + shape_str(v));
    const Real wk = wv[offset + k];
    for (std::size_t i = 0; i < d; ++i) out[i] += wk * v[i];
  }
  TapeNode n;
  n.kind = OpKind::kWeightedSum;
  n.args.reserve(items.size() + 1);
  n.args.push_back(w);
  n.args.insert(n.args.end(), items.begin(), items.end());
  n.index = static_cast<std::int64_t>(offset);
  n.value = std::move(out);
  return push(std::move(n));
}

NodeId Tape::pick_log(NodeId p, std::size_t index) {
  const RealVector& pv = vec(p);
  if (index >= pv.dim())
    throw DimensionError("pick_log: index " + std::to_string(index) +
                         " out of range for " + shape_str(pv));
  TapeNode n;
  n.kind = OpKind::kPickLog;
  n.args = {p};
  n.index = static_cast<std::int64_t>(index);
  n.value = RealVector(1, std::log(pv[index]));
  return push(std::move(n));
}

void Tape::backward(NodeId root) {
  TapeNode& rn = nodes_[root];
  if (rn.mat != nullptr || rn.value.dim() != 1)
    throw std::logic_error("backward: root must be scalar-valued");

  for (TapeNode& n : nodes_) {
    if (n.mat != nullptr) {
      n.mat_grad = RealMatrix(n.mat->rows, n.mat->cols, 0.0);
    } else {
      n.grad = RealVector(n.value.dim(), 0.0);
    }
  }
  rn.grad[0] = 1.0;

  for (std::size_t idx = root + 1; idx-- > 0;) {
    TapeNode& n = nodes_[idx];
    const RealVector& g = n.grad;
    switch (n.kind) {
      case OpKind::kInput:
        break;
      case OpKind::kMatVec: {
        TapeNode& mn = nodes_[n.args[0]];
        TapeNode& xn = nodes_[n.args[1]];
        const RealVector& x = xn.value;
        if (mn.mat != nullptr) {
          const RealMatrix& m = *mn.mat;
          for (std::size_t r = 0; r < m.rows; ++r) {
            const Real gr = g[r];
            if (gr == 0.0) continue;
            Real* mg = mn.mat_grad.data.data() + r * m.cols;
            const Real* mrow = m.data.data() + r * m.cols;
            for (std::size_t c = 0; c < m.cols; ++c) {
              mg[c] += gr * x[c];
              xn.grad[c] += gr * mrow[c];
            }
          }
        } else {
          const Real gs = g[0];
          for (std::size_t i = 0; i < x.dim(); ++i) {
            mn.grad[i] += gs * x[i];
            xn.grad[i] += gs * mn.value[i];
          }
        }
        break;
      }
      case OpKind::kAdd:
        for (NodeId a : n.args) {
          RealVector& ag = nodes_[a].grad;
          for (std::size_t i = 0; i < g.dim(); ++i) ag[i] += g[i];
        }
        break;
      case OpKind::kHadamard: {
        TapeNode& an = nodes_[n.args[0]];
        TapeNode& bn = nodes_[n.args[1]];
        for (std::size_t i = 0; i < g.dim(); ++i) {
          an.grad[i] += g[i] * bn.value[i];
          bn.grad[i] += g[i] * an.value[i];
        }
        break;
      }
      case OpKind::kConcat: {
        std::size_t off = 0;
        for (NodeId p : n.args) {
          RealVector& pg = nodes_[p].grad;
          for (std::size_t i = 0; i < pg.dim(); ++i) pg[i] += g[off + i];
          off += pg.dim();
        }
        break;
      }
      case OpKind::kLrel: {
        TapeNode& xn = nodes_[n.args[0]];
        for (std::size_t i = 0; i < g.dim(); ++i)
          xn.grad[i] += g[i] * lrel_slope(xn.value[i]);
        break;
      }
      case OpKind::kSigmoid: {
        TapeNode& xn = nodes_[n.args[0]];
        for (std::size_t i = 0; i < g.dim(); ++i) {
          const Real y = n.value[i];
          xn.grad[i] += g[i] * y * (1.0 - y);
        }
        break;
      }
      case OpKind::kTanh: {
        TapeNode& xn = nodes_[n.args[0]];
        for (std::size_t i = 0; i < g.dim(); ++i) {
          const Real y = n.value[i];
          xn.grad[i] += g[i] * (1.0 - y * y);
        }
        break;
      }
      case OpKind::kSoftmax: {
        // ds = y .* (g - (g . y) 1)
        TapeNode& xn = nodes_[n.args[0]];
        Real gy = 0.0;
        for (std::size_t i = 0; i < g.dim(); ++i) gy += g[i] * n.value[i];
        for (std::size_t i = 0; i < g.dim(); ++i)
          xn.grad[i] += n.value[i] * (g[i] - gy);
        break;
      }
      case OpKind::kWeightedSum: {
        TapeNode& wn = nodes_[n.args[0]];
        const std::size_t offset = static_cast<std::size_t>(n.index);
        for (std::size_t k = 1; k < n.args.size(); ++k) {
          TapeNode& item = nodes_[n.args[k]];
          const Real wk = wn.value[offset + k - 1];
          Real acc = 0.0;
          for (std::size_t i = 0; i < g.dim(); ++i) {
            item.grad[i] += wk * g[i];
            acc += g[i] * item.value[i];
          }
          wn.grad[offset + k - 1] += acc;
        }
        break;
      }
      case OpKind::kPickLog: {
        TapeNode& pn = nodes_[n.args[0]];
        const std::size_t i = static_cast<std::size_t>(n.index);
        pn.grad[i] += g[0] / pn.value[i];
        break;
      }
    }
  }
}

}  // namespace bidep
