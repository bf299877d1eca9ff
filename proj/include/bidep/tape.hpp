// Define-by-run computation graph. Values are computed eagerly as nodes are
// recorded; backward() walks the tape in reverse and accumulates adjoints,
// so a node feeding several consumers receives the sum of their
// contributions. A tape and its nodes belong to one worker; input matrices
// are borrowed read-only and must outlive the tape.
#pragma once

#include <cstdint>
#include <vector>

#include "bidep/numerics.hpp"

namespace bidep {

enum class OpKind : std::uint8_t {
  kInput,
  kMatVec,
  kAdd,
  kHadamard,
  kConcat,
  kLrel,
  kSigmoid,
  kTanh,
  kSoftmax,
  kWeightedSum,
  kPickLog,
};

using NodeId = std::uint32_t;

struct TapeNode {
  OpKind kind = OpKind::kInput;
  std::vector<NodeId> args;
  // kPickLog: selected entry. kWeightedSum: offset into the weight vector.
  std::int64_t index = 0;
  RealVector value;
  RealVector grad;
  const RealMatrix* mat = nullptr;  // borrowed payload of a matrix input
  RealMatrix mat_grad;
};

class Tape {
 public:
  // Inputs. Vector inputs copy their payload; matrix inputs borrow it.
  NodeId input(RealVector v);
  NodeId input(const RealMatrix& m);

  // y = M x, or a dot product when the first argument is a vector node.
  NodeId matvec(NodeId m, NodeId x);

  // Elementwise sum of same-dimension vectors.
  NodeId add(const std::vector<NodeId>& terms);
  NodeId add(NodeId a, NodeId b) { return add(std::vector<NodeId>{a, b}); }

  NodeId hadamard(NodeId a, NodeId b);
  NodeId concat(const std::vector<NodeId>& parts);
  NodeId lrel(NodeId x);
  NodeId sigmoid(NodeId x);
  NodeId tanh(NodeId x);
  NodeId softmax(NodeId x);

  // out = sum_k w[offset + k] * items[k]; every item has the same dimension.
  NodeId weighted_sum(NodeId w, const std::vector<NodeId>& items,
                      std::size_t offset = 0);

  // Scalar node holding log(p[index]); gradient flows into that entry only.
  NodeId pick_log(NodeId p, std::size_t index);

  const RealVector& value(NodeId id) const { return nodes_[id].value; }
  const RealVector& grad(NodeId id) const { return nodes_[id].grad; }
  const RealMatrix& mat_grad(NodeId id) const { return nodes_[id].mat_grad; }
  bool is_matrix(NodeId id) const { return nodes_[id].mat != nullptr; }
  const TapeNode& node(NodeId id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }

  // Reverse sweep from a scalar root. Adjoints are zeroed first; throws on a
  // non-scalar root.
  void backward(NodeId root);

 private:
  NodeId push(TapeNode&& n);
  const RealVector& vec(NodeId id) const;

  std::vector<TapeNode> nodes_;
};

}  // namespace bidep
